// Copyright 2026 The playalign Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "playalign/service.hpp"

#include <httplib.h>

#include "playalign/errors.hpp"
#include "playalign/index_io.hpp"
#include "playalign/wire.hpp"

namespace playalign {

std::shared_ptr<const Engine> load_engine(const std::filesystem::path& index,
                                          const std::filesystem::path& store) {
  auto engine = std::make_shared<Engine>();
  engine->index = load_index(index);
  engine->index.attach(std::make_shared<const PlayStore>(PlayStore::load(store)));
  engine->index_path = index;
  engine->store_path = store;
  return engine;
}

namespace {

Response error(int status, const std::string& message) {
  return {status, Json{{"error", message}}.dump()};
}

Response ok(const Json& j) { return {200, j.dump()}; }

}  // namespace

Service::Service(ServiceConfig config) : config_(config) {}

void Service::set_engine(std::shared_ptr<const Engine> engine) {
  std::lock_guard lock(mu_);
  engine_ = std::move(engine);
}

std::shared_ptr<const Engine> Service::engine() const {
  std::lock_guard lock(mu_);
  return engine_;
}

Response Service::query(const std::string& body) const {
  const auto e = engine();
  if (!e) return error(503, "no index loaded");
  try {
    const Query q = query_from_json(Json::parse(body), config_.default_k,
                                    config_.default_method);
    const QueryResult r = run_query(e->index, q);
    return ok(result_to_json(r, *e->index.store()));
  } catch (const Json::exception& ex) {
    return error(400, std::string("malformed request: ") + ex.what());
  } catch (const NotFound& ex) {
    return error(404, ex.what());
  } catch (const Error& ex) {
    return error(400, ex.what());
  }
}

Response Service::play(const std::string& play_id) const {
  const auto e = engine();
  if (!e) return error(503, "no index loaded");
  const Play* p = e->index.store()->find(play_id);
  if (p == nullptr) return error(404, "unknown play id " + play_id);
  return ok(play_to_json(*p));
}

Response Service::stats() const {
  const auto e = engine();
  if (!e) return error(503, "no index loaded");
  Json j = stats_to_json(index_stats(e->index));
  j["index"] = e->index_path.string();
  j["store"] = e->store_path.string();
  return ok(j);
}

Response Service::load(const std::string& body) {
  std::string index, store;
  try {
    const Json j = Json::parse(body);
    index = j.at("index").get<std::string>();
    store = j.at("store").get<std::string>();
  } catch (const Json::exception& ex) {
    return error(400, std::string("expected {\"index\": path, \"store\": path}: ") +
                          ex.what());
  }
  try {
    auto engine = load_engine(index, store);
    Json j = stats_to_json(index_stats(engine->index));
    set_engine(std::move(engine));
    j["index"] = index;
    j["store"] = store;
    return ok(j);
  } catch (const NotFound& ex) {
    return error(404, ex.what());
  } catch (const Error& ex) {
    return error(400, ex.what());
  }
}

struct HttpServer::Impl {
  explicit Impl(Service& s) : service(s) {}
  Service& service;
  httplib::Server server;
};

HttpServer::HttpServer(Service& service)
    : impl_(std::make_unique<Impl>(service)) {
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  Service& s = impl_->service;
  impl_->server.Post("/query",
                     [&s, reply](const httplib::Request& req,
                                 httplib::Response& res) {
                       reply(res, s.query(req.body));
                     });
  impl_->server.Get(R"(/plays/(.+))", [&s, reply](const httplib::Request& req,
                                                   httplib::Response& res) {
    reply(res, s.play(req.matches[1]));
  });
  impl_->server.Get("/index/stats",
                    [&s, reply](const httplib::Request&, httplib::Response& res) {
                      reply(res, s.stats());
                    });
  impl_->server.Post("/index/load", [&s, reply](const httplib::Request& req,
                                                httplib::Response& res) {
    reply(res, s.load(req.body));
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace playalign
