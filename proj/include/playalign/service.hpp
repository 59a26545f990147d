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

#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>

#include "playalign/retrieval.hpp"

namespace playalign {

// An index with its play store attached, immutable once published.
struct Engine {
  PlayIndex index;
  std::filesystem::path index_path;
  std::filesystem::path store_path;
};

std::shared_ptr<const Engine> load_engine(const std::filesystem::path& index,
                                          const std::filesystem::path& store);

struct Response {
  int status = 200;
  std::string body;
};

struct ServiceConfig {
  int default_k = 10;
  Method default_method = Method::tree;
};

// Request handlers independent of the HTTP transport. Queries run against
// the engine current when they start; /index/load swaps it atomically.
class Service {
 public:
  explicit Service(ServiceConfig config = {});

  void set_engine(std::shared_ptr<const Engine> engine);
  std::shared_ptr<const Engine> engine() const;

  Response query(const std::string& body) const;             // POST /query
  Response play(const std::string& play_id) const;           // GET /plays/{id}
  Response stats() const;                                    // GET /index/stats
  Response load(const std::string& body);                    // POST /index/load

 private:
  ServiceConfig config_;
  mutable std::mutex mu_;
  std::shared_ptr<const Engine> engine_;
};

// Binds the HTTP routes of `service`. Port 0 picks a free port.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  int bind(const std::string& host, int port);  // returns the bound port
  void listen();  // blocks until stop()
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace playalign
