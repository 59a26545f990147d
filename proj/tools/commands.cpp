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

#include "commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "playalign/errors.hpp"
#include "playalign/index_io.hpp"
#include "playalign/ingest.hpp"
#include "playalign/metrics.hpp"
#include "playalign/play_store.hpp"
#include "playalign/retrieval.hpp"
#include "playalign/service.hpp"
#include "playalign/synthetic.hpp"
#include "playalign/util.hpp"
#include "playalign/wire.hpp"

namespace playalign::cli {

namespace fs = std::filesystem;

AgentSubset parse_selection(std::string_view text, int agents_per_team) {
  if (text == "all") return AgentSubset::all(agents_per_team);
  if (text == "players") return AgentSubset::players(agents_per_team);
  AgentSubset s;
  std::string token;
  auto flush = [&]() {
    if (token.empty()) return;
    if (token == "ball") {
      s.ball = true;
    } else if ((token[0] == 'o' || token[0] == 'd') && token.size() > 1) {
      int a = -1;
      try {
        std::size_t used = 0;
        a = std::stoi(token.substr(1), &used);
        if (used != token.size() - 1) a = -1;
      } catch (const std::exception&) {
        a = -1;
      }
      if (a < 0 || a >= agents_per_team) {
        throw InvalidArgument("bad agent in selection: '" + token + "'");
      }
      (token[0] == 'o' ? s.offense : s.defense) |= 1u << a;
    } else {
      throw InvalidArgument("bad selection token '" + token +
                            "' (use all, players, oN, dN or ball)");
    }
    token.clear();
  };
  for (char c : text) {
    if (c == ',' || c == ' ' || c == ';') {
      flush();
    } else {
      token += c;
    }
  }
  flush();
  if (s.empty()) throw InvalidArgument("empty selection");
  return s;
}

namespace {

std::pair<int, int> parse_k_range(const std::string& text) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      const int k = std::stoi(text);
      return {k, k};
    }
    return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw InvalidArgument("--k-range expects MIN:MAX, got '" + text + "'");
  }
}

std::unordered_map<std::string, double> parse_boosts(
    const std::vector<std::string>& items) {
  std::unordered_map<std::string, double> out;
  for (const std::string& item : items) {
    const auto eq = item.rfind('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("boost expects ID=FACTOR, got '" + item + "'");
    }
    try {
      out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw InvalidArgument("boost expects ID=FACTOR, got '" + item + "'");
    }
  }
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::shared_ptr<const PlayStore> load_store(const fs::path& path) {
  return std::make_shared<const PlayStore>(PlayStore::load(path));
}

PlayIndex load_attached(const fs::path& index, const fs::path& store) {
  PlayIndex idx = load_index(index);
  idx.attach(load_store(store));
  return idx;
}

struct GenerateArgs {
  std::string out;
  SyntheticConfig cfg;
};

struct IngestArgs {
  std::string manifest;
  std::string out;
  std::vector<int> windows{4};
  double stride = 1.0;
  std::optional<int> offense_team;
  double sample_rate = 25.0;
};

struct BuildArgs {
  std::string store;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t max_leaf_size = 2000;
  int max_depth = 6;
  std::string k_range = "2:10";
  std::string metric = "squared";
  std::vector<int> windows;
  bool no_baseline = false;
  int template_iterations = 50;
};

struct QueryArgs {
  std::string index;
  std::string store;
  std::string play;
  std::string request;
  std::string select = "all";
  int k = 10;
  std::string method = "tree";
  int probe = 1;
  bool exclude_self = false;
  bool json = false;
  std::vector<std::string> boost_plays;
  std::vector<std::string> boost_games;
};

struct RankArgs {
  std::string index;
  std::string store;
  std::string queries;
  std::string methods = "tree,baseline";
  int k = 10;
  bool exclude_self = false;
  std::string out;
};

struct ScoreArgs {
  std::string rankings;
  std::string judgments;
};

struct InterleaveArgs {
  std::string rankings;
  std::string judgments;
  std::string a = "tree";
  std::string b = "baseline";
  std::uint64_t seed = 0;
  std::string out;
};

struct CompressArgs {
  std::string store;
  std::string index;
  int window = 0;
  std::string out;
  std::uint64_t seed = 0;
  int restarts = 3;
  std::vector<int> k_values{5, 10, 20};
};

struct ServeArgs {
  std::string index;
  std::string store;
  std::string listen = "127.0.0.1:8080";
  int k = 10;
  std::string method = "tree";
};

int do_generate(const GenerateArgs& a, std::ostream& out) {
  const SyntheticCorpus corpus = generate_synthetic(a.cfg);
  write_synthetic(corpus, a.out);
  out << "wrote " << corpus.plays.size() << " plays to " << a.out << '\n';
  return 0;
}

int do_ingest(const IngestArgs& a, std::ostream& out) {
  RosterConfig roster;
  roster.sample_rate = a.sample_rate;
  OffenseRule rule{a.offense_team};
  PlayStore store;
  const auto games = read_manifest(a.manifest);
  for (const fs::path& g : games) {
    const GameStream stream = parse_tracking_file(g, roster);
    store.add_all(extract_windows(stream, a.windows, a.stride, roster, rule));
  }
  store.save(a.out);
  out << "ingested " << store.size() << " plays from " << games.size()
      << " games into " << a.out << '\n';
  return 0;
}

int do_build(const BuildArgs& a, std::ostream& out) {
  IndexConfig cfg(a.seed);
  cfg.tree.max_leaf_size = a.max_leaf_size;
  cfg.tree.max_depth = a.max_depth;
  std::tie(cfg.tree.k_min, cfg.tree.k_max) = parse_k_range(a.k_range);
  cfg.tree.templates.cost_metric = parse_cost_metric(a.metric);
  cfg.tree.templates.max_iterations = a.template_iterations;
  cfg.with_baseline = !a.no_baseline;
  cfg.windows.insert(a.windows.begin(), a.windows.end());
  const auto start = std::chrono::steady_clock::now();
  const PlayIndex index = build_index(load_store(a.store), cfg);
  save_index(a.out, index);
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  for (const WindowStats& s : index_stats(index)) {
    out << "window " << s.window_seconds << " s: " << s.plays << " plays, "
        << s.nodes << " nodes, " << s.leaves << " leaves, depth " << s.depth
        << ", largest leaf " << s.largest_leaf << '\n';
  }
  out << "index written to " << a.out << " in " << std::fixed
      << std::setprecision(2) << secs << " s\n";
  return 0;
}

void print_results(const QueryResult& r, std::ostream& out) {
  out << "window " << r.window_seconds << " s, leaf " << r.leaf << ", "
      << r.candidates << " candidates\n";
  out << "rank  play_id                      distance        score  "
         "offense    defense\n";
  for (const RankedResult& x : r.results) {
    std::string off, def;
    for (int v : x.offense.mapping()) off += std::to_string(v);
    for (int v : x.defense.mapping()) def += std::to_string(v);
    out << std::setw(4) << x.rank << "  " << std::left << std::setw(26)
        << x.play_id << std::right << std::fixed << std::setprecision(3)
        << std::setw(12) << x.distance << std::setw(13) << x.score << "  "
        << std::left << std::setw(10) << off << ' ' << def << std::right
        << '\n';
  }
}

int do_query(const QueryArgs& a, std::ostream& out) {
  const PlayIndex index = load_attached(a.index, a.store);
  Query q;
  if (!a.request.empty()) {
    std::ifstream in(a.request);
    if (!in) throw NotFound("cannot open " + a.request);
    q = query_from_json(Json::parse(in), a.k, parse_method(a.method));
  } else if (!a.play.empty()) {
    q.play = index.store()->at(a.play);
    q.selected = parse_selection(a.select, q.play.agents_per_team());
    q.k = a.k;
    q.method = parse_method(a.method);
    q.probe_leaves = a.probe;
  } else {
    throw InvalidArgument("query needs --play or --request");
  }
  q.play_boosts.merge(parse_boosts(a.boost_plays));
  q.game_boosts.merge(parse_boosts(a.boost_games));
  if (a.exclude_self) ++q.k;
  QueryResult r = run_query(index, q);
  if (a.exclude_self) {
    std::erase_if(r.results,
                  [&](const RankedResult& x) { return x.play_id == q.play.play_id; });
    if (r.results.size() > static_cast<std::size_t>(a.k)) r.results.resize(a.k);
    for (std::size_t i = 0; i < r.results.size(); ++i) r.results[i].rank = i + 1;
  }
  if (a.json) {
    out << result_to_json(r, *index.store()).dump(2) << '\n';
  } else {
    print_results(r, out);
  }
  return 0;
}

int do_rank(const RankArgs& a, std::ostream& out) {
  const PlayIndex index = load_attached(a.index, a.store);
  std::ifstream in(a.queries);
  if (!in) throw NotFound("cannot open " + a.queries);
  std::vector<RankingRow> rows;
  std::string line;
  std::size_t n = 0;
  const std::vector<std::string> methods = split_list(a.methods);
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (n == 1 && line.rfind("query_id", 0) == 0) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos) {
      throw ParseError("expected query_id,play_id[,selection]", n);
    }
    const std::string qid = line.substr(0, c1);
    const std::string pid = line.substr(c1 + 1, c2 == std::string::npos
                                                    ? std::string::npos
                                                    : c2 - c1 - 1);
    const std::string sel =
        c2 == std::string::npos ? "all" : line.substr(c2 + 1);
    Query q;
    q.play = index.store()->at(pid);
    q.selected = parse_selection(sel, q.play.agents_per_team());
    q.k = a.k + (a.exclude_self ? 1 : 0);
    for (const std::string& m : methods) {
      q.method = parse_method(m);
      const QueryResult r = run_query(index, q);
      int rank = 0;
      for (const RankedResult& x : r.results) {
        if (a.exclude_self && x.play_id == pid) continue;
        if (rank == a.k) break;
        rows.push_back({qid, m, ++rank, x.play_id});
      }
    }
  }
  if (a.out.empty()) {
    write_rankings(out, rows);
  } else {
    std::ofstream o(a.out);
    write_rankings(o, rows);
    out << "wrote " << rows.size() << " ranking rows to " << a.out << '\n';
  }
  return 0;
}

int do_score(const ScoreArgs& a, std::ostream& out) {
  std::ifstream in(a.rankings);
  if (!in) throw NotFound("cannot open " + a.rankings);
  const auto rankings = read_rankings(in);
  const Judgments judgments = Judgments::load(a.judgments);
  std::map<std::string, std::vector<std::pair<double, double>>> per_method;
  for (const auto& [qid, methods] : rankings) {
    const std::set<std::string> rel = judgments.relevant_set(qid);
    for (const auto& [m, ranking] : methods) {
      per_method[m].emplace_back(average_precision(ranking, rel),
                                 expected_reciprocal_rank(ranking, rel));
    }
  }
  out << "method,queries,map,err\n";
  for (const auto& [m, v] : per_method) {
    double ap = 0.0, err = 0.0;
    for (const auto& [x, y] : v) {
      ap += x;
      err += y;
    }
    out << m << ',' << v.size() << ',' << format_double(ap / v.size()) << ','
        << format_double(err / v.size()) << '\n';
  }
  return 0;
}

// Stable across standard libraries, unlike std::hash.
std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

int do_interleave(const InterleaveArgs& a, std::ostream& out) {
  std::ifstream in(a.rankings);
  if (!in) throw NotFound("cannot open " + a.rankings);
  const auto rankings = read_rankings(in);
  std::optional<Judgments> judgments;
  if (!a.judgments.empty()) judgments = Judgments::load(a.judgments);
  std::ofstream file;
  if (!a.out.empty()) file.open(a.out);
  std::ostream& rows = a.out.empty() ? out : file;
  rows << "query_id,position,play_id,credit\n";
  InterleaveOutcome total;
  for (const auto& [qid, methods] : rankings) {
    const auto ia = methods.find(a.a);
    const auto ib = methods.find(a.b);
    if (ia == methods.end() || ib == methods.end()) continue;
    const auto items = team_draft_interleave(
        ia->second, ib->second, derive_seed(a.seed, fnv1a(qid)));
    for (std::size_t i = 0; i < items.size(); ++i) {
      const char* credit = items[i].credit == Team::a   ? a.a.c_str()
                           : items[i].credit == Team::b ? a.b.c_str()
                                                        : "both";
      rows << qid << ',' << i + 1 << ',' << items[i].play_id << ',' << credit
           << '\n';
    }
    if (judgments) {
      const auto o = interleave_outcome(items, judgments->relevant_set(qid));
      total.a_wins += o.a_wins;
      total.b_wins += o.b_wins;
      total.shared += o.shared;
    }
  }
  if (judgments) {
    out << a.a << " credited " << total.a_wins << ", " << a.b << " credited "
        << total.b_wins << ", shared " << total.shared << '\n';
  }
  return 0;
}

int do_compress(const CompressArgs& a, std::ostream& out) {
  const PlayIndex index = load_attached(a.index, a.store);
  int window = a.window;
  if (window == 0) window = index.windows().begin()->first;
  const WindowIndex* win = index.window(window);
  if (win == nullptr) {
    throw InvalidArgument("no index for " + std::to_string(window) + " s windows");
  }
  const std::vector<Play> plays = index.store()->with_window(window);
  CompressibilityConfig cfg;
  cfg.seed = a.seed;
  cfg.restarts = a.restarts;
  cfg.k_values = a.k_values;
  const CompressibilityReport report =
      compressibility_report(plays, win->tree, cfg);
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    std::ofstream w(fs::path(a.out) / "wce.csv");
    report.write_wce_csv(w);
    std::ofstream v(fs::path(a.out) / "variance.csv");
    report.write_variance_csv(v);
  }
  out << "alignment  " << "cumulative variance (" << cfg.components
      << " comps)  wce by k\n";
  for (const AlignmentCurves& c : report.alignments) {
    out << std::left << std::setw(10) << c.alignment << std::right << std::fixed
        << std::setprecision(4) << std::setw(12) << c.cumulative_variance
        << "            ";
    for (const auto& [k, v] : c.wce) out << " k=" << k << ':' << v;
    out << '\n';
  }
  return 0;
}

int do_serve(const ServeArgs& a, std::ostream& out) {
  ServiceConfig cfg;
  cfg.default_k = a.k;
  cfg.default_method = parse_method(a.method);
  Service service(cfg);
  if (!a.index.empty() || !a.store.empty()) {
    if (a.index.empty() || a.store.empty()) {
      throw InvalidArgument("serve needs both --index and --store");
    }
    service.set_engine(load_engine(a.index, a.store));
  }
  const auto colon = a.listen.rfind(':');
  if (colon == std::string::npos) {
    throw InvalidArgument("--listen expects HOST:PORT");
  }
  const std::string host = a.listen.substr(0, colon);
  const int port = std::stoi(a.listen.substr(colon + 1));
  HttpServer server(service);
  const int bound = server.bind(host, port);
  out << "listening on " << host << ':' << bound << std::endl;
  server.listen();
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Play retrieval with learned agent alignment"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic corpus");
  generate->add_option("--out", gen.out, "Output directory")->required();
  generate->add_option("--formations", gen.cfg.formations);
  generate->add_option("--plays-per-formation", gen.cfg.plays_per_formation);
  generate->add_option("--noise", gen.cfg.noise, "Per-frame noise, feet");
  generate->add_option("--motion", gen.cfg.motion_amplitude,
                       "Per-play role deviation, feet");
  generate->add_option("--shift", gen.cfg.formation_shift,
                       "Per-play rigid shift radius, feet");
  generate->add_option("--window-seconds", gen.cfg.window_seconds);
  generate->add_option("--duplicates", gen.cfg.duplicates_per_play,
                       "Near-duplicates per play");
  generate->add_option("--duplicate-motion", gen.cfg.duplicate_motion);
  generate->add_option("--duplicate-noise", gen.cfg.duplicate_noise);
  generate->add_option("--plays-per-game", gen.cfg.plays_per_game);
  generate->add_option("--seed", gen.cfg.seed);

  IngestArgs ing;
  auto* ingest = app.add_subcommand("ingest", "Window tracking data into a play store");
  ingest->add_option("--manifest", ing.manifest, "File listing game files")
      ->required();
  ingest->add_option("--out", ing.out, "Play store to write")->required();
  ingest->add_option("--window-seconds", ing.windows, "Window lengths")
      ->delimiter(',');
  ingest->add_option("--stride", ing.stride, "Window stride, seconds");
  ingest->add_option("--offense-team", ing.offense_team,
                     "Team id on offense (default: by possession)");
  ingest->add_option("--sample-rate", ing.sample_rate);

  BuildArgs bld;
  auto* build = app.add_subcommand("build", "Build an alignment index");
  build->add_option("--store", bld.store)->required();
  build->add_option("--out", bld.out, "Index file to write")->required();
  build->add_option("--seed", bld.seed);
  build->add_option("--max-leaf-size", bld.max_leaf_size);
  build->add_option("--max-depth", bld.max_depth, "Number of tree layers");
  build->add_option("--k-range", bld.k_range, "Cluster counts tried, MIN:MAX");
  build->add_option("--metric", bld.metric, "squared or euclidean");
  build->add_option("--window-seconds", bld.windows, "Only these windows")
      ->delimiter(',');
  build->add_option("--template-iterations", bld.template_iterations);
  build->add_flag("--no-baseline", bld.no_baseline);

  QueryArgs qry;
  auto* query = app.add_subcommand("query", "Retrieve plays similar to a query");
  query->add_option("--index", qry.index)->required();
  query->add_option("--store", qry.store)->required();
  query->add_option("--play", qry.play, "Stored play to use as the query");
  query->add_option("--request", qry.request, "JSON query request file");
  query->add_option("--select", qry.select, "all, players or e.g. o0,o2,ball");
  query->add_option("--k", qry.k);
  query->add_option("--method", qry.method, "tree or baseline");
  query->add_option("--probe", qry.probe, "Leaves to search");
  query->add_flag("--exclude-self", qry.exclude_self);
  query->add_flag("--json", qry.json);
  query->add_option("--boost-play", qry.boost_plays, "ID=FACTOR");
  query->add_option("--boost-game", qry.boost_games, "ID=FACTOR");

  auto* eval = app.add_subcommand("eval", "Evaluation tools");
  eval->require_subcommand(1);
  RankArgs rnk;
  auto* rank = eval->add_subcommand("rank", "Rankings CSV for a query list");
  rank->add_option("--index", rnk.index)->required();
  rank->add_option("--store", rnk.store)->required();
  rank->add_option("--queries", rnk.queries, "CSV query_id,play_id[,selection]")
      ->required();
  rank->add_option("--methods", rnk.methods);
  rank->add_option("--k", rnk.k);
  rank->add_flag("--exclude-self", rnk.exclude_self);
  rank->add_option("--out", rnk.out);
  ScoreArgs scr;
  auto* score = eval->add_subcommand("ap", "Mean AP and ERR per method");
  score->add_option("--rankings", scr.rankings)->required();
  score->add_option("--judgments", scr.judgments)->required();
  InterleaveArgs itl;
  auto* interleave = eval->add_subcommand("interleave", "Team-draft interleaving");
  interleave->add_option("--rankings", itl.rankings)->required();
  interleave->add_option("--judgments", itl.judgments);
  interleave->add_option("--a", itl.a);
  interleave->add_option("--b", itl.b);
  interleave->add_option("--seed", itl.seed);
  interleave->add_option("--out", itl.out);
  CompressArgs cmp;
  auto* compress = eval->add_subcommand("compress", "Compressibility curves");
  compress->add_option("--index", cmp.index)->required();
  compress->add_option("--store", cmp.store)->required();
  compress->add_option("--window-seconds", cmp.window);
  compress->add_option("--out", cmp.out, "Directory for wce.csv and variance.csv");
  compress->add_option("--seed", cmp.seed);
  compress->add_option("--restarts", cmp.restarts);
  compress->add_option("--k", cmp.k_values)->delimiter(',');

  ServeArgs srv;
  auto* serve = app.add_subcommand("serve", "HTTP query service");
  serve->add_option("--index", srv.index)->envname("PLAYALIGN_INDEX");
  serve->add_option("--store", srv.store)->envname("PLAYALIGN_STORE");
  serve->add_option("--listen", srv.listen, "HOST:PORT")
      ->envname("PLAYALIGN_LISTEN");
  serve->add_option("--k", srv.k)->envname("PLAYALIGN_DEFAULT_K");
  serve->add_option("--method", srv.method)->envname("PLAYALIGN_METHOD");

  std::vector<std::string> argv_store{"playalign"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& s : argv_store) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  if (threads != 0) set_thread_count(threads);

  try {
    if (*generate) return do_generate(gen, out);
    if (*ingest) return do_ingest(ing, out);
    if (*build) return do_build(bld, out);
    if (*query) return do_query(qry, out);
    if (*rank) return do_rank(rnk, out);
    if (*score) return do_score(scr, out);
    if (*interleave) return do_interleave(itl, out);
    if (*compress) return do_compress(cmp, out);
    if (*serve) return do_serve(srv, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace playalign::cli
