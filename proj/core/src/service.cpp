#include "pcx/service.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>

#include "httplib.h"
#include "pcx/convexity.hpp"
#include "pcx/error.hpp"
#include "pcx/io.hpp"
#include "pcx/pcm.hpp"
#include "pcx/scales.hpp"
#include "pcx/solvers.hpp"

namespace pcx::service {

using nlohmann::json;

namespace {

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

ApiResponse error_response(int status, const std::string& message, json extra = json::object()) {
  extra["error"] = message;
  return {status, std::move(extra)};
}

json scale_names() {
  json names = json::array();
  for (const auto& s : scales::builtin_scales()) names.push_back(s.name());
  return names;
}

// Canonical representative of an admissible judgment, so that reciprocal
// entries reproduce the exact scale value.
std::optional<double> canonical(const scales::Scale& scale, double v) {
  for (double s : scale.admissible())
    if (std::abs(v - s) <= 1e-9 * s) return s;
  return std::nullopt;
}

}  // namespace

json to_json(const Session& s) {
  json judgments = json::array();
  for (const auto& [key, v] : s.judgments)
    judgments.push_back({{"i", key.first}, {"j", key.second}, {"value", v}});
  return {{"id", s.id},
          {"alternatives", s.alternatives},
          {"scale", s.scale},
          {"judgments", std::move(judgments)},
          {"created_ms", s.created_ms},
          {"updated_ms", s.updated_ms}};
}

Session session_from_json(const json& j) {
  Session s;
  s.id = j.at("id").get<std::string>();
  s.alternatives = j.at("alternatives").get<std::vector<std::string>>();
  s.scale = j.at("scale").get<std::string>();
  for (const auto& e : j.at("judgments"))
    s.judgments[{e.at("i").get<std::size_t>(), e.at("j").get<std::size_t>()}] =
        e.at("value").get<double>();
  s.created_ms = j.value("created_ms", std::int64_t{0});
  s.updated_ms = j.value("updated_ms", std::int64_t{0});
  return s;
}

// ---------------------------------------------------------------------------
// SessionStore

struct SessionStore::Impl {
  sqlite3* db = nullptr;
  std::mutex mu;

  void exec(const char* sql) {
    char* err = nullptr;
    if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
      std::string msg = err ? err : "unknown sqlite error";
      sqlite3_free(err);
      throw Error(ErrorCode::kStorage, msg);
    }
  }

  struct Stmt {
    sqlite3_stmt* s = nullptr;
    Stmt(sqlite3* db, const char* sql) {
      if (sqlite3_prepare_v2(db, sql, -1, &s, nullptr) != SQLITE_OK)
        throw Error(ErrorCode::kStorage, sqlite3_errmsg(db));
    }
    ~Stmt() { sqlite3_finalize(s); }
    void bind(int idx, const std::string& v) {
      sqlite3_bind_text(s, idx, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
    }
  };
};

SessionStore::SessionStore(const std::string& path) : impl_(std::make_unique<Impl>()) {
  const int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX;
  if (sqlite3_open_v2(path.c_str(), &impl_->db, flags, nullptr) != SQLITE_OK) {
    std::string msg = impl_->db ? sqlite3_errmsg(impl_->db) : "cannot open database";
    sqlite3_close(impl_->db);
    throw Error(ErrorCode::kStorage, "cannot open session store '" + path + "': " + msg);
  }
  impl_->exec("CREATE TABLE IF NOT EXISTS sessions (id TEXT PRIMARY KEY, body TEXT NOT NULL)");
}

SessionStore::~SessionStore() { sqlite3_close(impl_->db); }

void SessionStore::put(const Session& s) {
  std::lock_guard lock(impl_->mu);
  Impl::Stmt st(impl_->db, "INSERT OR REPLACE INTO sessions (id, body) VALUES (?1, ?2)");
  st.bind(1, s.id);
  st.bind(2, to_json(s).dump());
  if (sqlite3_step(st.s) != SQLITE_DONE) throw Error(ErrorCode::kStorage, sqlite3_errmsg(impl_->db));
}

std::optional<Session> SessionStore::get(const std::string& id) {
  std::lock_guard lock(impl_->mu);
  Impl::Stmt st(impl_->db, "SELECT body FROM sessions WHERE id = ?1");
  st.bind(1, id);
  const int rc = sqlite3_step(st.s);
  if (rc == SQLITE_DONE) return std::nullopt;
  if (rc != SQLITE_ROW) throw Error(ErrorCode::kStorage, sqlite3_errmsg(impl_->db));
  const auto* text = reinterpret_cast<const char*>(sqlite3_column_text(st.s, 0));
  return session_from_json(json::parse(text));
}

bool SessionStore::erase(const std::string& id) {
  std::lock_guard lock(impl_->mu);
  Impl::Stmt st(impl_->db, "DELETE FROM sessions WHERE id = ?1");
  st.bind(1, id);
  if (sqlite3_step(st.s) != SQLITE_DONE) throw Error(ErrorCode::kStorage, sqlite3_errmsg(impl_->db));
  return sqlite3_changes(impl_->db) > 0;
}

// ---------------------------------------------------------------------------
// Reports

json build_report(const Session& s) {
  const std::size_t n = s.alternatives.size();
  const std::size_t total = n * (n - 1) / 2;
  const auto judged = [&](std::size_t i, std::size_t j) { return s.judgments.count({i, j}) > 0; };

  json pending = json::array();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!judged(i, j)) pending.push_back({i, j});

  // Triads whose three pairs are all judged, most inconsistent first.
  std::vector<TriadReport> triads;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k)
      for (std::size_t j = k + 1; j < n; ++j) {
        if (!judged(i, k) || !judged(k, j) || !judged(i, j)) continue;
        TriadReport t{i, k, j, s.judgments.at({i, k}), s.judgments.at({k, j}),
                      s.judgments.at({i, j}), 0.0};
        t.value = triad_inconsistency(t.a_ik, t.a_ij, t.a_kj);
        if (t.value > 1e-12) triads.push_back(t);
      }
  std::stable_sort(triads.begin(), triads.end(),
                   [](const TriadReport& x, const TriadReport& y) { return x.value > y.value; });
  json suggestions = json::array();
  for (const auto& t : triads) suggestions.push_back(io::to_json(t));

  const bool complete = s.judgments.size() == total;
  json report = {{"session_id", s.id},
                 {"alternatives", s.alternatives},
                 {"scale", s.scale},
                 {"threshold", kAcceptableInconsistency},
                 {"judged", s.judgments.size()},
                 {"pairs_total", total},
                 {"pending", std::move(pending)},
                 {"complete", complete},
                 {"matrix", nullptr},
                 {"inconsistency", nullptr},
                 {"certification", nullptr},
                 {"weights", nullptr},
                 {"suggestions", std::move(suggestions)}};
  if (!complete) return report;

  std::vector<double> upper;
  for (const auto& [key, v] : s.judgments) upper.push_back(v);  // map order is row-major
  const PCMatrix a(n, std::move(upper), s.alternatives);
  const auto cert = convexity::certify(a);
  report["matrix"] = io::to_json(a);
  report["inconsistency"] = io::to_json(inconsistency(a));
  report["certification"] = io::to_json(cert);

  SolveOptions opts;
  opts.starts = cert.admissible ? 1 : 20;
  json weights = {{"lsm", io::to_json(solve_lsm(a, opts))}};
  try {
    weights["wlsm"] = io::to_json(solve_wlsm(a));
  } catch (const Error& e) {
    weights["wlsm"] = {{"error", e.what()}};
  }
  weights["llsm"] = io::to_json(solve_llsm(a));
  weights["evm"] = io::to_json(solve_evm(a));
  report["weights"] = std::move(weights);
  return report;
}

// ---------------------------------------------------------------------------
// ElicitationService

ElicitationService::ElicitationService(const std::string& db_path) : store_(db_path) {}

std::shared_ptr<std::mutex> ElicitationService::session_lock(const std::string& id) {
  std::lock_guard lock(locks_mu_);
  auto& m = locks_[id];
  if (!m) m = std::make_shared<std::mutex>();
  return m;
}

std::string ElicitationService::new_id() {
  static thread_local std::mt19937_64 gen{std::random_device{}()};
  for (;;) {
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(gen()),
                  static_cast<unsigned long long>(gen()));
    if (!store_.get(buf)) return buf;
  }
}

ApiResponse ElicitationService::list_scales() {
  json out = json::array();
  for (const auto& s : scales::builtin_scales())
    out.push_back({{"name", s.name()}, {"values", s.values()}, {"admissible", s.admissible()}});
  return {200, {{"scales", std::move(out)}}};
}

ApiResponse ElicitationService::create_session(const json& body) {
  if (!body.is_object() || !body.contains("alternatives") || !body["alternatives"].is_array()) {
    return error_response(400, "body must be an object with an \"alternatives\" array");
  }
  Session s;
  for (const auto& a : body["alternatives"]) {
    if (!a.is_string()) return error_response(400, "alternatives must be strings");
    s.alternatives.push_back(a.get<std::string>());
  }
  if (s.alternatives.size() < 2 || s.alternatives.size() > kMaxAlternatives) {
    return error_response(400, "number of alternatives must be between 2 and " +
                                   std::to_string(kMaxAlternatives));
  }
  const std::string scale_name = body.value("scale", std::string("1-3"));
  const auto scale = scales::find_scale(scale_name);
  if (!scale) {
    return error_response(400, "unknown scale '" + scale_name + "'",
                          {{"valid_scales", scale_names()}});
  }
  s.scale = scale->name();
  s.id = new_id();
  s.created_ms = s.updated_ms = now_ms();
  store_.put(s);

  json report = build_report(s);
  {
    std::lock_guard lock(cache_mu_);
    reports_[s.id] = report;
  }
  return {201, {{"id", s.id}, {"session", to_json(s)}, {"report", std::move(report)}}};
}

ApiResponse ElicitationService::set_judgment(const std::string& id, std::size_t i, std::size_t j,
                                             const json& body) {
  const auto lock = session_lock(id);
  std::lock_guard guard(*lock);
  auto s = store_.get(id);
  if (!s) return error_response(404, "unknown session '" + id + "'");

  const std::size_t n = s->alternatives.size();
  if (i >= n || j >= n) return error_response(400, "alternative index out of range");
  if (i == j) return error_response(400, "a judgment needs two distinct alternatives");

  if (!body.is_object() || !body.contains("value")) {
    return error_response(400, "body must be an object with a \"value\"");
  }
  double v = 0.0;
  try {
    const auto& raw = body["value"];
    if (raw.is_number()) {
      v = raw.get<double>();
    } else if (raw.is_string()) {
      v = io::parse_number(raw.get<std::string>());
    } else {
      return error_response(400, "\"value\" must be a number or a \"p/q\" string");
    }
  } catch (const Error& e) {
    return error_response(400, e.what());
  }

  const auto scale = scales::find_scale(s->scale);
  const auto value = canonical(*scale, v);
  if (!value) {
    return error_response(422, "value is not on scale '" + scale->name() + "'",
                          {{"admissible", scale->admissible()}});
  }
  if (i < j) {
    s->judgments[{i, j}] = *value;
  } else {
    s->judgments[{j, i}] = *canonical(*scale, 1.0 / *value);
  }
  s->updated_ms = now_ms();
  store_.put(*s);

  json report = build_report(*s);
  {
    std::lock_guard c(cache_mu_);
    reports_[id] = report;
  }
  return {200, std::move(report)};
}

ApiResponse ElicitationService::get_report(const std::string& id) {
  {
    std::lock_guard c(cache_mu_);
    if (auto it = reports_.find(id); it != reports_.end()) return {200, it->second};
  }
  const auto lock = session_lock(id);
  std::lock_guard guard(*lock);
  const auto s = store_.get(id);
  if (!s) return error_response(404, "unknown session '" + id + "'");
  json report = build_report(*s);
  std::lock_guard c(cache_mu_);
  reports_[id] = report;
  return {200, std::move(report)};
}

ApiResponse ElicitationService::get_session(const std::string& id) {
  const auto s = store_.get(id);
  if (!s) return error_response(404, "unknown session '" + id + "'");
  return {200, to_json(*s)};
}

ApiResponse ElicitationService::delete_session(const std::string& id) {
  const auto lock = session_lock(id);
  std::lock_guard guard(*lock);
  if (!store_.erase(id)) return error_response(404, "unknown session '" + id + "'");
  std::lock_guard c(cache_mu_);
  reports_.erase(id);
  return {204, nullptr};
}

// ---------------------------------------------------------------------------
// HTTP

struct HttpServer::Impl {
  ElicitationService& service;
  httplib::Server server;

  static void send(httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    if (r.status != 204) res.set_content(r.body.dump(), "application/json");
  }

  static std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
    try {
      return req.body.empty() ? json::object() : json::parse(req.body);
    } catch (const json::parse_error& e) {
      send(res, error_response(400, std::string("invalid JSON body: ") + e.what()));
      return std::nullopt;
    }
  }

  explicit Impl(ElicitationService& s) : service(s) {
    // No SO_REUSEPORT: a second server on a busy port must fail to bind.
    server.set_socket_options([](auto sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof yes);
    });
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
      const json line = {{"ts_ms", now_ms()},     {"method", req.method},
                         {"path", req.path},      {"status", res.status},
                         {"remote", req.remote_addr}};
      std::cerr << line.dump() << std::endl;
    });
    server.set_exception_handler(
        [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
          std::string msg = "internal error";
          try {
            if (ep) std::rethrow_exception(ep);
          } catch (const std::exception& e) {
            msg = e.what();
          }
          send(res, error_response(500, msg));
        });

    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
    });
    server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok", "text/plain");
    });
    server.Get("/scales", [](const httplib::Request&, httplib::Response& res) {
      send(res, ElicitationService::list_scales());
    });
    server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      if (auto body = parse_body(req, res)) send(res, service.create_session(*body));
    });
    server.Get(R"(/sessions/([0-9a-f]+))", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, service.get_session(req.matches[1]));
    });
    server.Delete(R"(/sessions/([0-9a-f]+))",
                  [this](const httplib::Request& req, httplib::Response& res) {
                    send(res, service.delete_session(req.matches[1]));
                  });
    server.Get(R"(/sessions/([0-9a-f]+)/report)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 send(res, service.get_report(req.matches[1]));
               });
    server.Put(R"(/sessions/([0-9a-f]+)/judgments/(\d+)/(\d+))",
               [this](const httplib::Request& req, httplib::Response& res) {
                 const auto body = parse_body(req, res);
                 if (!body) return;
                 std::size_t i = 0, j = 0;
                 try {
                   i = std::stoul(req.matches[2]);
                   j = std::stoul(req.matches[3]);
                 } catch (const std::exception&) {
                   send(res, error_response(400, "alternative index out of range"));
                   return;
                 }
                 send(res, service.set_judgment(req.matches[1], i, j, *body));
               });
  }
};

HttpServer::HttpServer(ElicitationService& service)
    : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

std::optional<int> HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int p = impl_->server.bind_to_any_port(host);
    if (p <= 0) return std::nullopt;
    return p;
  }
  if (!impl_->server.bind_to_port(host, port)) return std::nullopt;
  return port;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace pcx::service
