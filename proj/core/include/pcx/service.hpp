#pragma once

// Session-oriented elicitation API. A session collects pairwise judgments on
// a fixed scale; every change recomputes a report with inconsistency
// localization and, once all pairs are judged, certification and weights.
//
// HTTP surface (JSON bodies, indices 0-based):
//   GET    /health                              -> 200 "ok"
//   GET    /scales                              -> builtin scales
//   POST   /sessions {"alternatives": [...], "scale": "1-3"}
//   GET    /sessions/{id}
//   DELETE /sessions/{id}
//   PUT    /sessions/{id}/judgments/{i}/{j} {"value": 3 | "1/3"}
//   GET    /sessions/{id}/report

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pcx::service {

inline constexpr std::size_t kMaxAlternatives = 20;

struct Session {
  std::string id;
  std::vector<std::string> alternatives;
  std::string scale;
  /// Keyed by (i, j) with i < j; the value is a_ij.
  std::map<std::pair<std::size_t, std::size_t>, double> judgments;
  std::int64_t created_ms = 0;
  std::int64_t updated_ms = 0;
};

nlohmann::json to_json(const Session& s);
Session session_from_json(const nlohmann::json& j);

/// Sessions persisted as JSON documents in an SQLite table keyed by id.
/// ":memory:" gives a non-durable store. Thread-safe.
class SessionStore {
 public:
  explicit SessionStore(const std::string& path);
  ~SessionStore();
  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  void put(const Session& s);
  std::optional<Session> get(const std::string& id);
  bool erase(const std::string& id);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct ApiResponse {
  int status;
  nlohmann::json body;
};

/// Report for a session; depends only on alternatives, scale and judgments.
nlohmann::json build_report(const Session& s);

class ElicitationService {
 public:
  explicit ElicitationService(const std::string& db_path);

  ApiResponse create_session(const nlohmann::json& body);
  ApiResponse set_judgment(const std::string& id, std::size_t i, std::size_t j,
                           const nlohmann::json& body);
  ApiResponse get_report(const std::string& id);
  ApiResponse get_session(const std::string& id);
  ApiResponse delete_session(const std::string& id);
  static ApiResponse list_scales();

 private:
  std::shared_ptr<std::mutex> session_lock(const std::string& id);
  std::string new_id();

  SessionStore store_;
  std::mutex locks_mu_;
  std::unordered_map<std::string, std::shared_ptr<std::mutex>> locks_;
  std::mutex cache_mu_;
  std::unordered_map<std::string, nlohmann::json> reports_;
};

/// HTTP front end for an ElicitationService.
class HttpServer {
 public:
  explicit HttpServer(ElicitationService& service);
  ~HttpServer();

  /// Port 0 picks a free port. Returns the bound port, or nothing on failure.
  std::optional<int> bind(const std::string& host, int port);
  /// Blocks until stop().
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pcx::service
