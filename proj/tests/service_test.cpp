#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "pcx/convexity.hpp"
#include "pcx/io.hpp"
#include "pcx/service.hpp"
#include "pcx/solvers.hpp"

using namespace pcx;
using namespace pcx::service;
using nlohmann::json;

namespace {

std::string create(ElicitationService& svc, std::vector<std::string> alts, const std::string& scale) {
  const auto r = svc.create_session({{"alternatives", alts}, {"scale", scale}});
  REQUIRE(r.status == 201);
  return r.body["id"].get<std::string>();
}

json enter(ElicitationService& svc, const std::string& id, const std::vector<json>& upper) {
  // Upper triangle of a 3x3 in row-major order.
  const std::pair<int, int> pairs[] = {{0, 1}, {0, 2}, {1, 2}};
  json last;
  for (std::size_t k = 0; k < upper.size(); ++k) {
    const auto r = svc.set_judgment(id, pairs[k].first, pairs[k].second, {{"value", upper[k]}});
    REQUIRE(r.status == 200);
    last = r.body;
  }
  return last;
}

struct TempDb {
  std::filesystem::path path;
  TempDb() {
    path = std::filesystem::temp_directory_path() /
           ("pcx_service_test_" + std::to_string(::getpid()) + ".db");
    std::filesystem::remove(path);
  }
  ~TempDb() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("create_session") {
  ElicitationService svc(":memory:");
  const auto r = svc.create_session({{"alternatives", {"A", "B", "C"}}, {"scale", "1-3"}});
  CHECK(r.status == 201);
  CHECK(r.body["report"]["pending"].size() == 3);
  CHECK(r.body["report"]["complete"] == false);
  CHECK(r.body["session"]["scale"] == "1-3");

  CHECK(svc.create_session({{"alternatives", {"A"}}}).status == 400);
  CHECK(svc.create_session({{"alternatives", std::vector<std::string>(21, "x")}}).status == 400);
  CHECK(svc.create_session({{"alternatives", std::vector<std::string>(20, "x")}}).status == 201);
  const auto bad = svc.create_session({{"alternatives", {"A", "B"}}, {"scale", "1-7"}});
  CHECK(bad.status == 400);
  CHECK(bad.body["valid_scales"].size() == 4);
  CHECK(svc.create_session(json::array()).status == 400);
  // Default scale.
  CHECK(svc.create_session({{"alternatives", {"A", "B"}}}).body["session"]["scale"] == "1-3");
  // Ids are unique.
  CHECK(create(svc, {"A", "B"}, "1-3") != create(svc, {"A", "B"}, "1-3"));
}

TEST_CASE("complete the acceptable triad") {
  ElicitationService svc(":memory:");
  const std::string id = create(svc, {"A", "B", "C"}, "1-3");
  const json rep = enter(svc, id, {2, 3, 2});
  CHECK(rep["complete"] == true);
  CHECK(std::abs(rep["inconsistency"]["global_value"].get<double>() - 0.25) <= 1e-12);
  CHECK(rep["inconsistency"]["acceptable"] == true);
  CHECK(rep["certification"]["verdict"] == "UNIQUE_GUARANTEED");
  for (const char* m : {"lsm", "wlsm", "llsm", "evm"}) CHECK(rep["weights"].contains(m));
  CHECK(rep["weights"]["lsm"]["starts"] == 1);
  CHECK(rep["suggestions"].size() == 1);

  // Same report on read.
  const auto read = svc.get_report(id);
  CHECK(read.status == 200);
  CHECK(read.body.dump() == rep.dump());

  // Weights are exactly the solver outputs on the assembled matrix.
  const PCMatrix a = build_matrix(3, {2, 3, 2}, {"A", "B", "C"});
  CHECK(rep["weights"]["llsm"] == io::to_json(solve_llsm(a)));
  CHECK(rep["weights"]["evm"] == io::to_json(solve_evm(a)));
  CHECK(rep["weights"]["wlsm"] == io::to_json(solve_wlsm(a)));
  SolveOptions one;
  one.starts = 1;
  CHECK(rep["weights"]["lsm"] == io::to_json(solve_lsm(a, one)));
}

TEST_CASE("complete the unacceptable triad on 1-5") {
  ElicitationService svc(":memory:");
  const std::string id = create(svc, {"A", "B", "C"}, "1-5");
  const json rep = enter(svc, id, {3, 5, 3});
  CHECK(std::abs(rep["inconsistency"]["global_value"].get<double>() - 4.0 / 9.0) <= 1e-12);
  CHECK(rep["inconsistency"]["acceptable"] == false);
  CHECK(rep["inconsistency"]["worst"]["i"] == 0);
  CHECK(rep["inconsistency"]["worst"]["k"] == 1);
  CHECK(rep["inconsistency"]["worst"]["j"] == 2);
  CHECK(rep["certification"]["verdict"] == "UNKNOWN");
  CHECK(rep["weights"]["lsm"]["starts"] == 20);
}

TEST_CASE("judgment validation") {
  ElicitationService svc(":memory:");
  const std::string id = create(svc, {"A", "B", "C"}, "1-3");
  const auto off = svc.set_judgment(id, 0, 1, {{"value", 7}});
  CHECK(off.status == 422);
  CHECK(off.body["admissible"].size() == 5);
  CHECK(off.body["error"].get<std::string>().find("1-3") != std::string::npos);
  CHECK(svc.set_judgment("ffff", 0, 1, {{"value", 2}}).status == 404);
  CHECK(svc.set_judgment(id, 1, 1, {{"value", 1}}).status == 400);
  CHECK(svc.set_judgment(id, 0, 3, {{"value", 2}}).status == 400);
  CHECK(svc.set_judgment(id, 0, 1, {{"value", "x"}}).status == 400);
  CHECK(svc.set_judgment(id, 0, 1, {{"value", true}}).status == 400);
  CHECK(svc.set_judgment(id, 0, 1, json::object()).status == 400);
  CHECK(svc.get_report("ffff").status == 404);

  // Fractions, and reverse orientation stored as the reciprocal.
  CHECK(svc.set_judgment(id, 0, 1, {{"value", "1/3"}}).status == 200);
  CHECK(svc.set_judgment(id, 2, 0, {{"value", 0.5}}).status == 200);
  const auto s = svc.get_session(id).body;
  REQUIRE(s["judgments"].size() == 2);
  CHECK(s["judgments"][0]["value"].get<double>() == 1.0 / 3.0);
  CHECK(s["judgments"][1]["j"] == 2);
  CHECK(s["judgments"][1]["value"].get<double>() == 2.0);
}

TEST_CASE("incomplete sessions have no weights but update suggestions") {
  ElicitationService svc(":memory:");
  const std::string id = create(svc, {"A", "B", "C", "D"}, "1-5");
  const json fresh = svc.get_report(id).body;
  CHECK(fresh["complete"] == false);
  CHECK(fresh["weights"].is_null());
  CHECK(fresh["suggestions"].empty());

  svc.set_judgment(id, 0, 1, {{"value", 3}});
  svc.set_judgment(id, 1, 2, {{"value", 3}});
  const json r = svc.set_judgment(id, 0, 2, {{"value", 5}}).body;
  CHECK(r["complete"] == false);
  CHECK(r["weights"].is_null());
  CHECK(r["judged"] == 3);
  CHECK(r["pending"].size() == 3);
  REQUIRE(r["suggestions"].size() == 1);
  CHECK(std::abs(r["suggestions"][0]["value"].get<double>() - 4.0 / 9.0) <= 1e-12);
}

TEST_CASE("overwrite then restore gives a byte-identical report") {
  ElicitationService svc(":memory:");
  const std::string id = create(svc, {"A", "B", "C"}, "1-5");
  const std::string before = enter(svc, id, {3, 5, 3}).dump();
  CHECK(svc.set_judgment(id, 0, 2, {{"value", 2}}).body.dump() != before);
  CHECK(svc.set_judgment(id, 0, 2, {{"value", 5}}).body.dump() == before);
  CHECK(svc.get_report(id).body.dump() == before);
}

TEST_CASE("sessions are isolated") {
  ElicitationService svc(":memory:");
  const std::string a = create(svc, {"A", "B", "C"}, "1-3");
  const std::string b = create(svc, {"A", "B", "C"}, "1-3");
  enter(svc, a, {2, 3, 2});
  const std::string rb = svc.get_report(b).body.dump();
  enter(svc, a, {3, 3, 3});
  svc.delete_session(a);
  CHECK(svc.get_report(b).body.dump() == rb);
  CHECK(svc.get_report(a).status == 404);
  CHECK(svc.delete_session(a).status == 404);
}

TEST_CASE("sessions survive a restart") {
  TempDb db;
  std::string id, report;
  {
    ElicitationService svc(db.path.string());
    id = create(svc, {"A", "B", "C"}, "1-3");
    report = enter(svc, id, {2, 3, 2}).dump();
  }
  ElicitationService svc(db.path.string());
  const auto r = svc.get_report(id);
  CHECK(r.status == 200);
  CHECK(r.body.dump() == report);
}

TEST_CASE("concurrent writers on different sessions") {
  ElicitationService svc(":memory:");
  std::vector<std::string> ids;
  for (int k = 0; k < 8; ++k) ids.push_back(create(svc, {"A", "B", "C"}, "1-3"));
  std::vector<std::thread> th;
  std::atomic<int> failures{0};
  for (const auto& id : ids)
    th.emplace_back([&, id] {
      for (int rep = 0; rep < 5; ++rep)
        for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}})
          if (svc.set_judgment(id, i, j, {{"value", 2}}).status != 200) ++failures;
    });
  for (auto& t : th) t.join();
  CHECK(failures == 0);
  for (const auto& id : ids) CHECK(svc.get_report(id).body["complete"] == true);
}

TEST_CASE("HTTP API end to end") {
  ElicitationService svc(":memory:");
  HttpServer server(svc);
  const auto port = server.bind("127.0.0.1", 0);
  REQUIRE(port);
  std::thread loop([&] { server.listen(); });
  httplib::Client cli("127.0.0.1", *port);
  for (int k = 0; k < 100 && !cli.Get("/health"); ++k)
    std::this_thread::sleep_for(std::chrono::milliseconds(10));

  auto health = cli.Get("/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(health->body == "ok");

  auto scales = cli.Get("/scales");
  REQUIRE(scales);
  CHECK(json::parse(scales->body)["scales"].size() == 4);

  auto created = cli.Post("/sessions", R"({"alternatives":["A","B","C"],"scale":"1-3"})",
                          "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const std::string id = json::parse(created->body)["id"];

  auto bad = cli.Post("/sessions", "{not json", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);

  const std::string base = "/sessions/" + id;
  auto put = [&](int i, int j, const std::string& body) {
    auto r = cli.Put(base + "/judgments/" + std::to_string(i) + "/" + std::to_string(j), body,
                     "application/json");
    REQUIRE(r);
    return std::pair{r->status, r->body};
  };
  CHECK(put(0, 1, R"({"value": 2})").first == 200);
  CHECK(put(0, 2, R"({"value": 3})").first == 200);
  CHECK(put(0, 1, R"({"value": 7})").first == 422);
  const auto [st, last] = put(1, 2, R"({"value": "2/1"})");
  CHECK(st == 200);
  const json rep = json::parse(last);
  CHECK(std::abs(rep["inconsistency"]["global_value"].get<double>() - 0.25) <= 1e-12);

  auto report = cli.Get(base + "/report");
  REQUIRE(report);
  CHECK(report->status == 200);
  CHECK(json::parse(report->body) == rep);

  auto missing = cli.Get("/sessions/0123abcd/report");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  auto del = cli.Delete(base);
  REQUIRE(del);
  CHECK(del->status == 204);
  auto gone = cli.Get(base + "/report");
  REQUIRE(gone);
  CHECK(gone->status == 404);

  // A second server cannot take the same port.
  HttpServer other(svc);
  CHECK_FALSE(other.bind("127.0.0.1", *port));

  server.stop();
  loop.join();
}
