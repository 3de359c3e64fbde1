#include <cmath>
#include <string>

#include "doctest.h"
#include "pcx/error.hpp"
#include "pcx/io.hpp"
#include "test_support.hpp"

using namespace pcx;

namespace {

std::string message_of(std::string_view text, ErrorCode expected) {
  try {
    io::parse_matrix(text);
  } catch (const Error& e) {
    CHECK(e.code() == expected);
    return e.what();
  }
  FAIL("expected a parse error");
  return {};
}

}  // namespace

TEST_CASE("parse_number") {
  CHECK(io::parse_number("3") == 3.0);
  CHECK(io::parse_number(" 0.25 ") == 0.25);
  CHECK(io::parse_number("1/3") == 1.0 / 3.0);
  CHECK(io::parse_number("2.5e1") == 25.0);
  CHECK_THROWS_AS(io::parse_number("abc"), Error);
  CHECK_THROWS_AS(io::parse_number("1/0"), Error);
  CHECK_THROWS_AS(io::parse_number("1/"), Error);
  CHECK_THROWS_AS(io::parse_number(""), Error);
}

TEST_CASE("CSV matrices") {
  const PCMatrix a = io::parse_matrix("1,2,3\n1/2,1,2\n1/3,1/2,1\n");
  CHECK(a.size() == 3);
  CHECK(a(0, 1) == 2.0);
  CHECK(a(0, 2) == 3.0);
  CHECK(a(1, 2) == 2.0);
  CHECK(io::parse_matrix("1, 0.5\n2, 1\n\n") == build_matrix(2, {0.5}));

  // Decimal approximations of reciprocals within 1e-9 are accepted.
  CHECK_NOTHROW(io::parse_matrix("1,3\n0.3333333333,1\n"));

  const std::string m1 = message_of("1,2,3\n1/2,1,2\n1/3,0.6,1\n", ErrorCode::kParse);
  CHECK(m1.find("line 3, column") != std::string::npos);
  CHECK(m1.find("a(3,2)") != std::string::npos);

  const std::string m2 = message_of("1,2\n1/2,x\n", ErrorCode::kParse);
  CHECK(m2.find("line 2, column") != std::string::npos);

  message_of("1,2,3\n1/2,1\n1/3,1/2,1\n", ErrorCode::kDimensionMismatch);
  message_of("2,2\n1/2,1\n", ErrorCode::kParse);
  message_of("1,-2\n-1/2,1\n", ErrorCode::kNonPositiveEntry);
  message_of("1\n", ErrorCode::kTooSmall);
}

TEST_CASE("JSON matrices") {
  const PCMatrix a = io::parse_matrix(R"({"n": 3, "upper": [3, 5, "3/1"], "labels": ["A","B","C"]})");
  CHECK(a == build_matrix(3, {3, 5, 3}, {"A", "B", "C"}));
  CHECK(io::parse_matrix(R"(  {"n":2,"upper":["1/4"]})")(0, 1) == 0.25);
  message_of(R"({"n": 3, "upper": [3, 5]})", ErrorCode::kDimensionMismatch);
  message_of(R"({"n": 3, "upper": [3, 0, 3]})", ErrorCode::kNonPositiveEntry);
  message_of(R"({"n": 3, "upper": [3, "x", 3]})", ErrorCode::kParse);
  message_of(R"({"upper": [3]})", ErrorCode::kParse);
  message_of(R"({"n": 2,)", ErrorCode::kParse);
}

TEST_CASE("JSON round trip of matrices") {
  auto gen = test::rng(50);
  for (int trial = 0; trial < 50; ++trial) {
    const PCMatrix a = test::random_matrix(gen, 2 + static_cast<std::size_t>(trial % 6), 9.0);
    CHECK(io::parse_matrix(io::to_json(a).dump()) == a);
  }
}

TEST_CASE("report encodings") {
  const PCMatrix a = build_matrix(3, {3, 5, 3});
  const auto inc = io::to_json(inconsistency(a, true));
  CHECK(std::abs(inc["global_value"].get<double>() - 4.0 / 9.0) <= 1e-12);
  CHECK(inc["acceptable"] == false);
  CHECK(inc["worst"]["i"] == 0);
  CHECK(inc["all_triads"].size() == 1);

  const auto cert = io::to_json(convexity::certify(a));
  CHECK(cert["verdict"] == "UNKNOWN");
  CHECK(cert["violations"].size() == 1);

  const auto sol = io::to_json(solve_llsm(a));
  CHECK(sol["method"] == "llsm");
  CHECK(sol["weights_sum_one"].size() == 3);
  CHECK(sol["weights_product_one"].size() == 3);
  CHECK_FALSE(sol.contains("eigenvalue"));
  CHECK(io::to_json(solve_evm(a)).contains("eigenvalue"));
  CHECK(io::to_json(inconsistency(build_matrix(2, {4})))["worst"].is_null());
}
