#pragma once

// Matrix file formats and JSON encodings of the report types.
//
// CSV:  n lines of n comma-separated entries; each entry is a decimal or a
//       fraction "p/q". The full matrix is required and must be reciprocal
//       (a_ji = 1/a_ij) and have a unit diagonal within 1e-9 relative.
// JSON: {"n": 3, "upper": [3, 5, 3], "labels": ["A", "B", "C"]}; "labels"
//       is optional and "upper" entries may be numbers or "p/q" strings.

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <string_view>

#include "pcx/convexity.hpp"
#include "pcx/pcm.hpp"
#include "pcx/solvers.hpp"

namespace pcx::io {

inline constexpr double kReciprocityTolerance = 1e-9;

/// Decimal or "p/q". Throws Error{kParse}.
double parse_number(std::string_view text);

/// Throws Error{kParse} with "line L, column C" in the message, or the
/// PCMatrix construction errors.
PCMatrix parse_matrix_csv(std::string_view text);
PCMatrix parse_matrix_json(std::string_view text);
/// Detects the format from the first non-blank character ('{' means JSON).
PCMatrix parse_matrix(std::string_view text);
PCMatrix load_matrix(const std::filesystem::path& path);

nlohmann::json to_json(const PCMatrix& a);
nlohmann::json to_json(const TriadReport& t);
nlohmann::json to_json(const InconsistencyReport& r);
nlohmann::json to_json(const convexity::ConvexityReport& r);
nlohmann::json to_json(const SolveResult& r);

}  // namespace pcx::io
