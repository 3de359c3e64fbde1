#include "pcx/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pcx/error.hpp"

namespace pcx::io {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string where(std::size_t line, std::size_t col) {
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

struct Cell {
  double value;
  std::size_t line, col;
};

bool close(double x, double y) {
  return std::abs(x - y) <= kReciprocityTolerance * std::max(std::abs(x), std::abs(y));
}

}  // namespace

double parse_number(std::string_view text) {
  const std::string_view s = trim(text);
  double v = 0.0;
  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    double p = 0.0, q = 0.0;
    if (!parse_double(s.substr(0, slash), p) || !parse_double(s.substr(slash + 1), q)) {
      throw Error(ErrorCode::kParse, "malformed fraction '" + std::string(s) + "'");
    }
    if (q == 0.0) throw Error(ErrorCode::kParse, "zero denominator in '" + std::string(s) + "'");
    v = p / q;
  } else if (!parse_double(s, v)) {
    throw Error(ErrorCode::kParse, "malformed number '" + std::string(s) + "'");
  }
  return v;
}

PCMatrix parse_matrix_csv(std::string_view text) {
  std::vector<std::vector<Cell>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, eol - pos);
    ++line_no;
    if (!trim(line).empty()) {
      std::vector<Cell> row;
      std::size_t start = 0;
      for (;;) {
        const std::size_t comma = std::min(line.find(',', start), line.size());
        const std::string_view raw = line.substr(start, comma - start);
        std::size_t col = start + 1;
        while (col - start - 1 < raw.size() && (raw[col - start - 1] == ' ' || raw[col - start - 1] == '\t')) ++col;
        double v = 0.0;
        try {
          v = parse_number(raw);
        } catch (const Error& e) {
          throw Error(ErrorCode::kParse, where(line_no, col) + ": " + e.what());
        }
        if (!(v > 0.0) || !std::isfinite(v)) {
          throw Error(ErrorCode::kNonPositiveEntry,
                      where(line_no, col) + ": entry must be finite and strictly positive");
        }
        row.push_back({v, line_no, col});
        if (comma == line.size()) break;
        start = comma + 1;
      }
      rows.push_back(std::move(row));
    }
    if (eol == text.size()) break;
    pos = eol + 1;
  }

  const std::size_t n = rows.size();
  if (n < 2) throw Error(ErrorCode::kTooSmall, "CSV matrix needs at least 2 rows");
  for (const auto& row : rows) {
    if (row.size() != n) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "line " + std::to_string(row.front().line) + ": expected " + std::to_string(n) +
                      " entries, found " + std::to_string(row.size()));
    }
  }
  std::vector<double> upper;
  for (std::size_t i = 0; i < n; ++i) {
    const Cell& d = rows[i][i];
    if (!close(d.value, 1.0)) {
      throw Error(ErrorCode::kParse, where(d.line, d.col) + ": diagonal entry must be 1");
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const Cell& up = rows[i][j];
      const Cell& lo = rows[j][i];
      if (!close(up.value * lo.value, 1.0)) {
        std::ostringstream os;
        os.precision(17);
        os << where(lo.line, lo.col) << ": a(" << j + 1 << "," << i + 1 << ") = " << lo.value
           << " is not the reciprocal of a(" << i + 1 << "," << j + 1 << ") = " << up.value
           << " at " << where(up.line, up.col);
        throw Error(ErrorCode::kParse, os.str());
      }
      upper.push_back(up.value);
    }
  }
  return PCMatrix(n, std::move(upper));
}

PCMatrix parse_matrix_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("upper")) {
    throw Error(ErrorCode::kParse, "matrix JSON needs an object with \"n\" and \"upper\"");
  }
  if (!doc["n"].is_number_integer() || doc["n"].get<long long>() < 0) {
    throw Error(ErrorCode::kParse, "\"n\" must be a non-negative integer");
  }
  if (!doc["upper"].is_array()) throw Error(ErrorCode::kParse, "\"upper\" must be an array");
  std::vector<double> upper;
  std::size_t idx = 0;
  for (const auto& e : doc["upper"]) {
    if (e.is_number()) {
      upper.push_back(e.get<double>());
    } else if (e.is_string()) {
      try {
        upper.push_back(parse_number(e.get<std::string>()));
      } catch (const Error& err) {
        throw Error(ErrorCode::kParse, "upper[" + std::to_string(idx) + "]: " + err.what());
      }
    } else {
      throw Error(ErrorCode::kParse, "upper[" + std::to_string(idx) + "] must be a number or \"p/q\"");
    }
    ++idx;
  }
  std::vector<std::string> labels;
  if (doc.contains("labels") && !doc["labels"].is_null()) {
    if (!doc["labels"].is_array()) throw Error(ErrorCode::kParse, "\"labels\" must be an array");
    for (const auto& l : doc["labels"]) {
      if (!l.is_string()) throw Error(ErrorCode::kParse, "labels must be strings");
      labels.push_back(l.get<std::string>());
    }
  }
  return PCMatrix(doc["n"].get<std::size_t>(), std::move(upper), std::move(labels));
}

PCMatrix parse_matrix(std::string_view text) {
  const std::string_view t = trim(text);
  const auto first = t.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && t[first] == '{') return parse_matrix_json(text);
  return parse_matrix_csv(text);
}

PCMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParse, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_matrix(ss.str());
}

json to_json(const PCMatrix& a) {
  json j = {{"n", a.size()}, {"upper", std::vector<double>(a.upper().begin(), a.upper().end())}};
  if (!a.labels().empty()) j["labels"] = a.labels();
  return j;
}

json to_json(const TriadReport& t) {
  return {{"i", t.i},       {"k", t.k},       {"j", t.j},        {"a_ik", t.a_ik},
          {"a_kj", t.a_kj}, {"a_ij", t.a_ij}, {"value", t.value}};
}

json to_json(const InconsistencyReport& r) {
  json j = {{"global_value", r.global_value},
            {"acceptable", r.acceptable},
            {"worst", r.worst ? to_json(*r.worst) : json(nullptr)}};
  if (!r.all_triads.empty()) {
    json all = json::array();
    for (const auto& t : r.all_triads) all.push_back(to_json(t));
    j["all_triads"] = std::move(all);
  }
  return j;
}

json to_json(const convexity::ConvexityReport& r) {
  json v = json::array();
  for (const auto& x : r.violations) v.push_back({{"i", x.i}, {"j", x.j}, {"value", x.value}});
  return {{"a0", convexity::constants().a0},
          {"max_entry", r.max_entry},
          {"admissible", r.admissible},
          {"verdict", convexity::to_string(r.verdict)},
          {"violations", std::move(v)}};
}

json to_json(const SolveResult& r) {
  const auto sum = r.weights.values();
  const WeightVector prod = r.product_one();
  json minima = json::array();
  for (const auto& m : r.minima_found) {
    minima.push_back({{"t", std::vector<double>(m.point.t().begin(), m.point.t().end())},
                      {"objective", m.objective}});
  }
  json j = {{"method", to_string(r.method)},
            {"weights_sum_one", std::vector<double>(sum.begin(), sum.end())},
            {"weights_product_one", std::vector<double>(prod.values().begin(), prod.values().end())},
            {"objective", r.objective},
            {"method_objective", r.method_objective},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"unique", r.unique},
            {"starts", r.starts},
            {"failed_starts", r.failed_starts},
            {"minima", std::move(minima)},
            {"warnings", r.warnings}};
  if (r.eigenvalue) j["eigenvalue"] = *r.eigenvalue;
  return j;
}

}  // namespace pcx::io
