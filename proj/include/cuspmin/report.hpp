#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cuspmin/errors.hpp"

namespace cuspmin {

/// Where a check's expected value comes from.
enum class Provenance {
  formula,   ///< closed-form statement evaluated directly
  oracle,    ///< independent numerical oracle
  exact,     ///< combinatorial or definitional identity
  recorded,  ///< measured and recorded, bound chosen from runs
};

enum class Comparison { near, at_most, at_least };

struct Check {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;   ///< target value or bound
  double tolerance = 0.0;
  Comparison comparison = Comparison::near;
  Provenance provenance = Provenance::formula;
  bool pass = false;
};

inline Check check_near(std::string name, double measured, double expected, double tol, Provenance p) {
  return {std::move(name), measured, expected, tol, Comparison::near, p, std::abs(measured - expected) <= tol};
}

inline Check check_at_most(std::string name, double measured, double bound, double tol, Provenance p) {
  return {std::move(name), measured, bound, tol, Comparison::at_most, p, measured <= bound + tol};
}

inline Check check_at_least(std::string name, double measured, double bound, double tol, Provenance p) {
  return {std::move(name), measured, bound, tol, Comparison::at_least, p, measured >= bound - tol};
}

inline Check check_true(std::string name, bool ok, Provenance p) {
  return {std::move(name), ok ? 1.0 : 0.0, 1.0, 0.0, Comparison::near, p, ok};
}

inline std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::formula: return "formula";
    case Provenance::oracle: return "oracle";
    case Provenance::exact: return "exact";
    case Provenance::recorded: return "recorded";
  }
  return "formula";
}

inline std::string to_string(Comparison c) {
  switch (c) {
    case Comparison::near: return "near";
    case Comparison::at_most: return "at_most";
    case Comparison::at_least: return "at_least";
  }
  return "near";
}

/// NaN and infinities have no JSON encoding; they are written as strings.
inline nlohmann::json number_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline nlohmann::json check_json(const Check& c) {
  return {{"name", c.name},
          {"measured", number_json(c.measured)},
          {"expected", number_json(c.expected)},
          {"tolerance", number_json(c.tolerance)},
          {"comparison", to_string(c.comparison)},
          {"provenance", to_string(c.provenance)},
          {"pass", c.pass}};
}

struct RunReport {
  std::string experiment;
  nlohmann::json config;
  std::vector<Check> checks;
  nlohmann::json results = nlohmann::json::object();
  std::vector<std::string> artifacts;
  double seconds = 0.0;

  bool passed() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }

  void add(Check c) { checks.push_back(std::move(c)); }
};

/// With a fixed clock the timing is written as 0 so identical runs give identical bytes.
inline nlohmann::json report_json(const RunReport& r, bool fixed_clock) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back(check_json(c));
  return {{"schema", "cuspmin.report/1"},
          {"experiment", r.experiment},
          {"config", r.config},
          {"checks", checks},
          {"results", r.results},
          {"artifacts", r.artifacts},
          {"seconds", fixed_clock ? 0.0 : r.seconds},
          {"pass", r.passed()}};
}

// ---------------------------------------------------------------------------
// CSV series

struct Series {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void emit_csv(const Series& s, const std::filesystem::path& path) {
  for (const auto& row : s.rows) {
    if (row.size() != s.columns.size()) throw ArgumentError("series is not rectangular");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (std::size_t i = 0; i < s.columns.size(); ++i) out << (i ? "," : "") << s.columns[i];
  out << '\n';
  for (const auto& row : s.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace cuspmin
