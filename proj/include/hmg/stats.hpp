#pragma once

// Small statistics and reporting helpers shared by the experiment harness:
// moment summaries, total-variation distance, log-log regression slopes, and
// a CSV table with locale-independent, byte-stable number formatting.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hmg/errors.hpp"

namespace hmg {

struct SummaryStats {
  long long count = 0;
  double mean = 0.0;
  double variance = 0.0;   // unbiased sample variance (0 for a single point)
  double std_error = 0.0;  // sqrt(variance / count)
  double min = 0.0, max = 0.0;
};

inline SummaryStats summarize(const std::vector<double>& xs) {
  if (xs.empty()) throw ConfigError("summarize: empty sample");
  SummaryStats s;
  s.count = static_cast<long long>(xs.size());
  s.min = *std::min_element(xs.begin(), xs.end());
  s.max = *std::max_element(xs.begin(), xs.end());
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.variance = ss / static_cast<double>(s.count - 1);
    s.std_error = std::sqrt(s.variance / static_cast<double>(s.count));
  }
  return s;
}

// Total variation distance between two sub-probability vectors given as maps;
// missing keys count as mass zero.
template <typename K>
double tv_distance(const std::map<K, double>& a, const std::map<K, double>& b) {
  double sum = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      sum += std::abs(ia->second);
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      sum += std::abs(ib->second);
      ++ib;
    } else {
      sum += std::abs(ia->second - ib->second);
      ++ia;
      ++ib;
    }
  }
  return 0.5 * sum;
}

// Normalized frequency table from integer counts.
template <typename K>
std::map<K, double> frequencies(const std::map<K, long long>& counts) {
  long long total = 0;
  for (const auto& [k, c] : counts) total += c;
  std::map<K, double> out;
  if (total == 0) return out;
  for (const auto& [k, c] : counts) out[k] = static_cast<double>(c) / static_cast<double>(total);
  return out;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Least-squares line through the given points.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ConfigError("fit_line: need two equal-length samples of size >= 2");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ConfigError("fit_line: degenerate abscissae");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

// Slope of log(y) against log(x); requires strictly positive data.
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0)
      throw ConfigError("log_log_slope: data must be strictly positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return fit_line(lx, ly).slope;
}

// --- CSV ---------------------------------------------------------------------

// Shortest round-trip decimal for a double; integral values print without an
// exponent or trailing zeros, so the same numbers always give the same bytes.
inline std::string csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  for (int precision = 1; precision < 17; ++precision) {
    char probe[64];
    std::snprintf(probe, sizeof(probe), "%.*g", precision, v);
    if (std::strtod(probe, nullptr) == v) return probe;
  }
  return buf;
}

inline std::string csv_number(long long v) { return std::to_string(v); }

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// In-memory CSV table: fixed header, rows of preformatted cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  explicit CsvTable(std::vector<std::string> columns) : header(std::move(columns)) {
    if (header.empty()) throw ConfigError("CsvTable: need at least one column");
  }

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != header.size())
      throw ConfigError("CsvTable: row width " + std::to_string(cells.size()) +
                        " != header width " + std::to_string(header.size()));
    rows.push_back(std::move(cells));
  }

  void write(std::ostream& os) const {
    auto write_row = [&os](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        os << csv_escape(cells[i]);
      }
      os << '\n';
    };
    write_row(header);
    for (const auto& row : rows) write_row(row);
  }

  std::string to_string() const;
};

inline std::string CsvTable::to_string() const {
  std::ostringstream oss;
  write(oss);
  return oss.str();
}

}  // namespace hmg
