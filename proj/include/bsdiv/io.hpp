#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "dependence.hpp"
#include "distribution.hpp"
#include "errors.hpp"

namespace bsdiv::io {

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline bool is_number(const std::string& s) {
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return !s.empty() && end == s.c_str() + s.size();
}

}  // namespace detail

// Numeric CSV rows. Blank lines and '#' comments are skipped, as is a non-numeric first row.
inline std::vector<std::vector<double>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(detail::trim(cell));
    bool numeric = std::all_of(cells.begin(), cells.end(), detail::is_number);
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw ConfigError(path + ":" + std::to_string(lineno) + ": non-numeric field");
    }
    first = false;
    std::vector<double> r;
    for (auto& c : cells) r.push_back(std::strtod(c.c_str(), nullptr));
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ConfigError("'" + path + "' holds no data rows");
  return rows;
}

inline std::vector<std::vector<double>> require_columns(const std::string& path, std::size_t n) {
  auto rows = read_csv(path);
  for (auto& r : rows)
    if (r.size() != n) throw ConfigError("'" + path + "' must have " + std::to_string(n) + " column(s) per row");
  return rows;
}

inline std::vector<double> read_samples(const std::string& path) {
  std::vector<double> v;
  for (auto& r : require_columns(path, 1)) v.push_back(r[0]);
  return v;
}

// "value,weight" rows.
inline DiscreteDistribution read_pmf(const std::string& path) {
  std::vector<double> s, w;
  for (auto& r : require_columns(path, 2)) {
    s.push_back(r[0]);
    w.push_back(r[1]);
  }
  return DiscreteDistribution(std::move(s), std::move(w));
}

// "row,col,mass" rows.
inline JointDiscrete read_joint(const std::string& path) {
  std::vector<std::tuple<double, double, double>> t;
  for (auto& r : require_columns(path, 3)) t.emplace_back(r[0], r[1], r[2]);
  return JointDiscrete::from_triples(t);
}

inline std::vector<std::vector<double>> read_matrix(const std::string& path) { return read_csv(path); }

// An existing file is read as a pmf (two columns) or a sample (one column); anything else is a family spec.
inline Distribution load_distribution(const std::string& spec) {
  if (std::filesystem::exists(spec)) {
    auto rows = read_csv(spec);
    if (rows.front().size() == 2) return read_pmf(spec);
    if (rows.front().size() == 1) return DiscreteDistribution::empirical(read_samples(spec));
    throw ConfigError("'" + spec + "' must have one or two columns");
  }
  return NamedFamily::parse(spec);
}

}  // namespace bsdiv::io
