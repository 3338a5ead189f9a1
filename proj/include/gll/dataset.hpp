#pragma once

// Delimited text ingestion and the regression Dataset type.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gll {

/// Columns of a delimited file with a header row.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }

  const std::vector<double>& column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::invalid_argument("table: no column named '" + name + "'");
    return columns[static_cast<std::size_t>(it - header.begin())];
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"");
  return s.substr(b, e - b + 1);
}

// tab or comma; a header without either is a single column
inline char detect_delimiter(const std::string& line) {
  if (line.find('\t') == std::string::npos && line.find(',') != std::string::npos) return ',';
  return '\t';
}

inline std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, delim)) out.push_back(trim(cur));
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (*b == '+') ++b;
  const auto r = std::from_chars(b, e, out);
  return r.ec == std::errc() && r.ptr == e;
}

}  // namespace detail

/// Parse delimited text (tab or comma, detected from the header).
inline Table parse_table(std::istream& in, const std::string& source = "input") {
  Table t;
  std::string line;
  std::size_t line_no = 0;
  char delim = ',';
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty() || line[0] == '#') continue;
    if (t.header.empty()) {
      delim = detail::detect_delimiter(line);
      t.header = detail::split(line, delim);
      t.columns.assign(t.header.size(), {});
      continue;
    }
    const auto fields = detail::split(line, delim);
    if (fields.size() != t.header.size()) {
      throw std::invalid_argument(source + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(t.header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      double v;
      if (!detail::parse_double(fields[j], v) || !std::isfinite(v)) {
        throw std::invalid_argument(source + ":" + std::to_string(line_no) + ": column '" + t.header[j] +
                                    "' has missing or non-numeric value '" + fields[j] + "'");
      }
      t.columns[j].push_back(v);
    }
  }
  if (t.header.empty()) throw std::invalid_argument(source + ": no header row");
  return t;
}

inline Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  return parse_table(in, path);
}

/// Throws if any response is outside (0, 1); boundary values get a hint about the usual squeeze.
inline void check_unit_responses(const std::vector<double>& y) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double v = y[i];
    if (v == 0.0 || v == 1.0) {
      throw std::domain_error("response " + std::to_string(i) + " equals " + (v == 0.0 ? "0" : "1") +
                              "; responses must lie strictly inside (0, 1) (consider (y(n-1)+0.5)/n before fitting)");
    }
    if (!(v > 0.0 && v < 1.0)) {
      throw std::domain_error("response " + std::to_string(i) + " = " + std::to_string(v) + " is outside (0, 1)");
    }
  }
}

/// Response in (0, 1) and covariates (intercept implicit).
struct Dataset {
  std::vector<double> response;
  Eigen::MatrixXd covariates;  // n x k
  std::vector<std::string> covariate_names;

  std::size_t n() const { return response.size(); }
  std::size_t k() const { return static_cast<std::size_t>(covariates.cols()); }

  /// [1, covariates]
  Eigen::MatrixXd design() const {
    Eigen::MatrixXd d(covariates.rows(), covariates.cols() + 1);
    d.col(0).setOnes();
    d.rightCols(covariates.cols()) = covariates;
    return d;
  }
};

inline Dataset make_dataset(std::vector<double> y, Eigen::MatrixXd x, std::vector<std::string> names = {}) {
  if (y.empty()) throw std::invalid_argument("dataset: no observations");
  if (x.cols() == 0 && x.rows() == 0) x.resize(static_cast<Eigen::Index>(y.size()), 0);
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw std::invalid_argument("dataset: " + std::to_string(y.size()) + " responses but " +
                                std::to_string(x.rows()) + " covariate rows");
  }
  if (!x.allFinite()) throw std::invalid_argument("dataset: non-finite covariate");
  check_unit_responses(y);
  if (names.empty()) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
  }
  if (names.size() != static_cast<std::size_t>(x.cols())) throw std::invalid_argument("dataset: covariate name count");
  return {std::move(y), std::move(x), std::move(names)};
}

/// Select response and covariates by column name; response is scaled, then optionally complemented.
inline Dataset dataset_from_table(const Table& t, const std::string& response, const std::vector<std::string>& covariates,
                                  double response_scale = 1.0, bool complement = false) {
  std::vector<double> y = t.column(response);
  for (auto& v : y) {
    v *= response_scale;
    if (complement) v = 1.0 - v;
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(covariates.size()));
  for (std::size_t j = 0; j < covariates.size(); ++j) {
    const auto& col = t.column(covariates[j]);
    for (std::size_t i = 0; i < col.size(); ++i) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
  }
  return make_dataset(std::move(y), std::move(x), covariates);
}

}  // namespace gll
