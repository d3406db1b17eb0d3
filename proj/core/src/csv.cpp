#include "toruskit/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace toruskit::csv {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_series(const std::string& path, const ObservableSeries& series) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_series: cannot open " + path);
  const Eigen::Index D = series.dim();
  out << "t";
  for (Eigen::Index j = 0; j < D; ++j) out << ",h" << (j + 1);
  out << "\n";
  for (Eigen::Index t = 0; t < series.length(); ++t) {
    out << t;
    for (Eigen::Index j = 0; j < D; ++j)
      out << "," << format_double(series.data(t, j));
    out << "\n";
  }
  if (!out) throw std::runtime_error("write_series: write failed for " + path);
}

ObservableSeries read_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_series: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("read_series: empty file " + path);

  Eigen::Index D = 0;
  {
    std::stringstream header(line);
    std::string field;
    if (!std::getline(header, field, ',') || field != "t")
      throw std::runtime_error("read_series: expected header starting with 't'");
    while (std::getline(header, field, ',')) ++D;
    if (D < 1) throw std::runtime_error("read_series: no observable columns");
  }

  std::vector<double> values;
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    if (!std::getline(ss, field, ','))
      throw std::runtime_error("read_series: malformed row");
    if (std::stoll(field) != rows)
      throw std::runtime_error("read_series: t column must run 0..N-1");
    for (Eigen::Index j = 0; j < D; ++j) {
      if (!std::getline(ss, field, ','))
        throw std::runtime_error("read_series: short row");
      values.push_back(std::stod(field));
    }
    ++rows;
  }

  ObservableSeries series;
  series.data = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic,
                                               Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), rows, D);
  series.source = "external";
  return series;
}

}  // namespace toruskit::csv
