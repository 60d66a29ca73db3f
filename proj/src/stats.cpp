#include "tabula/stats.hpp"

#include <algorithm>
#include <cmath>

namespace tabula {

namespace {

std::vector<double> non_missing_numeric(const Series& s) {
  std::vector<double> out;
  out.reserve(s.values.size());
  for (const auto& v : s.values)
    if (!v.is_missing()) out.push_back(v.as_double());
  return out;
}

void check_window(std::size_t window, std::size_t n) {
  if (window < 1 || window > n)
    throw ArgumentError("window " + std::to_string(window) +
                        " out of range for series of length " +
                        std::to_string(n));
}

}  // namespace

double quantile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const double h = static_cast<double>(n - 1) * p;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return values[n - 1];
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

DescriptiveSummary describe(const Series& s) {
  const auto v = non_missing_numeric(s);
  if (v.empty())
    throw DomainError("describe of \"" + s.name + "\": no values");

  DescriptiveSummary d;
  d.count = v.size();
  double sum = 0;
  for (double x : v) sum += x;
  d.mean = sum / static_cast<double>(v.size());
  if (v.size() == 1) {
    d.std_dev = 0;
  } else {
    double ss = 0;
    for (double x : v) ss += (x - d.mean) * (x - d.mean);
    d.std_dev = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  d.min = quantile(v, 0.0);
  d.q25 = quantile(v, 0.25);
  d.median = quantile(v, 0.5);
  d.q75 = quantile(v, 0.75);
  d.max = quantile(v, 1.0);
  return d;
}

std::vector<double> moving_average(const std::vector<double>& v,
                                   std::size_t window) {
  check_window(window, v.size());
  std::vector<double> out;
  out.reserve(v.size() - window + 1);
  double sum = 0;
  for (std::size_t i = 0; i < window; ++i) sum += v[i];
  out.push_back(sum / static_cast<double>(window));
  for (std::size_t i = window; i < v.size(); ++i) {
    sum += v[i] - v[i - window];
    out.push_back(sum / static_cast<double>(window));
  }
  return out;
}

Series moving_average(const Series& s, std::size_t window) {
  const auto v = s.numeric_values();
  const auto out = moving_average(v, window);
  std::vector<CellValue> labels(s.index.begin() +
                                    static_cast<std::ptrdiff_t>(window - 1),
                                s.index.end());
  return Series::from_doubles(s.name + "_ma", out, std::move(labels));
}

std::vector<double> centered_moving_average(const std::vector<double>& v,
                                            std::size_t window) {
  check_window(window, v.size());
  if (window % 2 == 1) return moving_average(v, window);
  // 2xw: half weight on the two endpoints of a (window+1)-wide span.
  if (v.size() < window + 1)
    throw ArgumentError("even window " + std::to_string(window) +
                        " needs at least " + std::to_string(window + 1) +
                        " values, got " + std::to_string(v.size()));
  std::vector<double> out;
  out.reserve(v.size() - window);
  for (std::size_t i = 0; i + window < v.size(); ++i) {
    double sum = 0.5 * v[i] + 0.5 * v[i + window];
    for (std::size_t k = 1; k < window; ++k) sum += v[i + k];
    out.push_back(sum / static_cast<double>(window));
  }
  return out;
}

Series centered_moving_average(const Series& s, std::size_t window) {
  const auto v = s.numeric_values();
  const auto out = centered_moving_average(v, window);
  // Label each output at its center: offset (window-1)/2 for odd windows,
  // window/2 for even ones.
  const std::size_t offset = window % 2 == 1 ? (window - 1) / 2 : window / 2;
  std::vector<CellValue> labels;
  labels.reserve(out.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    labels.push_back(s.index[i + offset]);
  return Series::from_doubles(s.name + "_cma", out, std::move(labels));
}

}  // namespace tabula
