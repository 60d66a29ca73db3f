#pragma once

#include <cstddef>
#include <vector>

#include "tabula/frame.hpp"

namespace tabula {

struct DescriptiveSummary {
  std::size_t count = 0;
  double mean = 0;
  double std_dev = 0;
  double min = 0;
  double q25 = 0;
  double median = 0;
  double q75 = 0;
  double max = 0;
};

/// Moments and quantiles over the non-missing values of a numeric series.
/// Quantiles use linear interpolation between closest ranks; std uses the
/// n-1 denominator (0 when a single value remains). Empty or all-missing
/// input raises DomainError.
DescriptiveSummary describe(const Series& s);

/// Quantile by linear interpolation, p in [0,1]; sorts a copy.
double quantile(std::vector<double> values, double p);

/// Trailing moving average; output element i is the mean of window
/// [i, i+window) and the output shrinks to len-window+1 elements. Labels
/// come from the last element of each window. The series must be numeric
/// and free of Missing.
Series moving_average(const Series& s, std::size_t window);
std::vector<double> moving_average(const std::vector<double>& v,
                                   std::size_t window);

/// Centered moving average. Odd windows take the symmetric mean of radius
/// (window-1)/2 (length shrinks by window-1); even windows use the 2xw
/// convention, i.e. the mean of two adjacent w-windows with half weights
/// at the ends (length shrinks by window).
Series centered_moving_average(const Series& s, std::size_t window);
std::vector<double> centered_moving_average(const std::vector<double>& v,
                                            std::size_t window);

}  // namespace tabula
