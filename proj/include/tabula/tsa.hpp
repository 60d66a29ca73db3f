#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tabula/frame.hpp"
#include "tabula/linalg.hpp"

namespace tabula {

/// Lagged embedding: frame with columns "t-L" .. "t-1", "t" where row i
/// holds s[i .. i+L]. RowCount is len(s) - L.
Frame embed(const Series& s, std::size_t lag);

/// One (sigma, u, v) component of the trajectory matrix SVD.
struct Eigentriple {
  double sigma = 0;
  std::vector<double> u;  // length L
  std::vector<double> v;  // length K
  bool negligible = false;  // sigma <= 1e-12 * sigma_0
};

/// Singular spectrum analysis model: the L x K Hankel trajectory matrix
/// of a series and its SVD, split into eigentriples.
struct SsaModel {
  std::size_t series_length = 0;  // N
  std::size_t window = 0;         // L, with K = N - L + 1
  Matrix trajectory;
  SvdResult svd;
  std::vector<Eigentriple> eigentriples;
  std::vector<CellValue> index;  // source labels, for reconstruction output
  std::string name;

  std::size_t k() const noexcept { return series_length - window + 1; }
};

/// Embed + SVD. Window defaults to floor(N/2) when omitted.
SsaModel ssa_decompose(const Series& s, std::optional<std::size_t> window = {});

/// Sum each group's rank-1 matrices and diagonal-average back to one
/// series per group. Groups must be disjoint; an empty group gives zeros.
std::vector<Series> ssa_reconstruct(
    const SsaModel& model, const std::vector<std::vector<std::size_t>>& groups);

/// Recurrent SSA forecasting: derives the linear recurrence from the
/// group's U vectors and extends the group's reconstruction by `horizon`
/// values (only the new values are returned).
Series ssa_forecast(const SsaModel& model, const std::vector<std::size_t>& group,
                    std::size_t horizon);

/// Locally weighted regression. For each evaluation point, fits a
/// polynomial of the given degree to the span_q nearest x-neighbors under
/// tricube distance weights times the caller's robustness weights, and
/// evaluates it there. x must be strictly increasing. When every weight in
/// a neighborhood vanishes the fit falls back to the neighborhood mean.
std::vector<double> loess_smooth(const std::vector<double>& x,
                                 const std::vector<double>& y,
                                 const std::vector<double>& weights,
                                 std::size_t span_q, int degree,
                                 const std::vector<double>& eval_at);

struct StlParams {
  std::size_t period = 0;                     // n_p >= 2
  std::size_t seasonal_smoother = 7;          // n_s, odd, >= 7
  std::optional<std::size_t> trend_smoother;  // n_t, odd; default from n_p, n_s
  std::optional<std::size_t> lowpass_smoother;  // n_l, odd; default >= n_p
  std::size_t inner_iterations = 2;
  std::optional<std::size_t> outer_iterations;  // default 0, or 10 if robust
  bool robust = false;

  std::size_t trend_default() const;
  std::size_t lowpass_default() const;
  std::size_t outer_default() const { return robust ? 10 : 0; }
};

struct StlResult {
  Series trend;
  Series seasonal;
  Series remainder;
  std::size_t period = 0;
  bool robust = false;
  std::vector<double> robustness_weights;  // final outer-loop weights
};

/// Seasonal-trend decomposition by loess: the standard two-loop procedure
/// (cycle-subseries smoothing, low-pass filtering, trend smoothing; outer
/// bisquare reweighting when robust). remainder = input - trend - seasonal
/// holds exactly by construction.
StlResult stl_decompose(const Series& s, const StlParams& params);

/// Plot-ready table: label, observed, then one column per component.
Frame decomposition_to_frame(const Series& input, const StlResult& result);
Frame decomposition_to_frame(const Series& input,
                             const std::vector<Series>& components);

}  // namespace tabula
