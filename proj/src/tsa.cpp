#include "tabula/tsa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tabula/stats.hpp"

namespace tabula {

namespace {

constexpr double kNegligibleRatio = 1e-12;

std::vector<double> iota_positions(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i);
  return x;
}

double median_abs(std::vector<double> v) {
  for (double& x : v) x = std::abs(x);
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return 0;
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// Weighted least squares of degree <= 2 in coordinates centered on the
// evaluation point; returns the fitted value there (the intercept).
// Falls back to the weighted mean when the normal matrix is singular.
double wls_at_zero(const std::vector<double>& dx, const std::vector<double>& y,
                   const std::vector<double>& w, int degree) {
  const std::size_t n = dx.size();
  double sw = 0, swy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    swy += w[i] * y[i];
  }
  if (sw <= 0) {  // all weights vanished: plain neighborhood mean
    double s = 0;
    for (double v : y) s += v;
    return s / static_cast<double>(n);
  }
  if (degree == 0) return swy / sw;

  if (degree == 1) {
    double sx = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sx += w[i] * dx[i];
      sxx += w[i] * dx[i] * dx[i];
      sxy += w[i] * dx[i] * y[i];
    }
    const double det = sw * sxx - sx * sx;
    const double scale = sw * sxx + sx * sx;
    if (std::abs(det) <= 1e-12 * std::max(scale, 1e-300)) return swy / sw;
    // intercept of the centered fit
    return (sxx * swy - sx * sxy) / det;
  }

  // degree 2: solve the 3x3 normal equations by Gaussian elimination.
  double m[3][4] = {};
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = dx[i], x2 = dx[i] * dx[i];
    const double basis[3] = {1.0, x1, x2};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m[r][c] += w[i] * basis[r] * basis[c];
      m[r][3] += w[i] * basis[r] * y[i];
    }
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) <= 1e-12 * std::max(1.0, std::abs(m[0][0])))
      return swy / sw;  // singular local fit
    std::swap(m[piv], m[col]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return m[0][3] / m[0][0];
}

std::vector<double> bisquare_weights(const std::vector<double>& residual) {
  const double h = 6.0 * median_abs(residual);
  std::vector<double> w(residual.size(), 1.0);
  if (h <= 0) return w;  // perfect fit keeps unit weights
  for (std::size_t i = 0; i < residual.size(); ++i) {
    const double u = std::abs(residual[i]) / h;
    w[i] = u < 1.0 ? (1 - u * u) * (1 - u * u) : 0.0;
  }
  return w;
}

std::size_t smallest_odd_at_least(double v) {
  auto n = static_cast<std::size_t>(std::ceil(v));
  if (n < 3) n = 3;
  if (n % 2 == 0) ++n;
  return n;
}

void check_odd_smoother(const char* name, std::size_t v, std::size_t floor) {
  if (v < floor || v % 2 == 0)
    throw ArgumentError(std::string(name) + " must be odd and at least " +
                        std::to_string(floor) + ", got " + std::to_string(v));
}

}  // namespace

Frame embed(const Series& s, std::size_t lag) {
  const auto v = s.numeric_values();
  const std::size_t n = v.size();
  if (lag < 1 || lag >= n)
    throw ArgumentError("lag " + std::to_string(lag) +
                        " out of range for series of length " +
                        std::to_string(n));
  std::vector<std::string> names;
  names.reserve(lag + 1);
  for (std::size_t j = lag; j >= 1; --j) names.push_back("t-" + std::to_string(j));
  names.push_back("t");

  const std::size_t rows = n - lag;
  std::vector<std::vector<CellValue>> data(lag + 1);
  for (std::size_t c = 0; c <= lag; ++c) {
    data[c].reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) data[c].emplace_back(v[r + c]);
  }
  return Frame::from_columns(std::move(names),
                             std::vector<ColType>(lag + 1, ColType::DD),
                             std::move(data), default_index(rows));
}

std::vector<double> loess_smooth(const std::vector<double>& x,
                                 const std::vector<double>& y,
                                 const std::vector<double>& weights,
                                 std::size_t span_q, int degree,
                                 const std::vector<double>& eval_at) {
  const std::size_t n = x.size();
  if (y.size() != n || weights.size() != n)
    throw DimensionError("loess: x/y/weights lengths differ");
  if (degree < 0 || degree > 2)
    throw ArgumentError("loess degree must be 0, 1 or 2");
  if (span_q < static_cast<std::size_t>(degree) + 1)
    throw ArgumentError("loess span " + std::to_string(span_q) +
                        " too small for degree " + std::to_string(degree));
  if (n == 0) throw ArgumentError("loess needs at least one point");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x[i] > x[i - 1]))
      throw ArgumentError("loess x positions must be strictly increasing");

  const std::size_t k = std::min(span_q, n);
  std::vector<double> out;
  out.reserve(eval_at.size());
  std::vector<double> dx(k), wy(k), wk(k);

  for (const double e : eval_at) {
    // Nearest k consecutive points (x is sorted).
    std::size_t lo = 0;
    if (k < n) {
      // First point of the best window: advance while the next window is
      // strictly closer.
      auto it = std::lower_bound(x.begin(), x.end(), e);
      std::size_t hint = static_cast<std::size_t>(it - x.begin());
      lo = hint > k ? hint - k : 0;
      const std::size_t lo_max = n - k;
      while (lo < lo_max &&
             std::abs(x[lo + k] - e) < std::abs(x[lo] - e))
        ++lo;
    }
    double d_max = std::max(std::abs(x[lo] - e), std::abs(x[lo + k - 1] - e));
    if (span_q > n)
      d_max *= static_cast<double>(span_q) / static_cast<double>(n);

    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = lo + i;
      dx[i] = x[j] - e;
      wy[i] = y[j];
      double tri;
      if (d_max <= 0) {
        tri = 1.0;
      } else {
        const double u = std::abs(dx[i]) / d_max;
        tri = u < 1.0 ? std::pow(1.0 - u * u * u, 3) : 0.0;
      }
      wk[i] = tri * weights[j];
    }
    out.push_back(wls_at_zero(dx, wy, wk, degree));
  }
  return out;
}

SsaModel ssa_decompose(const Series& s, std::optional<std::size_t> window) {
  const auto v = s.numeric_values();
  const std::size_t n = v.size();
  if (n < 3)
    throw ArgumentError("ssa needs a series of at least 3 values, got " +
                        std::to_string(n));
  const std::size_t L = window.value_or(n / 2);
  if (L < 2 || L > n - 1)
    throw ArgumentError("ssa window " + std::to_string(L) +
                        " out of range [2, " + std::to_string(n - 1) + "]");
  const std::size_t K = n - L + 1;

  Matrix traj(L, K);
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = 0; j < K; ++j) traj(i, j) = v[i + j];

  SsaModel model;
  model.series_length = n;
  model.window = L;
  model.svd = svd(traj);
  model.trajectory = std::move(traj);
  model.index = s.index;
  model.name = s.name;

  const std::size_t r = model.svd.s.size();
  const double sigma0 = r > 0 ? model.svd.s.front() : 0.0;
  model.eigentriples.reserve(r);
  for (std::size_t t = 0; t < r; ++t) {
    Eigentriple et;
    et.sigma = model.svd.s[t];
    et.u.resize(L);
    for (std::size_t i = 0; i < L; ++i) et.u[i] = model.svd.u(i, t);
    et.v.resize(K);
    for (std::size_t j = 0; j < K; ++j) et.v[j] = model.svd.vt(t, j);
    et.negligible = et.sigma <= kNegligibleRatio * sigma0;
    model.eigentriples.push_back(std::move(et));
  }
  return model;
}

namespace {

void check_groups(const SsaModel& model,
                  const std::vector<std::vector<std::size_t>>& groups) {
  std::vector<bool> used(model.eigentriples.size(), false);
  for (const auto& g : groups)
    for (auto i : g) {
      if (i >= model.eigentriples.size())
        throw ArgumentError("eigentriple index " + std::to_string(i) +
                            " out of range (" +
                            std::to_string(model.eigentriples.size()) + ")");
      if (used[i])
        throw ArgumentError("eigentriple index " + std::to_string(i) +
                            " appears in more than one group");
      used[i] = true;
    }
}

// Diagonal averaging of the rank-1 sum of one group.
std::vector<double> hankelize_group(const SsaModel& model,
                                    const std::vector<std::size_t>& group) {
  const std::size_t L = model.window;
  const std::size_t K = model.k();
  const std::size_t n = model.series_length;
  std::vector<double> sum(n, 0.0);
  std::vector<double> cnt(n, 0.0);
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = 0; j < K; ++j) cnt[i + j] += 1.0;
  for (auto t : group) {
    const auto& et = model.eigentriples[t];
    for (std::size_t i = 0; i < L; ++i) {
      const double ui = et.sigma * et.u[i];
      for (std::size_t j = 0; j < K; ++j) sum[i + j] += ui * et.v[j];
    }
  }
  for (std::size_t t = 0; t < n; ++t) sum[t] /= cnt[t];
  return sum;
}

}  // namespace

std::vector<Series> ssa_reconstruct(
    const SsaModel& model,
    const std::vector<std::vector<std::size_t>>& groups) {
  check_groups(model, groups);
  std::vector<Series> out;
  out.reserve(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g)
    out.push_back(Series::from_doubles("group_" + std::to_string(g),
                                       hankelize_group(model, groups[g]),
                                       model.index));
  return out;
}

Series ssa_forecast(const SsaModel& model, const std::vector<std::size_t>& group,
                    std::size_t horizon) {
  check_groups(model, {group});
  if (horizon < 1) throw ArgumentError("forecast horizon must be at least 1");
  const std::size_t L = model.window;

  double nu2 = 0;
  for (auto t : group) {
    const double pi = model.eigentriples[t].u[L - 1];
    nu2 += pi * pi;
  }
  if (nu2 >= 1.0 - 1e-9)
    throw DomainError("degenerate verticality: recurrence undefined (nu^2 = " +
                      std::to_string(nu2) + ")");

  // R_j = (1/(1-nu^2)) * sum_i pi_i * U_i[j], j = 0..L-2
  std::vector<double> rec(L - 1, 0.0);
  for (auto t : group) {
    const auto& u = model.eigentriples[t].u;
    const double pi = u[L - 1];
    for (std::size_t j = 0; j + 1 < L; ++j) rec[j] += pi * u[j];
  }
  for (double& r : rec) r /= 1.0 - nu2;

  std::vector<double> y = hankelize_group(model, group);
  const std::size_t n = y.size();
  y.resize(n + horizon);
  for (std::size_t t = n; t < n + horizon; ++t) {
    double next = 0;
    for (std::size_t j = 0; j + 1 < L; ++j) next += rec[j] * y[t - L + 1 + j];
    y[t] = next;
  }

  std::vector<double> fc(y.begin() + static_cast<std::ptrdiff_t>(n), y.end());
  std::vector<CellValue> labels;
  labels.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t)
    labels.emplace_back(static_cast<std::int64_t>(n + t));
  return Series::from_doubles(model.name + "_forecast", fc, std::move(labels));
}

std::size_t StlParams::trend_default() const {
  const double ns = static_cast<double>(seasonal_smoother);
  const double np = static_cast<double>(period);
  return smallest_odd_at_least(1.5 * np / (1.0 - 1.5 / ns));
}

std::size_t StlParams::lowpass_default() const {
  return smallest_odd_at_least(static_cast<double>(period));
}

StlResult stl_decompose(const Series& s, const StlParams& params) {
  const auto y = s.numeric_values();
  const std::size_t n = y.size();
  const std::size_t np = params.period;
  if (np < 2) throw ArgumentError("stl period must be at least 2");
  if (n < 2 * np)
    throw ArgumentError("stl needs at least two periods of data (" +
                        std::to_string(2 * np) + " values), got " +
                        std::to_string(n));
  const std::size_t ns = params.seasonal_smoother;
  check_odd_smoother("seasonal smoother", ns, 7);
  const std::size_t nt = params.trend_smoother.value_or(params.trend_default());
  check_odd_smoother("trend smoother", nt, 3);
  const std::size_t nl =
      params.lowpass_smoother.value_or(params.lowpass_default());
  check_odd_smoother("lowpass smoother", nl, 3);
  const std::size_t ni = params.inner_iterations;
  if (ni < 1) throw ArgumentError("stl needs at least one inner iteration");
  const std::size_t no = params.outer_iterations.value_or(params.outer_default());

  const auto positions = iota_positions(n);
  std::vector<double> w(n, 1.0);  // robustness weights
  std::vector<double> trend(n, 0.0);
  std::vector<double> seasonal(n, 0.0);
  std::vector<double> remainder(n, 0.0);

  std::vector<double> detrended(n), cycle(n + 2 * np), deseasonalized(n);

  for (std::size_t outer = 0;; ++outer) {
    for (std::size_t inner = 0; inner < ni; ++inner) {
      // 1. detrend
      for (std::size_t i = 0; i < n; ++i) detrended[i] = y[i] - trend[i];

      // 2. smooth each cycle-subseries, extending one period both sides
      for (std::size_t phase = 0; phase < np; ++phase) {
        const std::size_t m = (n - phase + np - 1) / np;
        std::vector<double> sx(m), sy(m), sw(m);
        for (std::size_t k = 0; k < m; ++k) {
          sx[k] = static_cast<double>(k);
          sy[k] = detrended[phase + k * np];
          sw[k] = w[phase + k * np];
        }
        std::vector<double> ex(m + 2);
        for (std::size_t k = 0; k < m + 2; ++k)
          ex[k] = static_cast<double>(k) - 1.0;
        const auto sm = loess_smooth(sx, sy, sw, ns, 1, ex);
        for (std::size_t k = 0; k < m + 2; ++k) {
          // ordinal k-1 sits at global position phase + (k-1)*np,
          // shifted by np into the extended buffer
          const std::ptrdiff_t g =
              static_cast<std::ptrdiff_t>(phase) +
              (static_cast<std::ptrdiff_t>(k) - 1) *
                  static_cast<std::ptrdiff_t>(np);
          cycle[static_cast<std::size_t>(g + static_cast<std::ptrdiff_t>(np))] =
              sm[k];
        }
      }

      // 3. low-pass: MA(np) twice, MA(3), then loess(nl, degree 1)
      const auto ma1 = moving_average(cycle, np);
      const auto ma2 = moving_average(ma1, np);
      const auto ma3 = moving_average(ma2, 3);
      const auto lowpass = loess_smooth(positions, ma3,
                                        std::vector<double>(n, 1.0), nl, 1,
                                        positions);

      // 4. seasonal = extended smoothed subseries minus low-pass
      for (std::size_t i = 0; i < n; ++i)
        seasonal[i] = cycle[i + np] - lowpass[i];

      // 5/6. deseasonalize and smooth the trend
      for (std::size_t i = 0; i < n; ++i) deseasonalized[i] = y[i] - seasonal[i];
      trend = loess_smooth(positions, deseasonalized, w, nt, 1, positions);
    }

    for (std::size_t i = 0; i < n; ++i)
      remainder[i] = y[i] - trend[i] - seasonal[i];
    if (outer >= no) break;
    w = bisquare_weights(remainder);
  }

  StlResult out;
  out.trend = Series::from_doubles("trend", trend, s.index);
  out.seasonal = Series::from_doubles("seasonal", seasonal, s.index);
  out.remainder = Series::from_doubles("remainder", remainder, s.index);
  out.period = np;
  out.robust = params.robust;
  out.robustness_weights = std::move(w);
  return out;
}

namespace {

Frame components_frame(const Series& input, const std::vector<const Series*>& parts) {
  FrameBuilder out;
  out.add_column("label", infer_column_type(input.index, "label"));
  out.add_column("observed", input.type);
  for (const auto* p : parts) {
    if (p->size() != input.size())
      throw DimensionError("component \"" + p->name + "\" has " +
                           std::to_string(p->size()) + " values, input has " +
                           std::to_string(input.size()));
    out.add_column(p->name, p->type);
  }
  out.reserve_rows(input.size());
  for (std::size_t r = 0; r < input.size(); ++r) {
    std::vector<CellValue> cells;
    cells.reserve(parts.size() + 2);
    cells.push_back(input.index[r]);
    cells.push_back(input.values[r]);
    for (const auto* p : parts) cells.push_back(p->values[r]);
    out.push_row(std::move(cells), CellValue(static_cast<std::int64_t>(r)));
  }
  return std::move(out).build();
}

}  // namespace

Frame decomposition_to_frame(const Series& input, const StlResult& result) {
  return components_frame(input,
                          {&result.trend, &result.seasonal, &result.remainder});
}

Frame decomposition_to_frame(const Series& input,
                             const std::vector<Series>& components) {
  std::vector<const Series*> parts;
  parts.reserve(components.size());
  for (const auto& c : components) parts.push_back(&c);
  return components_frame(input, parts);
}

}  // namespace tabula
