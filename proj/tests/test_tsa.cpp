#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "tabula/tsa.hpp"
#include "test_util.hpp"

using namespace tabula;

namespace {

Series dd_series(const std::vector<double>& v) {
  return Series::from_doubles("s", v);
}

std::vector<double> sinusoid(std::size_t n, double period, double amp = 1.0,
                             double phase = 0.0) {
  std::vector<double> v(n);
  for (std::size_t t = 0; t < n; ++t)
    v[t] = amp * std::sin(2.0 * M_PI * static_cast<double>(t) / period + phase);
  return v;
}

std::size_t count_non_negligible(const SsaModel& m) {
  std::size_t k = 0;
  for (const auto& et : m.eigentriples)
    if (!et.negligible) ++k;
  return k;
}

}  // namespace

TEST_CASE("embed builds lagged rows") {
  const Frame f = embed(dd_series({1, 2, 3, 4}), 1);
  CHECK(f.column_names() == std::vector<std::string>{"t-1", "t"});
  CHECK(f.row_count() == 3);
  CHECK(f.cell_at(0, "t-1") == CellValue(1.0));
  CHECK(f.cell_at(0, "t") == CellValue(2.0));
  CHECK(f.cell_at(2, "t-1") == CellValue(3.0));
  CHECK(f.cell_at(2, "t") == CellValue(4.0));
}

TEST_CASE("embed with the maximal lag gives a single row") {
  const Frame f = embed(dd_series({1, 2, 3, 4}), 3);
  CHECK(f.row_count() == 1);
  CHECK(f.col_count() == 4);
  CHECK(f.cell_at(0, "t-3") == CellValue(1.0));
  CHECK(f.cell_at(0, "t") == CellValue(4.0));
}

TEST_CASE("embed rows are contiguous slices of the input") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-1, 1);
  std::vector<double> v(40);
  for (auto& x : v) x = dist(rng);
  const std::size_t lag = 1 + rng() % 38;
  const Frame f = embed(dd_series(v), lag);
  REQUIRE(f.row_count() == v.size() - lag);
  for (std::size_t r = 0; r < f.row_count(); ++r)
    for (std::size_t c = 0; c <= lag; ++c)
      CHECK(f.cell_at(r, c).as_double() == v[r + c]);
}

TEST_CASE("embed rejects out-of-range lags") {
  CHECK_THROWS_AS(embed(dd_series({1, 2, 3}), 0), ArgumentError);
  CHECK_THROWS_AS(embed(dd_series({1, 2, 3}), 3), ArgumentError);
}

TEST_CASE("ssa trajectory matrix is Hankel") {
  std::vector<double> v(20);
  std::iota(v.begin(), v.end(), 1.0);
  const SsaModel m = ssa_decompose(dd_series(v), 7);
  CHECK(m.window == 7);
  CHECK(m.k() == 14);
  for (std::size_t i = 0; i < m.window; ++i)
    for (std::size_t j = 0; j < m.k(); ++j)
      CHECK(m.trajectory(i, j) == v[i + j]);
}

TEST_CASE("ssa window defaults to half the length") {
  const SsaModel m = ssa_decompose(dd_series(std::vector<double>(20, 1.0)));
  CHECK(m.window == 10);
}

TEST_CASE("ssa of a constant series has one non-negligible eigentriple") {
  for (std::size_t L : {std::size_t{2}, std::size_t{5}, std::size_t{10}}) {
    const SsaModel m =
        ssa_decompose(dd_series(std::vector<double>(24, 3.5)), L);
    CHECK(count_non_negligible(m) == 1);
  }
}

TEST_CASE("ssa of a pure sinusoid has numeric rank two") {
  const SsaModel m = ssa_decompose(dd_series(sinusoid(100, 11.5)), 50);
  CHECK(count_non_negligible(m) == 2);
}

TEST_CASE("ssa energy identity: sum of sigma^2 equals Frobenius^2") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dist(-3, 3);
  std::vector<double> v(60);
  for (auto& x : v) x = dist(rng);
  const SsaModel m = ssa_decompose(dd_series(v), 25);
  double frob2 = 0;
  for (std::size_t i = 0; i < m.window; ++i)
    for (std::size_t j = 0; j < m.k(); ++j)
      frob2 += m.trajectory(i, j) * m.trajectory(i, j);
  double energy = 0;
  for (const auto& et : m.eigentriples) energy += et.sigma * et.sigma;
  CHECK(energy == doctest::Approx(frob2).epsilon(1e-8));
}

TEST_CASE("ssa preconditions") {
  CHECK_THROWS_AS(ssa_decompose(dd_series({1, 2}), 2), ArgumentError);
  CHECK_THROWS_AS(ssa_decompose(dd_series({1, 2, 3}), 1), ArgumentError);
  CHECK_THROWS_AS(ssa_decompose(dd_series({1, 2, 3}), 3), ArgumentError);
  Series missing = dd_series({1, 2, 3, 4});
  missing.values[2] = CellValue::missing();
  CHECK_THROWS_AS(ssa_decompose(missing, 2), DomainError);
}

TEST_CASE("ssa reconstruction with every eigentriple returns the input") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> dist(-10, 10);
  for (std::size_t n : {std::size_t{10}, std::size_t{57}, std::size_t{200}}) {
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    const SsaModel m = ssa_decompose(dd_series(v));
    std::vector<std::size_t> all(m.eigentriples.size());
    std::iota(all.begin(), all.end(), 0);
    const auto rec = ssa_reconstruct(m, {all});
    REQUIRE(rec.size() == 1);
    for (std::size_t t = 0; t < n; ++t)
      CHECK(std::abs(rec[0].values[t].as_double() - v[t]) <= 1e-8);
  }
}

TEST_CASE("ssa reconstruction of an empty group is all zero") {
  const SsaModel m = ssa_decompose(dd_series({1, 2, 3, 4, 5, 6}), 3);
  const auto rec = ssa_reconstruct(m, {{}});
  for (const auto& v : rec[0].values) CHECK(v.as_double() == 0.0);
}

TEST_CASE("ssa reconstruction is additive over disjoint groups") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> dist(-5, 5);
  std::vector<double> v(48);
  for (auto& x : v) x = dist(rng);
  const SsaModel m = ssa_decompose(dd_series(v), 12);
  const auto parts = ssa_reconstruct(m, {{0, 2}, {1, 3}});
  const auto joined = ssa_reconstruct(m, {{0, 1, 2, 3}});
  for (std::size_t t = 0; t < v.size(); ++t)
    CHECK(std::abs(parts[0].values[t].as_double() +
                   parts[1].values[t].as_double() -
                   joined[0].values[t].as_double()) <= 1e-10);
}

TEST_CASE("ssa separates a linear trend from a sinusoid") {
  // The ramp must dominate so its two eigentriples lead the sine pair.
  const std::size_t n = 120;
  std::vector<double> trend(n), seasonal = sinusoid(n, 12.0, 1.0);
  for (std::size_t t = 0; t < n; ++t)
    trend[t] = 0.6 * static_cast<double>(t) + 5.0;
  std::vector<double> input(n);
  for (std::size_t t = 0; t < n; ++t) input[t] = trend[t] + seasonal[t];

  const SsaModel m = ssa_decompose(dd_series(input), 40);
  const auto rec = ssa_reconstruct(m, {{0, 1}, {2, 3}});
  std::vector<double> got_trend, got_seasonal;
  for (std::size_t t = 0; t < n; ++t) {
    got_trend.push_back(rec[0].values[t].as_double());
    got_seasonal.push_back(rec[1].values[t].as_double());
  }
  CHECK(testutil::correlation(got_trend, trend) >= 0.99);
  CHECK(testutil::correlation(got_seasonal, seasonal) >= 0.99);
}

TEST_CASE("ssa groups must be disjoint and in range") {
  const SsaModel m = ssa_decompose(dd_series({1, 2, 3, 4, 5, 6}), 3);
  CHECK_THROWS_AS(ssa_reconstruct(m, {{0, 1}, {1}}), ArgumentError);
  CHECK_THROWS_AS(ssa_reconstruct(m, {{99}}), ArgumentError);
}

TEST_CASE("ssa forecast continues a constant series") {
  const SsaModel m = ssa_decompose(dd_series(std::vector<double>(30, 4.25)), 5);
  const Series fc = ssa_forecast(m, {0}, 6);
  REQUIRE(fc.size() == 6);
  for (const auto& v : fc.values)
    CHECK(std::abs(v.as_double() - 4.25) <= 1e-6);
}

TEST_CASE("ssa forecast continues a line") {
  std::vector<double> v(30);
  for (std::size_t t = 0; t < v.size(); ++t)
    v[t] = 1.5 * static_cast<double>(t) + 2.0;
  const SsaModel m = ssa_decompose(dd_series(v), 3);
  const Series fc = ssa_forecast(m, {0, 1}, 5);
  for (std::size_t h = 0; h < 5; ++h) {
    const double want = 1.5 * static_cast<double>(30 + h) + 2.0;
    CHECK(std::abs(fc.values[h].as_double() - want) <= 1e-6);
  }
}

TEST_CASE("ssa forecast of a sinusoid matches the previous period") {
  const std::size_t period = 10;
  std::vector<double> v = sinusoid(100, static_cast<double>(period), 2.0, 0.3);
  const SsaModel m = ssa_decompose(dd_series(v), 30);
  const Series fc = ssa_forecast(m, {0, 1}, period);
  for (std::size_t h = 0; h < period; ++h)
    CHECK(std::abs(fc.values[h].as_double() - v[100 - period + h]) <= 1e-4);
}

TEST_CASE("ssa forecast argument checks") {
  const SsaModel m = ssa_decompose(dd_series({1, 2, 3, 4, 5, 6}), 3);
  CHECK_THROWS_AS(ssa_forecast(m, {0}, 0), ArgumentError);
}

TEST_CASE("loess reproduces constants and lines exactly") {
  std::vector<double> x(20), ones(20, 1.0);
  std::iota(x.begin(), x.end(), 0.0);

  const std::vector<double> constant(20, 7.5);
  for (std::size_t q : {std::size_t{3}, std::size_t{7}, std::size_t{41}})
    for (int degree : {0, 1, 2}) {
      const auto out = loess_smooth(x, constant, ones, q, degree, x);
      for (double v : out) CHECK(v == doctest::Approx(7.5).epsilon(1e-12));
    }

  std::vector<double> line(20);
  for (std::size_t i = 0; i < 20; ++i)
    line[i] = 3.0 * static_cast<double>(i) - 4.0;
  for (std::size_t q : {std::size_t{2}, std::size_t{5}, std::size_t{20}}) {
    const auto out = loess_smooth(x, line, ones, q, 1, x);
    for (std::size_t i = 0; i < 20; ++i)
      CHECK(std::abs(out[i] - line[i]) <= 1e-10);
  }
}

TEST_CASE("loess with a flat-weight span equals ordinary least squares") {
  // closed-form simple regression as the oracle
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> dist(-2, 2);
  const std::size_t n = 15;
  std::vector<double> x(n), y(n), ones(n, 1.0);
  std::iota(x.begin(), x.end(), 0.0);
  for (auto& v : y) v = dist(rng);

  // the q/n distance inflation drives every tricube weight to 1 as the
  // span grows, so a huge span reduces the local fit to plain least
  // squares over all points
  const std::size_t q = 1000 * n;
  const double e = 7.0;  // evaluation point
  const auto got = loess_smooth(x, y, ones, q, 1, {e});

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double nn = static_cast<double>(n);
  const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / nn;
  CHECK(got[0] == doctest::Approx(intercept + slope * e).epsilon(1e-6));
}

TEST_CASE("loess falls back to the mean when every weight is zero") {
  const std::vector<double> x = {0, 1, 2};
  const std::vector<double> y = {1, 2, 6};
  const std::vector<double> w = {0, 0, 0};
  const auto out = loess_smooth(x, y, w, 3, 1, {1.0});
  CHECK(out[0] == doctest::Approx(3.0));  // plain mean of the window
}

TEST_CASE("loess validates its arguments") {
  const std::vector<double> x = {0, 1, 2};
  const std::vector<double> y = {1, 2, 3};
  const std::vector<double> w = {1, 1, 1};
  CHECK_THROWS_AS(loess_smooth(x, y, w, 1, 1, {0.0}), ArgumentError);
  CHECK_THROWS_AS(loess_smooth({0, 0, 1}, y, w, 2, 1, {0.0}), ArgumentError);
  CHECK_THROWS_AS(loess_smooth(x, {1, 2}, w, 2, 1, {0.0}), DimensionError);
}

TEST_CASE("stl additive identity holds exactly") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> dist(-1, 1);
  std::vector<double> v(72);
  for (std::size_t t = 0; t < v.size(); ++t)
    v[t] = 10 + 0.1 * static_cast<double>(t) +
           3 * std::sin(2 * M_PI * static_cast<double>(t) / 12.0) + dist(rng);
  StlParams params;
  params.period = 12;
  const StlResult r = stl_decompose(dd_series(v), params);
  for (std::size_t t = 0; t < v.size(); ++t) {
    const double trend = r.trend.values[t].as_double();
    const double seasonal = r.seasonal.values[t].as_double();
    const double remainder = r.remainder.values[t].as_double();
    // remainder is defined by subtraction, so re-deriving it is bitwise
    // exact; the reassociated sum can differ by rounding only
    CHECK(remainder == v[t] - trend - seasonal);
    CHECK(std::abs(trend + seasonal + remainder - v[t]) <=
          1e-12 * std::max(1.0, std::abs(v[t])));
  }
}

TEST_CASE("stl recovers a sinusoid plus linear trend") {
  const std::size_t n = 120, period = 12;
  std::vector<double> trend(n), seasonal = sinusoid(n, 12.0, 4.0), input(n);
  for (std::size_t t = 0; t < n; ++t) {
    trend[t] = 0.15 * static_cast<double>(t) + 2.0;
    input[t] = trend[t] + seasonal[t];
  }
  StlParams params;
  params.period = period;
  const StlResult r = stl_decompose(dd_series(input), params);

  std::vector<double> got_trend, got_seasonal, got_rem;
  for (std::size_t t = 0; t < n; ++t) {
    got_trend.push_back(r.trend.values[t].as_double());
    got_seasonal.push_back(r.seasonal.values[t].as_double());
    got_rem.push_back(r.remainder.values[t].as_double());
  }
  CHECK(testutil::correlation(got_trend, trend) >= 0.99);
  CHECK(testutil::correlation(got_seasonal, seasonal) >= 0.99);
  CHECK(testutil::rms(got_rem) <= 0.05 * testutil::rms(input));
}

TEST_CASE("stl of a constant input extracts nothing") {
  StlParams params;
  params.period = 6;
  const StlResult r =
      stl_decompose(dd_series(std::vector<double>(48, 11.0)), params);
  for (std::size_t t = 0; t < 48; ++t) {
    CHECK(std::abs(r.seasonal.values[t].as_double()) <= 1e-8);
    CHECK(r.trend.values[t].as_double() == doctest::Approx(11.0));
  }
}

TEST_CASE("stl robustness weights stay in [0,1]") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> dist(-1, 1);
  std::vector<double> v(60);
  for (auto& x : v) x = dist(rng);
  v[7] += 30;  // outlier
  StlParams params;
  params.period = 6;
  params.robust = true;
  const StlResult r = stl_decompose(dd_series(v), params);
  for (double w : r.robustness_weights) {
    CHECK(w >= 0.0);
    CHECK(w <= 1.0);
  }
  CHECK(r.robustness_weights[7] < 0.1);  // the outlier is downweighted
}

TEST_CASE("stl with zero outer iterations matches the non-robust run") {
  std::vector<double> v(48);
  for (std::size_t t = 0; t < v.size(); ++t)
    v[t] = std::cos(2 * M_PI * static_cast<double>(t) / 8.0) +
           0.02 * static_cast<double>(t);
  StlParams nonrobust;
  nonrobust.period = 8;
  StlParams robust_zero;
  robust_zero.period = 8;
  robust_zero.robust = true;
  robust_zero.outer_iterations = 0;
  const StlResult a = stl_decompose(dd_series(v), nonrobust);
  const StlResult b = stl_decompose(dd_series(v), robust_zero);
  for (std::size_t t = 0; t < v.size(); ++t) {
    CHECK(a.trend.values[t] == b.trend.values[t]);
    CHECK(a.seasonal.values[t] == b.seasonal.values[t]);
  }
}

TEST_CASE("stl robust run resists outliers better than the plain run") {
  std::mt19937_64 rng(43);
  const std::size_t n = 120, period = 12;
  std::vector<double> trend(n), input(n);
  const auto seasonal = sinusoid(n, 12.0, 3.0);
  for (std::size_t t = 0; t < n; ++t) {
    trend[t] = 0.1 * static_cast<double>(t);
    input[t] = trend[t] + seasonal[t];
  }
  const double spike = 10.0 * testutil::rms(input);
  for (std::size_t k = 0; k < n / 20; ++k) {  // 5% outliers
    const std::size_t at = rng() % n;
    input[at] += (k % 2 == 0 ? spike : -spike);
  }

  StlParams plain;
  plain.period = period;
  StlParams robust;
  robust.period = period;
  robust.robust = true;

  auto trend_corr = [&](const StlResult& r) {
    std::vector<double> got;
    for (std::size_t t = 0; t < n; ++t)
      got.push_back(r.trend.values[t].as_double());
    return testutil::correlation(got, trend);
  };
  const double plain_corr = trend_corr(stl_decompose(dd_series(input), plain));
  const double robust_corr = trend_corr(stl_decompose(dd_series(input), robust));
  CHECK(robust_corr >= 0.98);
  CHECK(robust_corr > plain_corr);
}

TEST_CASE("stl parameter validation") {
  const Series s = dd_series(std::vector<double>(48, 1.0));
  StlParams p;
  p.period = 1;
  CHECK_THROWS_AS(stl_decompose(s, p), ArgumentError);
  p.period = 30;  // needs 60 values
  CHECK_THROWS_AS(stl_decompose(s, p), ArgumentError);
  p.period = 6;
  p.seasonal_smoother = 8;  // even
  CHECK_THROWS_AS(stl_decompose(s, p), ArgumentError);
  p.seasonal_smoother = 5;  // below 7
  CHECK_THROWS_AS(stl_decompose(s, p), ArgumentError);
  p.seasonal_smoother = 7;
  p.trend_smoother = 4;  // even
  CHECK_THROWS_AS(stl_decompose(s, p), ArgumentError);
}

TEST_CASE("stl default smoother lengths") {
  StlParams p;
  p.period = 12;
  CHECK(p.trend_default() == 23);  // smallest odd >= 1.5*12/(1-1.5/7)
  CHECK(p.lowpass_default() == 13);
  p.period = 7;
  CHECK(p.lowpass_default() == 7);
}

TEST_CASE("decomposition_to_frame shapes") {
  std::vector<double> v(24);
  for (std::size_t t = 0; t < v.size(); ++t)
    v[t] = std::sin(2 * M_PI * static_cast<double>(t) / 6.0);
  const Series s = dd_series(v);
  StlParams p;
  p.period = 6;
  const Frame stl_frame = decomposition_to_frame(s, stl_decompose(s, p));
  CHECK(stl_frame.column_names() ==
        std::vector<std::string>{"label", "observed", "trend", "seasonal",
                                 "remainder"});
  CHECK(stl_frame.row_count() == 24);
  for (std::size_t t = 0; t < v.size(); ++t)
    CHECK(stl_frame.cell_at(t, "observed") == s.values[t]);

  const SsaModel m = ssa_decompose(s, 8);
  const Frame ssa_frame =
      decomposition_to_frame(s, ssa_reconstruct(m, {{0, 1}, {2, 3}}));
  CHECK(ssa_frame.col_count() == 4);  // label, observed, two groups
  CHECK(ssa_frame.column_names()[2] == "group_0");

  Series short_series = dd_series({1, 2});
  CHECK_THROWS_AS(decomposition_to_frame(s, std::vector<Series>{short_series}),
                  DimensionError);
}
