#include "tabula/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace tabula {

namespace {

constexpr double kJacobiTol = 1e-12;
constexpr int kMaxSweeps = 60;

// Column-oriented working storage: w[j] is the j-th column.
using Columns = std::vector<std::vector<double>>;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// SVD of a matrix with rows >= cols given as columns. On return `w`
// holds U's columns scaled by the singular values and `v` holds V's
// columns (n x n rotations product).
void jacobi_sweeps(Columns& w, Columns& v) {
  const std::size_t n = w.size();
  const std::size_t m = w.empty() ? 0 : w.front().size();

  // Columns whose norm has collapsed to rounding noise (relative to the
  // rotation-invariant Frobenius norm) carry singular value 0; pairing
  // them would chase parallel cancellation residue forever.
  double frob2 = 0;
  for (const auto& col : w) frob2 += dot(col, col);
  const double col_eps = static_cast<double>(std::max(m, n)) *
                         std::numeric_limits<double>::epsilon();
  const double tiny2 = frob2 * col_eps * col_eps;

  double worst = 0;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    worst = 0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double app = dot(w[p], w[p]);
        const double aqq = dot(w[q], w[q]);
        if (app <= tiny2 || aqq <= tiny2) continue;  // numerically zero
        const double apq = dot(w[p], w[q]);
        const double norms = std::sqrt(app * aqq);
        worst = std::max(worst, std::abs(apq) / norms);
        if (std::abs(apq) <= kJacobiTol * norms) continue;

        const double zeta = (aqq - app) / (2.0 * apq);
        const double t =
            (zeta >= 0 ? 1.0 : -1.0) /
            (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < w[p].size(); ++i) {
          const double x = w[p][i], y = w[q][i];
          w[p][i] = c * x - s * y;
          w[q][i] = s * x + c * y;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double x = v[p][i], y = v[q][i];
          v[p][i] = c * x - s * y;
          v[q][i] = s * x + c * y;
        }
      }
    }
    if (worst <= kJacobiTol) return;
  }
  // Re-check: the last sweep may have finished the job.
  double residual = 0;
  for (std::size_t p = 0; p + 1 < n; ++p)
    for (std::size_t q = p + 1; q < n; ++q) {
      const double app = dot(w[p], w[p]);
      const double aqq = dot(w[q], w[q]);
      if (app <= tiny2 || aqq <= tiny2) continue;
      residual =
          std::max(residual, std::abs(dot(w[p], w[q])) / std::sqrt(app * aqq));
    }
  if (residual > kJacobiTol)
    throw NumericError("svd did not converge in " +
                       std::to_string(kMaxSweeps) + " sweeps; reached " +
                       std::to_string(residual) + ", wanted " +
                       std::to_string(kJacobiTol));
}

// Replace near-zero U columns with unit vectors orthonormal to the rest,
// so U keeps orthonormal columns even for rank-deficient input.
void complete_basis(Columns& u, const std::vector<bool>& degenerate) {
  const std::size_t m = u.front().size();
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (!degenerate[j]) continue;
    std::vector<double> best;
    double best_norm = -1;
    for (std::size_t k = 0; k < m; ++k) {
      std::vector<double> cand(m, 0.0);
      cand[k] = 1.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        if (degenerate[i] && i >= j) continue;  // not yet completed
        const double proj = dot(cand, u[i]);
        for (std::size_t t = 0; t < m; ++t) cand[t] -= proj * u[i][t];
      }
      const double norm = std::sqrt(dot(cand, cand));
      if (norm > best_norm) {
        best_norm = norm;
        best = std::move(cand);
      }
    }
    for (double& x : best) x /= best_norm;
    u[j] = std::move(best);
  }
}

SvdResult svd_tall(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();

  Columns w(n, std::vector<double>(m));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) w[j][i] = a(i, j);
  Columns v(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) v[j][j] = 1.0;

  jacobi_sweeps(w, v);

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(dot(w[j], w[j]));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return sigma[x] > sigma[y];
  });

  const double sigma_max = sigma.empty() ? 0.0 : sigma[order.front()];
  const double tiny = sigma_max * static_cast<double>(std::max(m, n)) *
                      std::numeric_limits<double>::epsilon();

  Columns u_cols(n);
  Columns v_cols(n);
  std::vector<double> s(n);
  std::vector<bool> degenerate(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    s[j] = sigma[src];
    v_cols[j] = v[src];
    if (sigma[src] <= tiny || sigma[src] == 0.0) {
      degenerate[j] = true;
      u_cols[j] = std::vector<double>(m, 0.0);
    } else {
      u_cols[j] = w[src];
      for (double& x : u_cols[j]) x /= sigma[src];
    }
  }
  complete_basis(u_cols, degenerate);

  // Sign convention: largest-magnitude entry of each U column positive.
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < m; ++i)
      if (std::abs(u_cols[j][i]) > std::abs(u_cols[j][arg])) arg = i;
    if (u_cols[j][arg] < 0) {
      for (double& x : u_cols[j]) x = -x;
      for (double& x : v_cols[j]) x = -x;
    }
  }

  SvdResult out;
  out.u = Matrix(m, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) out.u(i, j) = u_cols[j][i];
  out.s = std::move(s);
  out.vt = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) out.vt(j, i) = v_cols[j][i];
  return out;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), v_(std::move(values)) {
  if (v_.size() != rows_ * cols_)
    throw DimensionError("matrix " + std::to_string(rows_) + "x" +
                         std::to_string(cols_) + " needs " +
                         std::to_string(rows_ * cols_) + " values, got " +
                         std::to_string(v_.size()));
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::all_finite() const noexcept {
  for (double x : v_)
    if (!std::isfinite(x)) return false;
  return true;
}

double Matrix::max_abs() const noexcept {
  double m = 0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw DimensionError("matmul shape mismatch: " + std::to_string(a.rows()) +
                         "x" + std::to_string(a.cols()) + " * " +
                         std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

SvdResult svd(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0)
    throw DimensionError("svd of an empty matrix");
  if (!a.all_finite()) throw DomainError("svd input has non-finite entries");

  if (a.rows() >= a.cols()) return svd_tall(a);

  // Wide matrix: factor the transpose and swap the roles of U and V.
  SvdResult t = svd_tall(transpose(a));
  SvdResult out;
  out.s = std::move(t.s);
  out.u = transpose(t.vt);
  out.vt = transpose(t.u);
  // Re-apply the sign convention (it anchored on the other factor).
  const std::size_t r = out.s.size();
  for (std::size_t j = 0; j < r; ++j) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < out.u.rows(); ++i)
      if (std::abs(out.u(i, j)) > std::abs(out.u(arg, j))) arg = i;
    if (out.u(arg, j) < 0) {
      for (std::size_t i = 0; i < out.u.rows(); ++i) out.u(i, j) = -out.u(i, j);
      for (std::size_t i = 0; i < out.vt.cols(); ++i) out.vt(j, i) = -out.vt(j, i);
    }
  }
  return out;
}

}  // namespace tabula
