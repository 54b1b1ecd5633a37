#include "icb/seprank/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "icb/common/errors.hpp"
#include "icb/common/numeric.hpp"

namespace icb::seprank {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kEps = 2.220446049250313e-16;

double off_diagonal_norm(const Matrix& a) {
  CompensatedSum s;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s.add(a(i, j) * a(i, j));
  return std::sqrt(s.value());
}

}  // namespace

bool is_symmetric(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(max_abs(m), 1e-300);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > rel_tol * scale) return false;
  return true;
}

SymmetricEigen symmetric_eigendecomposition(const Matrix& m) {
  if (!is_symmetric(m)) throw InputError("symmetric_eigendecomposition: input is not symmetric");
  const std::size_t n = m.rows();
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
  Matrix v = Matrix::identity(n);

  const double total = frobenius_norm(a);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= kEps * total) break;
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Negligible against both diagonal entries: drop it.
        if (sweep > 3 && std::abs(apq) <= kEps * 0.5 * std::abs(a(p, p)) &&
            std::abs(apq) <= kEps * 0.5 * std::abs(a(q, q))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        rotated = true;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    if (!rotated) break;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

namespace {

// Column-rotating Jacobi on a copy of m; optionally accumulates the right
// singular vectors.
Vector hestenes(const Matrix& m, Matrix* right) {
  const std::size_t rows = m.rows(), cols = m.cols();
  // Work on columns stored contiguously.
  std::vector<Vector> u(cols, Vector(rows));
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t r = 0; r < rows; ++r) u[c][r] = m(r, c);
  Matrix v = Matrix::identity(cols);

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < cols; ++p)
      for (std::size_t q = p + 1; q < cols; ++q) {
        const double alpha = compensated_dot(u[p], u[p]);
        const double beta = compensated_dot(u[q], u[q]);
        const double gamma = compensated_dot(u[p], u[q]);
        if (gamma == 0.0 || std::abs(gamma) <= kEps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t r = 0; r < rows; ++r) {
          const double up = u[p][r], uq = u[q][r];
          u[p][r] = c * up - s * uq;
          u[q][r] = s * up + c * uq;
        }
        for (std::size_t r = 0; r < cols; ++r) {
          const double vp = v(r, p), vq = v(r, q);
          v(r, p) = c * vp - s * vq;
          v(r, q) = s * vp + c * vq;
        }
      }
    if (!rotated) break;
  }

  Vector sigma(cols);
  for (std::size_t c = 0; c < cols; ++c) sigma[c] = std::sqrt(compensated_dot(u[c], u[c]));
  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });
  Vector sorted(cols);
  for (std::size_t k = 0; k < cols; ++k) sorted[k] = sigma[order[k]];
  if (right) {
    *right = Matrix(cols, cols);
    for (std::size_t k = 0; k < cols; ++k)
      for (std::size_t r = 0; r < cols; ++r) (*right)(r, k) = v(r, order[k]);
  }
  // A wide matrix has at most `rows` nonzero singular values.
  if (rows < cols) sorted.resize(rows);
  return sorted;
}

}  // namespace

Vector singular_values(const Matrix& m) {
  if (m.size() == 0) return {};
  return hestenes(m, nullptr);
}

int eps_rank_certificate(const Matrix& m, double eps) {
  if (!(eps > 0.0)) throw InputError("eps_rank_certificate: eps must be > 0");
  const SymmetricEigen e = symmetric_eigendecomposition(m);
  int k = 0;
  while (k < static_cast<int>(e.values.size()) && e.values[static_cast<std::size_t>(k)] >= eps) ++k;
  return k;
}

int spectral_rank_estimate(const Matrix& m, double tau) {
  if (!(tau > 0.0)) throw InputError("spectral_rank_estimate: tau must be > 0");
  const Vector s = singular_values(m);
  return static_cast<int>(std::count_if(s.begin(), s.end(), [&](double x) { return x > tau; }));
}

SpectrumReport spectrum_report(const Matrix& m, double tau) {
  SpectrumReport r;
  r.singular_values = singular_values(m);
  if (is_symmetric(m)) r.eigenvalues = symmetric_eigendecomposition(m).values;
  r.threshold = tau;
  r.count_above = static_cast<int>(std::count_if(
      r.singular_values.begin(), r.singular_values.end(), [&](double x) { return x > tau; }));
  return r;
}

Matrix symmetric_factor(const Matrix& m) {
  const std::size_t n = m.cols();
  if (is_symmetric(m)) {
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) s(i, j) = 0.5 * (m(i, j) + m(j, i));
    return s;
  }
  Matrix v;
  const Vector sigma = hestenes(m, &v);
  Matrix s(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      CompensatedSum acc;
      for (std::size_t k = 0; k < sigma.size(); ++k) acc.add(v(i, k) * sigma[k] * v(j, k));
      s(i, j) = s(j, i) = acc.value();
    }
  return s;
}

}  // namespace icb::seprank
