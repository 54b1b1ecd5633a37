#pragma once

#include "icb/common/matrix.hpp"

namespace icb::seprank {

struct SymmetricEigen {
  Vector values;   // descending
  Matrix vectors;  // column k pairs with values[k]
};

struct SpectrumReport {
  Vector singular_values;  // descending
  Vector eigenvalues;      // descending; empty unless the input was symmetric
  double threshold = 0.0;
  int count_above = 0;     // singular values strictly above threshold
};

bool is_symmetric(const Matrix& m, double rel_tol = 1e-10);

// Cyclic Jacobi rotations. Throws InputError unless m is symmetric to 1e-10
// relative to its largest entry.
SymmetricEigen symmetric_eigendecomposition(const Matrix& m);

// One-sided (Hestenes) Jacobi: diagonalizes m^T m by rotating the columns of m,
// which keeps small singular values accurate to working precision.
Vector singular_values(const Matrix& m);

// Largest k with lambda_k(m) >= eps. Certifies that the (eps / 2n)-rank of m
// is at least k.
int eps_rank_certificate(const Matrix& m, double eps);

// Number of singular values strictly above tau.
int spectral_rank_estimate(const Matrix& m, double tau);

SpectrumReport spectrum_report(const Matrix& m, double tau);

// (m + m^T)/2 for square near-symmetric m, otherwise (m^T m)^{1/2}.
Matrix symmetric_factor(const Matrix& m);

}  // namespace icb::seprank
