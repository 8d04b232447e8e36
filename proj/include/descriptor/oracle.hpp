#pragma once

// Brute-force verifiers. Nothing here includes or calls the algorithms it
// checks; only Eigen containers are shared.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace descriptor::oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct ResidualReport {
  /// ||F y[k+1] - G y[k] - v[k]||_inf for k = 0 .. N-1.
  std::vector<double> per_step;
  double max = 0.0;
  double tol = 0.0;
  bool passed = true;
};

/// Recomputes every step residual by explicit loops. `inputs` may be empty,
/// meaning v = 0; otherwise it must hold at least N vectors of length rows(F).
/// Throws std::invalid_argument on shape mismatch.
ResidualReport residual_check(const Matrix& f, const Matrix& g, std::span<const Vector> inputs,
                              std::span<const Vector> states, double tol);

inline constexpr int kMaxExactDimension = 6;

/// det(s F - G) by cofactor expansion over degree-one polynomial entries,
/// ascending coefficients, length m + 1. Throws std::length_error for m > 6.
std::vector<Complex> det_poly_exact(const Matrix& f, const Matrix& g);

/// Distance from y to colspan(basis) through an SVD orthonormal basis.
double svd_projection_distance(const Matrix& basis, const Vector& y);

}  // namespace descriptor::oracle
