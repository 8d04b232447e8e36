#pragma once

// Dense numerical primitives used by the rest of the library. Everything is
// complex double precision; the functions are pure and deterministic.

#include <complex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "descriptor/error.hpp"

namespace descriptor::num {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Soft cap on matrix dimension for the iterative solvers.
inline constexpr Eigen::Index kMaxDimension = 64;

/// Throws NonFinite if any entry is NaN or infinite.
void require_finite(const Matrix& a, std::string_view what);

/// max(rows, cols) * eps * largest singular value.
double default_rank_tol(const Matrix& a);

std::vector<double> singular_values(const Matrix& a);

/// sigma_max / sigma_min; infinity for a numerically singular matrix,
/// 1 for an empty one.
double condition_number(const Matrix& a);

/// Least-squares solution of A x = b for A of full column rank.
/// `tol` is an absolute singular-value threshold (default_rank_tol when unset).
Vector qr_least_squares(const Matrix& a, const Vector& b, std::optional<double> tol = {});

/// X with A X = B. `rel_tol` bounds sigma_min / sigma_max (default n * eps).
Matrix solve_square(const Matrix& a, const Matrix& b, std::optional<double> rel_tol = {});

/// Orthonormal basis of the numerical column span; zero columns for A = 0.
Matrix orthonormal_range(const Matrix& a, std::optional<double> tol = {});

struct EigenDecomposition {
  /// Diagonal of the Schur form, one entry per algebraic multiplicity.
  std::vector<Complex> values;
  Matrix schur_vectors;
  Matrix schur_form;
};

/// Complex Schur based eigen decomposition, iteration budget 100 * dim.
EigenDecomposition eigen_decompose(const Matrix& a);

/// Roots (with multiplicity) of sum_k coeffs[k] s^k via companion-matrix
/// eigenvalues. Trailing coefficients at or below `tol * max|coeffs|` are
/// dropped before the leading one is taken.
std::vector<Complex> poly_roots(std::span<const Complex> coeffs, double tol = 1e-14);

/// Generalized Schur form A = left * s * right^H, B = left * t * right^H
/// with s, t upper triangular and left, right unitary. The generalized
/// eigenvalues are alpha[i] / beta[i] with alpha = diag(s), beta = diag(t).
struct GeneralizedSchur {
  Matrix s;
  Matrix t;
  Matrix left;
  Matrix right;

  Vector alpha() const { return s.diagonal(); }
  Vector beta() const { return t.diagonal(); }
};

GeneralizedSchur generalized_schur(const Matrix& a, const Matrix& b);

/// Moves the selected diagonal positions to the top-left, keeping their
/// relative order, with unitary updates of left/right.
void reorder_generalized_schur(GeneralizedSchur& schur, const std::vector<bool>& selected);

/// True when |imag| <= 1e-10 * (1 + |real|).
bool is_effectively_real(Complex z);
bool is_effectively_real(const Vector& v);

}  // namespace descriptor::num
