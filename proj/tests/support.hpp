#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "descriptor/error.hpp"
#include "descriptor/numkernel.hpp"

namespace descriptor::testing {

using num::Complex;
using num::Matrix;
using num::Vector;

inline Matrix real_matrix(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

inline Vector real_vector(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// Five-state system with a zero row in F.
inline Matrix five_state_f() {
  return real_matrix({{0, 0, -1, 0, 1},
                      {0, -1, -1, 1, 1},
                      {-1, -1, 1, 1, 0},
                      {0, 1, 2, 0, -2},
                      {0, 0, 0, 0, 0}});
}

inline Matrix five_state_g() {
  return real_matrix({{-5, 0, 8, 5, -3},
                      {-11, -1, 14, 11, -8},
                      {-2, -2, 2, 2, 0},
                      {11, 2, -14, -11, 8},
                      {-5, 0, 10, 5, -5}}) /
         5.0;
}

// Eigenvector basis printed alongside the five-state system. It does not
// span a deflating subspace of that pencil; kept for the fixed-basis check.
inline Matrix five_state_printed_basis() {
  return real_matrix({{1, 0, 0}, {0, 1, 1}, {0, 0, 0}, {1, 0, 1}, {0, 0, 1}});
}

// Exact finite deflating subspace of the five-state pencil: kernel of G for
// s = 0 and the two independent kernel vectors of (2/5) F - G.
inline Matrix five_state_true_basis() {
  return real_matrix({{1, 1, -6}, {0, 2, -10}, {0, 0, -1}, {1, 1, 0}, {0, 0, 4}});
}

// Orthogonal projection of (1,1,1,1,1) onto the true basis above.
inline Vector five_state_projected_ones() {
  return real_vector({26.0 / 35, 1.0, -3.0 / 35, 44.0 / 35, 12.0 / 35});
}

inline const double kFiveStateDistance = std::sqrt(2135.0) / 35.0;

inline Matrix two_state_f() { return real_matrix({{1, 1}, {1, 1}}); }
inline Matrix two_state_g() { return real_matrix({{1, -2}, {-2, 0}}) / 5.0; }

// |3 * 2.00001 - 2 * 2.99999| / sqrt(13)
inline const double kPerturbedDistance = 5e-5 / std::sqrt(13.0);

// Column-space projector through a thin SVD.
inline Matrix projector(const Matrix& basis) {
  if (basis.cols() == 0) return Matrix::Zero(basis.rows(), basis.rows());
  Eigen::JacobiSVD<Matrix> svd(basis, Eigen::ComputeThinU);
  const Matrix u = svd.matrixU();
  return u * u.adjoint();
}

// Coefficient of `basis_coeff` expressed in another basis of the same span:
// solves target * x = basis * coeff in the least-squares sense.
inline Vector change_basis(const Matrix& basis, const Vector& coeff, const Matrix& target) {
  if (target.cols() == 0) return Vector(0);
  return target.colPivHouseholderQr().solve(basis * coeff);
}

/// Planted pencil F = P^-1 diag(I, N) Q^-1, G = P^-1 diag(J, I) Q^-1 with
/// known J, N and transform Q.
struct PlantedPencil {
  Matrix f, g;
  Matrix j, n;       ///< planted finite block and nilpotent block
  Matrix p_inv, q;   ///< planted transforms
  int p = 0, q_dim = 0, q_star = 0;
  Matrix qp() const { return q.leftCols(p); }
};

class PencilFactory {
 public:
  explicit PencilFactory(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<>(lo, hi)(rng_); }

  Matrix random(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = uniform(-1.0, 1.0);
    return m;
  }

  Vector random_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(-1.0, 1.0);
    return v;
  }

  // Orthogonal factor times a diagonal with entries in [0.5, 2]: condition <= 4.
  Matrix transform(Eigen::Index m) {
    Eigen::HouseholderQR<Matrix> qr(random(m, m));
    Matrix u = qr.householderQ();
    for (Eigen::Index j = 0; j < m; ++j) u.col(j) *= uniform(0.5, 2.0);
    Eigen::HouseholderQR<Matrix> qr2(random(m, m));
    return u * Matrix(qr2.householderQ());
  }

  // Finite block with well-separated real eigenvalues in [-0.9, 0.9] or a
  // complex-conjugate pair, similarity-transformed to a dense real matrix.
  Matrix finite_block(int p) {
    if (p == 0) return Matrix(0, 0);
    Matrix d = Matrix::Zero(p, p);
    std::vector<double> values;
    for (int i = 0; i < p; ++i) values.push_back(-0.9 + 1.8 * (i + uniform(0.2, 0.8)) / p);
    std::shuffle(values.begin(), values.end(), rng_);
    for (int i = 0; i < p; ++i) d(i, i) = values[static_cast<std::size_t>(i)];
    if (p >= 2 && integer(0, 1) == 1) {
      // replace the first two with a rotation block a +- b i
      const double a = uniform(-0.6, 0.6);
      const double b = uniform(0.2, 0.5);
      d(0, 0) = a; d(1, 1) = a; d(0, 1) = b; d(1, 0) = -b;
    }
    const Matrix s = transform(p);
    return s * d * s.inverse();
  }

  // Nilpotent block built from Jordan chains of random lengths; returns the
  // largest chain length through `index`.
  Matrix nilpotent_block(int q, int& index) {
    Matrix n = Matrix::Zero(q, q);
    index = 0;
    int start = 0;
    while (start < q) {
      const int len = integer(1, q - start);
      for (int i = start; i + 1 < start + len; ++i) n(i, i + 1) = 1.0;
      index = std::max(index, len);
      start += len;
    }
    if (q == 0) return n;
    const Matrix s = transform(q);
    return s * n * s.inverse();
  }

  PlantedPencil planted(int m, int p) {
    PlantedPencil out;
    out.p = p;
    out.q_dim = m - p;
    out.j = finite_block(p);
    out.n = nilpotent_block(m - p, out.q_star);
    out.p_inv = transform(m);
    out.q = transform(m);
    Matrix f_canon = Matrix::Zero(m, m);
    Matrix g_canon = Matrix::Zero(m, m);
    f_canon.topLeftCorner(p, p).setIdentity();
    f_canon.bottomRightCorner(m - p, m - p) = out.n;
    g_canon.topLeftCorner(p, p) = out.j;
    g_canon.bottomRightCorner(m - p, m - p).setIdentity();
    const Matrix q_inv = out.q.inverse();
    out.f = out.p_inv * f_canon * q_inv;
    out.g = out.p_inv * g_canon * q_inv;
    return out;
  }

 private:
  std::mt19937_64 rng_;
};

// Code of the descriptor::Error thrown by f; records a failure if none is.
template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::ParseError;
}

inline double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

}  // namespace descriptor::testing
