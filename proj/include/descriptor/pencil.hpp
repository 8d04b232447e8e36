#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "descriptor/numkernel.hpp"

namespace descriptor {

using num::Complex;
using num::Matrix;
using num::Vector;

/// The pair (F, G) of the system F y[k+1] = G y[k] + v[k].
class Pencil {
 public:
  /// Throws ShapeMismatch when F and G differ in shape, NonFinite on NaN/Inf.
  Pencil(Matrix f, Matrix g);

  const Matrix& f() const noexcept { return f_; }
  const Matrix& g() const noexcept { return g_; }
  Eigen::Index rows() const noexcept { return f_.rows(); }
  Eigen::Index cols() const noexcept { return f_.cols(); }
  bool is_square() const noexcept { return f_.rows() == f_.cols(); }

  /// det(s F - G) by LU factorization.
  Complex determinant(Complex s) const;

 private:
  Matrix f_;
  Matrix g_;
};

/// det(s F - G), coefficients in ascending degree.
struct CharPoly {
  std::vector<Complex> coeffs;
  /// Index of the last coefficient above tolerance; -1 when the
  /// determinant vanishes identically.
  int degree = 0;
  int dimension = 0;
  /// Radius of the interpolation circle; the natural eigenvalue scale.
  double node_radius = 1.0;
  /// Magnitude reference for the zero tests (a Hadamard determinant bound
  /// for interpolated polynomials, max |coeff| for hand-built ones).
  double scale = 0.0;

  Complex operator()(Complex s) const;

  /// Wraps explicit coefficients; the degree is the last index above
  /// `rel_tol * max|coeff|`.
  static CharPoly from_coefficients(std::vector<Complex> coeffs, int dimension,
                                    double rel_tol = 1e-10);
};

struct Eigenvalue {
  Complex value;
  int multiplicity = 1;
};

struct FiniteSpectrum {
  /// Distinct finite eigenvalues sorted by (real, imag).
  std::vector<Eigenvalue> eigenvalues;
  int p = 0;
  int q = 0;
};

struct Regular {
  FiniteSpectrum spectrum;
  CharPoly poly;
};
struct SingularNonSquare {};
struct SingularIdenticallyZero {
  CharPoly poly;
};

using PencilClass = std::variant<Regular, SingularNonSquare, SingularIdenticallyZero>;

inline constexpr double kZeroDeterminantTol = 1e-10;

/// Interpolates det(s F - G) from m+1 nodes on a rotated circle. Throws
/// NonSquare for r != m.
CharPoly char_poly(const Pencil& pencil, double zero_tol = kZeroDeterminantTol);

PencilClass classify(const Pencil& pencil, double tol = kZeroDeterminantTol);

/// Roots of `cp` clustered into distinct eigenvalues. Default cluster
/// tolerance is 1e-7 * (1 + node_radius).
FiniteSpectrum finite_spectrum(const CharPoly& cp, std::optional<double> cluster_tol = {});

bool is_regular(const PencilClass& c);

}  // namespace descriptor
