#include "descriptor/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace descriptor {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::DegenerateAllZero: return "DegenerateAllZero";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::NotRegular: return "NotRegular";
    case ErrorCode::IllConditionedTransform: return "IllConditionedTransform";
    case ErrorCode::ReorderingFailure: return "ReorderingFailure";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotNilpotent: return "NotNilpotent";
    case ErrorCode::InsufficientHorizon: return "InsufficientHorizon";
    case ErrorCode::NotConsistent: return "NotConsistent";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MissingY0: return "MissingY0";
  }
  return "Unknown";
}

}  // namespace descriptor

namespace descriptor::num {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

}  // namespace

void require_finite(const Matrix& a, std::string_view what) {
  if (!a.allFinite()) {
    throw Error(ErrorCode::NonFinite, std::string(what) + " contains NaN or Inf entries");
  }
}

std::vector<double> singular_values(const Matrix& a) {
  if (a.size() == 0) return {};
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  return {sv.data(), sv.data() + sv.size()};
}

double default_rank_tol(const Matrix& a) {
  const auto sv = singular_values(a);
  const double smax = sv.empty() ? 0.0 : sv.front();
  return static_cast<double>(std::max(a.rows(), a.cols())) * kEps * smax;
}

double condition_number(const Matrix& a) {
  const auto sv = singular_values(a);
  if (sv.empty()) return 1.0;
  if (sv.back() == 0.0) return std::numeric_limits<double>::infinity();
  return sv.front() / sv.back();
}

Vector qr_least_squares(const Matrix& a, const Vector& b, std::optional<double> tol) {
  if (a.rows() != b.size()) {
    throw Error(ErrorCode::ShapeMismatch, "least squares: rhs length differs from row count");
  }
  if (a.rows() < a.cols()) {
    throw Error(ErrorCode::RankDeficient, "least squares: fewer rows than columns");
  }
  if (a.cols() == 0) return Vector(0);

  const auto sv = singular_values(a);
  const double threshold = tol.value_or(static_cast<double>(a.rows()) * kEps * sv.front());
  const auto rank = std::count_if(sv.begin(), sv.end(), [&](double s) { return s > threshold; });
  if (rank < a.cols()) {
    throw Error(ErrorCode::RankDeficient, "least squares: column rank " + std::to_string(rank) +
                                              " < " + std::to_string(a.cols()));
  }
  return Eigen::HouseholderQR<Matrix>(a).solve(b);
}

Matrix solve_square(const Matrix& a, const Matrix& b, std::optional<double> rel_tol) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::NonSquare, "solve_square: matrix not square");
  if (a.rows() != b.rows()) throw Error(ErrorCode::ShapeMismatch, "solve_square: rhs rows differ");
  if (a.rows() == 0) return Matrix(0, b.cols());

  const auto sv = singular_values(a);
  const double tol = rel_tol.value_or(static_cast<double>(a.rows()) * kEps);
  if (sv.back() <= tol * sv.front()) {
    throw Error(ErrorCode::SingularMatrix, "solve_square: smallest singular value " +
                                               std::to_string(sv.back()) + " below tolerance");
  }
  return Eigen::PartialPivLU<Matrix>(a).solve(b);
}

Matrix orthonormal_range(const Matrix& a, std::optional<double> tol) {
  if (a.size() == 0) return Matrix(a.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double threshold =
      tol.value_or(static_cast<double>(std::max(a.rows(), a.cols())) * kEps * sv(0));
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > threshold) ++rank;
  return svd.matrixU().leftCols(rank);
}

EigenDecomposition eigen_decompose(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::NonSquare, "eigen_decompose: not square");
  if (a.rows() > kMaxDimension) {
    throw Error(ErrorCode::TooLarge, "eigen_decompose: dimension above " +
                                         std::to_string(kMaxDimension));
  }
  EigenDecomposition out;
  if (a.rows() == 0) return out;

  Eigen::ComplexSchur<Matrix> schur(a.rows());
  schur.setMaxIterations(100 * a.rows());
  schur.compute(a);
  if (schur.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "eigen_decompose: Schur iteration budget exhausted");
  }
  out.schur_form = schur.matrixT();
  out.schur_vectors = schur.matrixU();
  for (Eigen::Index i = 0; i < a.rows(); ++i) out.values.push_back(out.schur_form(i, i));
  return out;
}

std::vector<Complex> poly_roots(std::span<const Complex> coeffs, double tol) {
  double cmax = 0.0;
  for (const auto& c : coeffs) cmax = std::max(cmax, std::abs(c));
  if (!(cmax > std::numeric_limits<double>::min())) {
    throw Error(ErrorCode::DegenerateAllZero, "poly_roots: every coefficient is zero");
  }
  std::size_t degree = coeffs.size() - 1;
  while (degree > 0 && std::abs(coeffs[degree]) <= tol * cmax) --degree;
  if (degree == 0) return {};

  // Companion matrix in Frobenius form: last row holds -c_k / c_n.
  const Eigen::Index n = static_cast<Eigen::Index>(degree);
  Matrix companion = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) companion(i, i + 1) = 1.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    companion(n - 1, k) = -coeffs[static_cast<std::size_t>(k)] / coeffs[degree];
  }
  return eigen_decompose(companion).values;
}

GeneralizedSchur generalized_schur(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "generalized_schur: need two square matrices of equal size");
  }
  const auto n = static_cast<lapack_int>(a.rows());
  GeneralizedSchur out{a, b, Matrix::Identity(n, n), Matrix::Identity(n, n)};
  if (n == 0) return out;

  Vector alpha(n), beta(n);
  lapack_int sdim = 0;
  const lapack_int info = LAPACKE_zgges(
      LAPACK_COL_MAJOR, 'V', 'V', 'N', nullptr, n, out.s.data(), n, out.t.data(), n, &sdim,
      alpha.data(), beta.data(), out.left.data(), n, out.right.data(), n);
  if (info != 0) {
    throw Error(ErrorCode::ConvergenceFailure, "generalized_schur: QZ failed, info = " +
                                                   std::to_string(info));
  }
  out.s = out.s.triangularView<Eigen::Upper>();
  out.t = out.t.triangularView<Eigen::Upper>();
  return out;
}

void reorder_generalized_schur(GeneralizedSchur& schur, const std::vector<bool>& selected) {
  const auto n = static_cast<lapack_int>(schur.s.rows());
  if (static_cast<lapack_int>(selected.size()) != n) {
    throw Error(ErrorCode::ShapeMismatch, "reorder_generalized_schur: selection size");
  }
  if (n == 0) return;
  std::vector<lapack_logical> select(selected.begin(), selected.end());
  Vector alpha(n), beta(n);
  lapack_int m = 0;
  double pl = 0.0, pr = 0.0;
  double dif[2] = {0.0, 0.0};
  // Explicit workspace: the LAPACKE_ztgsen query path is unreliable for ijob = 0.
  std::vector<lapack_complex_double> work(static_cast<std::size_t>(n * n + 1));
  std::vector<lapack_int> iwork(static_cast<std::size_t>(n + 2));
  const lapack_int info = LAPACKE_ztgsen_work(
      LAPACK_COL_MAJOR, 0, 1, 1, select.data(), n, schur.s.data(), n, schur.t.data(), n,
      alpha.data(), beta.data(), schur.left.data(), n, schur.right.data(), n, &m, &pl, &pr, dif,
      work.data(), static_cast<lapack_int>(work.size()), iwork.data(),
      static_cast<lapack_int>(iwork.size()));
  if (info != 0) {
    throw Error(ErrorCode::ReorderingFailure, "reorder_generalized_schur: swap rejected, info = " +
                                                  std::to_string(info));
  }
  schur.s = schur.s.triangularView<Eigen::Upper>();
  schur.t = schur.t.triangularView<Eigen::Upper>();
}

bool is_effectively_real(Complex z) {
  return std::abs(z.imag()) <= 1e-10 * (1.0 + std::abs(z.real()));
}

bool is_effectively_real(const Vector& v) {
  return std::all_of(v.data(), v.data() + v.size(),
                     [](const Complex& z) { return is_effectively_real(z); });
}

}  // namespace descriptor::num
