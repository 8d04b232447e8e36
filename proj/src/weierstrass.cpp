#include "descriptor/weierstrass.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace descriptor {

namespace {

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

Matrix invert(const Matrix& a, const char* what) {
  try {
    return num::solve_square(a, Matrix::Identity(a.rows(), a.cols()));
  } catch (const Error& e) {
    throw Error(ErrorCode::IllConditionedTransform, std::string(what) + ": " + e.what());
  }
}

// Solves F11 R + L F22 = -F12, G11 R + L G22 = -G12 for the p x q blocks
// R, L by stacking both equations into one dense system over vec(R), vec(L).
std::pair<Matrix, Matrix> decouple(const Matrix& f11, const Matrix& f12, const Matrix& f22,
                                   const Matrix& g11, const Matrix& g12, const Matrix& g22) {
  const Eigen::Index p = f11.rows();
  const Eigen::Index q = f22.rows();
  const Eigen::Index n = p * q;
  if (n == 0) return {Matrix(p, q), Matrix(p, q)};

  const auto idx = [p](Eigen::Index i, Eigen::Index j) { return i + j * p; };
  Matrix system = Matrix::Zero(2 * n, 2 * n);
  Vector rhs(2 * n);
  for (Eigen::Index j = 0; j < q; ++j) {
    for (Eigen::Index i = 0; i < p; ++i) {
      const Eigen::Index row = idx(i, j);
      for (Eigen::Index k = 0; k < p; ++k) {
        system(row, idx(k, j)) += f11(i, k);
        system(n + row, idx(k, j)) += g11(i, k);
      }
      for (Eigen::Index k = 0; k < q; ++k) {
        system(row, n + idx(i, k)) += f22(k, j);
        system(n + row, n + idx(i, k)) += g22(k, j);
      }
      rhs(row) = -f12(i, j);
      rhs(n + row) = -g12(i, j);
    }
  }

  Vector x;
  try {
    x = num::solve_square(system, rhs);
  } catch (const Error& e) {
    throw Error(ErrorCode::IllConditionedTransform,
                std::string("generalized Sylvester decoupling: ") + e.what());
  }
  Matrix r = Eigen::Map<Matrix>(x.data(), p, q);
  Matrix l = Eigen::Map<Matrix>(x.data() + n, p, q);
  return {r, l};
}

// Each selected finite eigenvalue must sit near one of the spectrum's
// eigenvalues; otherwise an infinite eigenvalue was taken for a finite one.
bool matches_spectrum(const std::vector<Complex>& values, const FiniteSpectrum& spectrum) {
  return std::all_of(values.begin(), values.end(), [&](const Complex& v) {
    return std::any_of(spectrum.eigenvalues.begin(), spectrum.eigenvalues.end(),
                       [&](const Eigenvalue& e) {
                         return std::abs(v - e.value) <= 1e-3 * (1.0 + std::abs(e.value));
                       });
  });
}

}  // namespace

WeierstrassDecomposition decompose(const Pencil& pencil, const FiniteSpectrum& spectrum,
                                   double tol) {
  if (!pencil.is_square()) throw Error(ErrorCode::NotRegular, "decompose: pencil is not square");
  const auto m = static_cast<int>(pencil.rows());
  const int p = spectrum.p;
  const int q = m - p;
  if (p < 0 || q < 0 || spectrum.q != q) {
    throw Error(ErrorCode::ShapeMismatch, "decompose: spectrum does not match pencil dimension");
  }

  // alpha / beta are the generalized eigenvalues of s F - G.
  num::GeneralizedSchur schur = num::generalized_schur(pencil.g(), pencil.f());
  const Vector alpha = schur.alpha();
  const Vector beta = schur.beta();

  std::vector<double> finiteness(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double a = std::abs(alpha(i));
    const double b = std::abs(beta(i));
    if (a + b == 0.0) {
      throw Error(ErrorCode::NotRegular, "decompose: zero generalized eigenvalue pair (0, 0)");
    }
    finiteness[static_cast<std::size_t>(i)] = b / (a + b);
  }

  // The p most finite positions lead; p itself comes from the determinant
  // degree, which is far less sensitive than the individual beta values.
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return finiteness[static_cast<std::size_t>(a)] > finiteness[static_cast<std::size_t>(b)];
  });
  std::vector<bool> selected(static_cast<std::size_t>(m), false);
  for (int k = 0; k < p; ++k) selected[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = true;

  if (p > 0 && finiteness[static_cast<std::size_t>(order[static_cast<std::size_t>(p - 1)])] <= tol) {
    throw Error(ErrorCode::ReorderingFailure,
                "decompose: a finite eigenvalue is indistinguishable from an infinite one");
  }

  num::reorder_generalized_schur(schur, selected);

  std::vector<Complex> leading;
  for (int i = 0; i < p; ++i) leading.push_back(schur.s(i, i) / schur.t(i, i));
  if (!matches_spectrum(leading, spectrum)) {
    throw Error(ErrorCode::ReorderingFailure,
                "decompose: finite/infinite separation disagrees with the determinant spectrum");
  }

  const Matrix& t = schur.t;  // from F
  const Matrix& s = schur.s;  // from G
  const Matrix f11 = t.topLeftCorner(p, p);
  const Matrix f12 = t.topRightCorner(p, q);
  const Matrix f22 = t.bottomRightCorner(q, q);
  const Matrix g11 = s.topLeftCorner(p, p);
  const Matrix g12 = s.topRightCorner(p, q);
  const Matrix g22 = s.bottomRightCorner(q, q);

  const auto [r, l] = decouple(f11, f12, f22, g11, g12, g22);

  Matrix left_shear = Matrix::Identity(m, m);
  left_shear.topRightCorner(p, q) = l;
  Matrix right_shear = Matrix::Identity(m, m);
  right_shear.topRightCorner(p, q) = r;

  const Matrix f11_inv = invert(f11, "leading block of F");
  const Matrix g22_inv = invert(g22, "trailing block of G");

  WeierstrassDecomposition out{pencil, Matrix(), Matrix(), Matrix(), Matrix(), p, q, 0};
  out.P = block_diag(f11_inv, g22_inv) * left_shear * schur.left.adjoint();
  out.Q = schur.right * right_shear;
  out.Jp = f11_inv * g11;
  out.Hq = g22_inv * f22;

  const double limit = 1.0 / tol;
  if (num::condition_number(out.P) > limit || num::condition_number(out.Q) > limit) {
    throw Error(ErrorCode::IllConditionedTransform, "decompose: transform condition exceeds 1/tol");
  }
  out.q_star = nilpotency_index(out.Hq);
  return out;
}

WeierstrassDecomposition decompose(const Pencil& pencil, double tol) {
  const PencilClass c = classify(pencil);
  const auto* regular = std::get_if<Regular>(&c);
  if (regular == nullptr) throw Error(ErrorCode::NotRegular, "decompose: pencil is singular");
  return decompose(pencil, regular->spectrum, tol);
}

VerifyReport verify(const WeierstrassDecomposition& d, const Pencil& pencil) {
  const Eigen::Index m = pencil.rows();
  if (!pencil.is_square() || d.P.rows() != m || d.P.cols() != m || d.Q.rows() != m ||
      d.Q.cols() != m || d.Jp.rows() != d.p || d.Jp.cols() != d.p || d.Hq.rows() != d.q ||
      d.Hq.cols() != d.q || d.p + d.q != m) {
    throw Error(ErrorCode::ShapeMismatch, "verify: decomposition does not fit the pencil");
  }
  VerifyReport report;
  const Matrix f_target = block_diag(Matrix::Identity(d.p, d.p), d.Hq);
  const Matrix g_target = block_diag(d.Jp, Matrix::Identity(d.q, d.q));
  report.f_residual = (d.P * pencil.f() * d.Q - f_target).norm();
  report.g_residual = (d.P * pencil.g() * d.Q - g_target).norm();

  Matrix power = Matrix::Identity(d.q, d.q);
  for (int k = 0; k < d.q_star; ++k) power = power * d.Hq;
  report.nilpotent_residual = power.norm();
  report.cond_p = num::condition_number(d.P);
  report.cond_q = num::condition_number(d.Q);
  return report;
}

int nilpotency_index(const Matrix& h, double tol) {
  if (h.rows() != h.cols()) throw Error(ErrorCode::NonSquare, "nilpotency_index: not square");
  const Eigen::Index n = h.rows();
  const double scale = std::max(1.0, h.norm());
  Matrix power = Matrix::Identity(n, n);
  double bound = tol;
  for (Eigen::Index k = 0; k <= n + 1; ++k) {
    if (power.norm() <= bound) return static_cast<int>(k);
    power = power * h;
    bound *= scale;
  }
  throw Error(ErrorCode::NotNilpotent, "nilpotency_index: matrix is not numerically nilpotent");
}

}  // namespace descriptor
