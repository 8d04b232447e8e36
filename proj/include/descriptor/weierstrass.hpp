#pragma once

#include "descriptor/pencil.hpp"

namespace descriptor {

/// Non-singular P, Q with
///   P F Q = diag(I_p, Hq),   P G Q = diag(Jp, I_q),
/// Hq nilpotent of index q_star. Jp is block upper triangular rather than a
/// strict Jordan matrix; every quantity the solver derives from it is
/// invariant under similarity of the finite block.
struct WeierstrassDecomposition {
  Pencil pencil;
  Matrix P;
  Matrix Q;
  Matrix Jp;
  Matrix Hq;
  int p = 0;
  int q = 0;
  int q_star = 0;

  auto Qp() const { return Q.leftCols(p); }
  auto Qq() const { return Q.rightCols(q); }
  auto P1() const { return P.topRows(p); }
  auto P2() const { return P.bottomRows(q); }
};

inline constexpr double kDecomposeTol = 1e-10;
inline constexpr double kNilpotencyTol = 1e-8;

WeierstrassDecomposition decompose(const Pencil& pencil, const FiniteSpectrum& spectrum,
                                   double tol = kDecomposeTol);

/// classify + decompose; throws NotRegular for singular pencils.
WeierstrassDecomposition decompose(const Pencil& pencil, double tol = kDecomposeTol);

struct VerifyReport {
  double f_residual = 0.0;  ///< ||P F Q - diag(I_p, Hq)||_F
  double g_residual = 0.0;  ///< ||P G Q - diag(Jp, I_q)||_F
  double nilpotent_residual = 0.0;  ///< ||Hq^q_star||_F
  double cond_p = 1.0;
  double cond_q = 1.0;
};

VerifyReport verify(const WeierstrassDecomposition& decomp, const Pencil& pencil);

/// Smallest k >= 0 with ||H^k|| <= tol * max(1, ||H||)^k. Throws NotNilpotent
/// when no such k <= dim(H) + 1 exists.
int nilpotency_index(const Matrix& h, double tol = kNilpotencyTol);

}  // namespace descriptor
