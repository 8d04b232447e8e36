#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "descriptor/weierstrass.hpp"

namespace descriptor {

/// Inputs v[0], v[1], ... of the system. An identically-zero sequence needs
/// no storage and extends to any horizon.
class InputSequence {
 public:
  static InputSequence zero(Eigen::Index dim);
  /// Throws ShapeMismatch if the vectors differ in length.
  explicit InputSequence(std::vector<Vector> values, bool pad_with_zeros = false);

  Eigen::Index dim() const noexcept { return dim_; }
  bool is_zero() const noexcept { return zero_; }
  bool pads_with_zeros() const noexcept { return pad_; }
  bool stored_all_zero() const;
  /// Number of stored steps (0 for the zero sequence).
  std::size_t size() const noexcept { return values_.size(); }
  bool covers(std::size_t k) const noexcept { return zero_ || pad_ || k < values_.size(); }
  const std::vector<Vector>& values() const noexcept { return values_; }

  /// v[k]; zero beyond the stored range when padding is enabled, otherwise
  /// throws InsufficientHorizon.
  Vector at(std::size_t k) const;

 private:
  InputSequence() = default;

  std::vector<Vector> values_;
  Eigen::Index dim_ = 0;
  bool zero_ = false;
  bool pad_ = false;
};

struct InitialCondition {
  Vector y0;
};

struct Consistent {
  Vector coefficient;
};
struct NonConsistent {
  double distance = 0.0;
  Vector projected_ic;
  Vector coefficient;
};
using ConsistencyVerdict = std::variant<Consistent, NonConsistent>;

enum class TrajectoryKind { Unique, Optimal, General };

struct Trajectory {
  TrajectoryKind kind = TrajectoryKind::General;
  std::vector<Vector> states;  ///< y[0] ... y[N]
  /// Coefficient of the finite part (C, Z^p_0 or its least-squares
  /// counterpart depending on kind).
  Vector coefficient;
  /// max_k ||F y[k+1] - G y[k] - v[k]||_inf.
  double max_residual = 0.0;

  std::size_t horizon() const noexcept { return states.empty() ? 0 : states.size() - 1; }
};

inline constexpr double kConsistencyTol = 1e-8;

/// D_k = [ sum_{i<k} Jp^{k-i-1} P1 v[i] ; -sum_{i<q_star} Hq^i P2 v[k+i] ].
Vector forcing_term(const WeierstrassDecomposition& d, const InputSequence& v, std::size_t k);

Trajectory general_solution(const WeierstrassDecomposition& d, const Vector& c,
                            const InputSequence& v, std::size_t horizon);

ConsistencyVerdict check_consistency(const WeierstrassDecomposition& d, const InitialCondition& ic,
                                     const InputSequence& v, double tol = kConsistencyTol);

/// Throws NotConsistent when the initial condition admits no solution.
Trajectory unique_solution(const WeierstrassDecomposition& d, const InitialCondition& ic,
                           const InputSequence& v, std::size_t horizon,
                           double tol = kConsistencyTol);

/// Homogeneous system started from the orthogonal projection of y0 onto
/// colspan Qp.
Trajectory optimal_solution(const WeierstrassDecomposition& d, const InitialCondition& ic,
                            std::size_t horizon);

/// ||y0 - Qp (Qp* Qp)^{-1} Qp* y0||_2.
double perturbation_distance(const WeierstrassDecomposition& d, const InitialCondition& ic);

/// Forced extension of optimal_solution: projects y0 - Q D_0 onto colspan Qp
/// and propagates with the inputs. Not part of the homogeneous theory; the
/// CLI only reaches it behind --extend-forced.
Trajectory optimal_solution_with_input(const WeierstrassDecomposition& d,
                                       const InitialCondition& ic, const InputSequence& v,
                                       std::size_t horizon);

}  // namespace descriptor
