#include "descriptor/solver.hpp"

#include <algorithm>
#include <optional>
#include <string>

namespace descriptor {

namespace {

// Jp^k by repeated multiplication, cached across k.
class PowerCache {
 public:
  explicit PowerCache(const Matrix& base) : base_(base) {
    powers_.push_back(Matrix::Identity(base.rows(), base.cols()));
  }
  const Matrix& operator()(std::size_t k) {
    while (powers_.size() <= k) powers_.push_back(powers_.back() * base_);
    return powers_[k];
  }

 private:
  const Matrix& base_;
  std::vector<Matrix> powers_;
};

void require_dim(const WeierstrassDecomposition& d, const Vector& y0) {
  if (y0.size() != d.pencil.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "initial condition has length " +
                                              std::to_string(y0.size()) + ", system has " +
                                              std::to_string(d.pencil.cols()) + " states");
  }
}

void require_inputs(const WeierstrassDecomposition& d, const InputSequence& v,
                    std::optional<std::size_t> last_index) {
  if (!v.is_zero() && v.dim() != d.pencil.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "input vectors have length " + std::to_string(v.dim()) +
                                              ", system has " + std::to_string(d.pencil.rows()) +
                                              " equations");
  }
  if (last_index && !v.covers(*last_index)) {
    throw Error(ErrorCode::InsufficientHorizon,
                "inputs cover " + std::to_string(v.size()) + " steps but step " +
                    std::to_string(*last_index) + " is needed (enable zero padding to extend)");
  }
}

// Highest input index read when forming D_0 ... D_N; none when no input
// enters (horizon 0 and no anticausal window).
std::optional<std::size_t> last_input_index(const WeierstrassDecomposition& d,
                                            std::size_t horizon) {
  if (d.q_star > 0) return horizon + static_cast<std::size_t>(d.q_star) - 1;
  if (horizon > 0) return horizon - 1;
  return std::nullopt;
}

// D_0 ... D_N. The causal block follows x[k+1] = Jp x[k] + P1 v[k], which
// expands to the same convolution sum as forcing_term.
std::vector<Vector> forcing_terms(const WeierstrassDecomposition& d, const InputSequence& v,
                                  std::size_t horizon) {
  const Eigen::Index m = d.pencil.cols();
  std::vector<Vector> out(horizon + 1, Vector::Zero(m));
  if (v.is_zero()) return out;
  require_inputs(d, v, last_input_index(d, horizon));

  const Matrix p1 = d.P1();
  const Matrix p2 = d.P2();
  std::vector<Matrix> h_p2;
  Matrix h_power = Matrix::Identity(d.q, d.q);
  for (int i = 0; i < d.q_star; ++i) {
    h_p2.push_back(h_power * p2);
    h_power = h_power * d.Hq;
  }

  Vector causal = Vector::Zero(d.p);
  for (std::size_t k = 0; k <= horizon; ++k) {
    if (k > 0) causal = d.Jp * causal + p1 * v.at(k - 1);
    Vector anticausal = Vector::Zero(d.q);
    for (std::size_t i = 0; i < h_p2.size(); ++i) anticausal -= h_p2[i] * v.at(k + i);
    out[k].head(d.p) = causal;
    out[k].tail(d.q) = anticausal;
  }
  return out;
}

double max_residual(const Pencil& pencil, const std::vector<Vector>& states,
                    const InputSequence& v) {
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < states.size(); ++k) {
    Vector r = pencil.f() * states[k + 1] - pencil.g() * states[k];
    if (!v.is_zero()) r -= v.at(k);
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

Trajectory propagate(const WeierstrassDecomposition& d, const Vector& c,
                     const std::vector<Vector>& forcing, const InputSequence& v,
                     TrajectoryKind kind) {
  Trajectory out;
  out.kind = kind;
  out.coefficient = c;
  const Matrix qp = d.Qp();
  Vector finite = c;
  out.states.reserve(forcing.size());
  for (std::size_t k = 0; k < forcing.size(); ++k) {
    if (k > 0) finite = d.Jp * finite;
    out.states.push_back(qp * finite + d.Q * forcing[k]);
  }
  out.max_residual = max_residual(d.pencil, out.states, v);
  return out;
}

// Least-squares coefficient of b in colspan Qp; empty when p = 0.
Vector project_coefficient(const WeierstrassDecomposition& d, const Vector& b) {
  if (d.p == 0) return Vector(0);
  return num::qr_least_squares(d.Qp(), b);
}

}  // namespace

InputSequence InputSequence::zero(Eigen::Index dim) {
  InputSequence v;
  v.dim_ = dim;
  v.zero_ = true;
  return v;
}

InputSequence::InputSequence(std::vector<Vector> values, bool pad_with_zeros)
    : values_(std::move(values)), pad_(pad_with_zeros) {
  if (!values_.empty()) dim_ = values_.front().size();
  for (const auto& x : values_) {
    if (x.size() != dim_) throw Error(ErrorCode::ShapeMismatch, "input vectors differ in length");
    num::require_finite(x, "input vector");
  }
  // Zero beyond the stored range only when padding; a short all-zero list
  // without padding still limits the horizon.
  zero_ = pad_ && stored_all_zero();
}

bool InputSequence::stored_all_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](const Vector& x) { return x.isZero(0.0); });
}

Vector InputSequence::at(std::size_t k) const {
  if (k < values_.size()) return values_[k];
  if (zero_ || pad_) return Vector::Zero(dim_);
  throw Error(ErrorCode::InsufficientHorizon,
              "input step " + std::to_string(k) + " requested, only " +
                  std::to_string(values_.size()) + " provided");
}

Vector forcing_term(const WeierstrassDecomposition& d, const InputSequence& v, std::size_t k) {
  const Eigen::Index m = d.pencil.cols();
  if (v.is_zero()) return Vector::Zero(m);
  std::optional<std::size_t> last;
  if (d.q_star > 0) {
    last = k + static_cast<std::size_t>(d.q_star) - 1;
  } else if (k > 0) {
    last = k - 1;
  }
  require_inputs(d, v, last);

  PowerCache jp(d.Jp);
  PowerCache hq(d.Hq);
  const Matrix p1 = d.P1();
  const Matrix p2 = d.P2();
  Vector out = Vector::Zero(m);
  for (std::size_t i = 0; i < k; ++i) out.head(d.p) += jp(k - i - 1) * p1 * v.at(i);
  for (std::size_t i = 0; i < static_cast<std::size_t>(d.q_star); ++i) {
    out.tail(d.q) -= hq(i) * p2 * v.at(k + i);
  }
  return out;
}

Trajectory general_solution(const WeierstrassDecomposition& d, const Vector& c,
                            const InputSequence& v, std::size_t horizon) {
  if (c.size() != d.p) throw Error(ErrorCode::ShapeMismatch, "coefficient length must equal p");
  return propagate(d, c, forcing_terms(d, v, horizon), v, TrajectoryKind::General);
}

ConsistencyVerdict check_consistency(const WeierstrassDecomposition& d, const InitialCondition& ic,
                                     const InputSequence& v, double tol) {
  require_dim(d, ic.y0);
  const Vector offset = d.Q * forcing_terms(d, v, 0).front();
  const Vector target = ic.y0 - offset;
  Vector c = project_coefficient(d, target);
  const Vector fitted = d.Qp() * c;
  const double residual = (target - fitted).norm();
  if (residual <= tol * (1.0 + ic.y0.norm())) return Consistent{std::move(c)};
  return NonConsistent{residual, fitted + offset, std::move(c)};
}

Trajectory unique_solution(const WeierstrassDecomposition& d, const InitialCondition& ic,
                           const InputSequence& v, std::size_t horizon, double tol) {
  const ConsistencyVerdict verdict = check_consistency(d, ic, v, tol);
  const auto* consistent = std::get_if<Consistent>(&verdict);
  if (consistent == nullptr) {
    throw Error(ErrorCode::NotConsistent,
                "initial condition is at distance " +
                    std::to_string(std::get<NonConsistent>(verdict).distance) +
                    " from the consistent set; no solution passes through it");
  }
  return propagate(d, consistent->coefficient, forcing_terms(d, v, horizon), v,
                   TrajectoryKind::Unique);
}

Trajectory optimal_solution(const WeierstrassDecomposition& d, const InitialCondition& ic,
                            std::size_t horizon) {
  require_dim(d, ic.y0);
  const InputSequence none = InputSequence::zero(d.pencil.rows());
  return propagate(d, project_coefficient(d, ic.y0), forcing_terms(d, none, horizon), none,
                   TrajectoryKind::Optimal);
}

double perturbation_distance(const WeierstrassDecomposition& d, const InitialCondition& ic) {
  require_dim(d, ic.y0);
  return (ic.y0 - d.Qp() * project_coefficient(d, ic.y0)).norm();
}

Trajectory optimal_solution_with_input(const WeierstrassDecomposition& d,
                                       const InitialCondition& ic, const InputSequence& v,
                                       std::size_t horizon) {
  require_dim(d, ic.y0);
  const std::vector<Vector> forcing = forcing_terms(d, v, horizon);
  const Vector c = project_coefficient(d, ic.y0 - d.Q * forcing.front());
  return propagate(d, c, forcing, v, TrajectoryKind::Optimal);
}

}  // namespace descriptor
