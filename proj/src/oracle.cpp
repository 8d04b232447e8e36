#include "descriptor/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace descriptor::oracle {

namespace {

using Poly = std::vector<Complex>;

Poly multiply(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, Complex(0.0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

void accumulate(Poly& acc, const Poly& term, double sign) {
  if (acc.size() < term.size()) acc.resize(term.size(), Complex(0.0));
  for (std::size_t i = 0; i < term.size(); ++i) acc[i] += sign * term[i];
}

// Laplace expansion along the first remaining row; `cols` lists the
// surviving column indices.
Poly expand(const std::vector<std::vector<Poly>>& entries, std::size_t row,
            const std::vector<std::size_t>& cols) {
  if (cols.empty()) return {Complex(1.0)};
  Poly det{Complex(0.0)};
  double sign = 1.0;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    std::vector<std::size_t> rest;
    rest.reserve(cols.size() - 1);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (k != c) rest.push_back(cols[k]);
    }
    accumulate(det, multiply(entries[row][cols[c]], expand(entries, row + 1, rest)), sign);
    sign = -sign;
  }
  return det;
}

}  // namespace

ResidualReport residual_check(const Matrix& f, const Matrix& g, std::span<const Vector> inputs,
                              std::span<const Vector> states, double tol) {
  if (f.rows() != g.rows() || f.cols() != g.cols()) {
    throw std::invalid_argument("residual_check: F and G differ in shape");
  }
  const std::size_t steps = states.empty() ? 0 : states.size() - 1;
  for (const auto& y : states) {
    if (y.size() != f.cols()) throw std::invalid_argument("residual_check: state length mismatch");
  }
  if (!inputs.empty()) {
    if (inputs.size() < steps) throw std::invalid_argument("residual_check: too few inputs");
    for (std::size_t k = 0; k < steps; ++k) {
      if (inputs[k].size() != f.rows()) {
        throw std::invalid_argument("residual_check: input length mismatch");
      }
    }
  }

  ResidualReport report;
  report.tol = tol;
  report.per_step.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      Complex r = inputs.empty() ? Complex(0.0) : -inputs[k](i);
      for (Eigen::Index j = 0; j < f.cols(); ++j) {
        r += f(i, j) * states[k + 1](j) - g(i, j) * states[k](j);
      }
      worst = std::max(worst, std::abs(r));
    }
    report.per_step.push_back(worst);
    report.max = std::max(report.max, worst);
  }
  report.passed = report.max <= tol;
  return report;
}

std::vector<Complex> det_poly_exact(const Matrix& f, const Matrix& g) {
  if (f.rows() != f.cols() || g.rows() != g.cols() || f.rows() != g.rows()) {
    throw std::invalid_argument("det_poly_exact: need square F, G of equal size");
  }
  const auto m = static_cast<std::size_t>(f.rows());
  if (m > static_cast<std::size_t>(kMaxExactDimension)) {
    throw std::length_error("det_poly_exact: dimension " + std::to_string(m) + " exceeds " +
                            std::to_string(kMaxExactDimension));
  }
  std::vector<std::vector<Poly>> entries(m, std::vector<Poly>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const auto r = static_cast<Eigen::Index>(i);
      const auto c = static_cast<Eigen::Index>(j);
      entries[i][j] = {-g(r, c), f(r, c)};
    }
  }
  std::vector<std::size_t> cols(m);
  for (std::size_t j = 0; j < m; ++j) cols[j] = j;
  Poly det = expand(entries, 0, cols);
  det.resize(m + 1, Complex(0.0));
  return det;
}

double svd_projection_distance(const Matrix& basis, const Vector& y) {
  if (basis.rows() != y.size()) {
    throw std::invalid_argument("svd_projection_distance: basis rows differ from vector length");
  }
  if (basis.cols() == 0) return y.norm();
  Eigen::JacobiSVD<Matrix> svd(basis, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cutoff = static_cast<double>(std::max(basis.rows(), basis.cols())) *
                        std::numeric_limits<double>::epsilon() * sv(0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  const Matrix u = svd.matrixU().leftCols(rank);
  return (y - u * (u.adjoint() * y)).norm();
}

}  // namespace descriptor::oracle
