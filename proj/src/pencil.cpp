#include "descriptor/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace descriptor {

namespace {

double spectral_norm(const Matrix& a) {
  const auto sv = num::singular_values(a);
  return sv.empty() ? 0.0 : sv.front();
}

// Hadamard bound prod_j ||column_j(sF - G)||, an upper bound on |det|.
double hadamard_bound(const Pencil& pencil, Complex s) {
  const Matrix a = s * pencil.f() - pencil.g();
  double bound = 1.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) bound *= a.col(j).norm();
  return bound;
}

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

Complex mean_of(const std::vector<Complex>& xs) {
  Complex sum = 0.0;
  for (const auto& x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

// Is mu a root of multiplicity >= k? The first k Taylor coefficients of
// p(mu + x) must vanish relative to the magnitudes that formed them.
bool is_multiple_root(const std::vector<Complex>& coeffs, Complex mu, std::size_t k) {
  std::vector<Complex> b = coeffs;
  std::vector<double> bound(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) bound[i] = std::abs(coeffs[i]);
  const double mu_abs = std::max(1.0, std::abs(mu));
  // Repeated synthetic division leaves b[j] = p^(j)(mu) / j!.
  for (std::size_t j = 0; j < k && j < b.size(); ++j) {
    for (std::size_t i = b.size() - 1; i > j; --i) {
      b[i - 1] += mu * b[i];
      bound[i - 1] += mu_abs * bound[i];
    }
    if (std::abs(b[j]) > kZeroDeterminantTol * bound[j]) return false;
  }
  return true;
}

// A k-fold root comes back from the companion matrix as k roots spread by
// about eps^(1/k), far beyond any fixed clustering distance. Merge the
// closest groups while their union still tests as one multiple root.
void merge_multiple_roots(std::vector<std::vector<Complex>>& groups,
                          const std::vector<Complex>& scaled_coeffs, double radius) {
  for (;;) {
    struct Candidate {
      double distance;
      std::size_t a, b;
    };
    std::vector<Candidate> candidates;
    for (std::size_t a = 0; a < groups.size(); ++a) {
      for (std::size_t b = a + 1; b < groups.size(); ++b) {
        const Complex ma = mean_of(groups[a]);
        const double distance = std::abs(ma - mean_of(groups[b]));
        if (distance <= 1e-2 * (radius + std::abs(ma))) candidates.push_back({distance, a, b});
      }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& x, const Candidate& y) { return x.distance < y.distance; });
    bool merged = false;
    for (const auto& c : candidates) {
      std::vector<Complex> joined = groups[c.a];
      joined.insert(joined.end(), groups[c.b].begin(), groups[c.b].end());
      if (is_multiple_root(scaled_coeffs, mean_of(joined) / radius, joined.size())) {
        groups[c.a] = std::move(joined);
        groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(c.b));
        merged = true;
        break;
      }
    }
    if (!merged) return;
  }
}

}  // namespace

Pencil::Pencil(Matrix f, Matrix g) : f_(std::move(f)), g_(std::move(g)) {
  if (f_.rows() != g_.rows() || f_.cols() != g_.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "pencil: F and G must have identical dimensions");
  }
  num::require_finite(f_, "F");
  num::require_finite(g_, "G");
}

Complex Pencil::determinant(Complex s) const {
  if (!is_square()) throw Error(ErrorCode::NonSquare, "determinant of a non-square pencil");
  if (rows() == 0) return 1.0;
  const Matrix a = s * f_ - g_;
  return Eigen::PartialPivLU<Matrix>(a).determinant();
}

Complex CharPoly::operator()(Complex s) const {
  Complex acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * s + *it;
  return acc;
}

CharPoly CharPoly::from_coefficients(std::vector<Complex> coeffs, int dimension, double rel_tol) {
  CharPoly cp;
  cp.coeffs = std::move(coeffs);
  cp.dimension = dimension;
  for (const auto& c : cp.coeffs) cp.scale = std::max(cp.scale, std::abs(c));
  cp.degree = 0;
  for (std::size_t k = 0; k < cp.coeffs.size(); ++k) {
    if (std::abs(cp.coeffs[k]) > rel_tol * cp.scale) cp.degree = static_cast<int>(k);
  }
  return cp;
}

CharPoly char_poly(const Pencil& pencil, double zero_tol) {
  if (!pencil.is_square()) {
    throw Error(ErrorCode::NonSquare, "char_poly: pencil has " + std::to_string(pencil.rows()) +
                                          " rows and " + std::to_string(pencil.cols()) + " columns");
  }
  const auto m = static_cast<int>(pencil.rows());
  if (m == 0) throw Error(ErrorCode::ShapeMismatch, "char_poly: empty pencil");

  using std::numbers::pi;
  const int n = m + 1;
  const double radius = (1.0 + spectral_norm(pencil.g())) / (1.0 + spectral_norm(pencil.f()));
  const Complex rotation = std::polar(1.0, pi / (4.0 * n));

  // Nodes radius * rotation * w^j with w the n-th root of unity; the
  // coefficients of p(rho * rotation * t) come from an inverse DFT.
  std::vector<Complex> values(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    values[static_cast<std::size_t>(j)] =
        pencil.determinant(radius * rotation * std::polar(1.0, 2.0 * pi * j / n));
  }

  CharPoly cp;
  cp.dimension = m;
  cp.node_radius = radius;
  cp.coeffs.resize(static_cast<std::size_t>(n));
  std::vector<double> scaled_magnitude(static_cast<std::size_t>(n));
  Complex unscale = 1.0;
  for (int k = 0; k < n; ++k) {
    Complex acc = 0.0;
    for (int j = 0; j < n; ++j) {
      acc += values[static_cast<std::size_t>(j)] * std::polar(1.0, -2.0 * pi * j * k / n);
    }
    acc /= static_cast<double>(n);
    scaled_magnitude[static_cast<std::size_t>(k)] = std::abs(acc);
    cp.coeffs[static_cast<std::size_t>(k)] = acc / unscale;
    unscale *= radius * rotation;
  }

  // Scale from a second node set, offset by half a step from the first.
  for (int j = 0; j < n; ++j) {
    const Complex s = radius * rotation * std::polar(1.0, 2.0 * pi * (j + 0.5) / n);
    cp.scale = std::max(cp.scale, hadamard_bound(pencil, s));
  }

  cp.degree = -1;
  for (int k = 0; k < n; ++k) {
    if (scaled_magnitude[static_cast<std::size_t>(k)] > zero_tol * cp.scale) cp.degree = k;
  }
  return cp;
}

PencilClass classify(const Pencil& pencil, double tol) {
  if (!pencil.is_square() || pencil.rows() == 0) return SingularNonSquare{};
  CharPoly cp = char_poly(pencil, tol);
  if (cp.degree < 0) return SingularIdenticallyZero{std::move(cp)};
  FiniteSpectrum spectrum = finite_spectrum(cp);
  return Regular{std::move(spectrum), std::move(cp)};
}

bool is_regular(const PencilClass& c) { return std::holds_alternative<Regular>(c); }

FiniteSpectrum finite_spectrum(const CharPoly& cp, std::optional<double> cluster_tol) {
  if (cp.degree < 0) throw Error(ErrorCode::NotRegular, "finite_spectrum: determinant vanishes identically");

  FiniteSpectrum out;
  out.p = cp.degree;
  out.q = cp.dimension - cp.degree;
  if (cp.degree == 0) return out;

  // Root-find in t = s / radius so the coefficients are balanced.
  const double radius = cp.node_radius;
  std::vector<Complex> scaled(static_cast<std::size_t>(cp.degree) + 1);
  double power = 1.0;
  for (std::size_t k = 0; k < scaled.size(); ++k) {
    scaled[k] = cp.coeffs[k] * power;
    power *= radius;
  }
  std::vector<Complex> roots = num::poly_roots(scaled, 0.0);
  for (auto& r : roots) r *= radius;

  const double tol = cluster_tol.value_or(1e-7 * (1.0 + radius));
  DisjointSet clusters(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i) {
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (std::abs(roots[i] - roots[j]) <= tol) clusters.unite(i, j);
    }
  }

  std::vector<std::vector<Complex>> groups;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (clusters.find(i) != i) continue;
    groups.emplace_back();
    for (std::size_t j = 0; j < roots.size(); ++j) {
      if (clusters.find(j) == i) groups.back().push_back(roots[j]);
    }
  }
  merge_multiple_roots(groups, scaled, radius);

  for (const auto& group : groups) {
    Complex mean = mean_of(group);
    if (num::is_effectively_real(mean)) mean = mean.real();
    out.eigenvalues.push_back({mean, static_cast<int>(group.size())});
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), [](const auto& a, const auto& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  return out;
}

}  // namespace descriptor
