#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "descriptor/numkernel.hpp"

namespace descriptor::io {

using num::Complex;
using num::Matrix;
using num::Vector;

inline constexpr std::size_t kDefaultHorizon = 20;

/// Input system: a JSON object with keys F, G (row-major nested arrays of
/// reals), optional Y0, optional V (list of vectors), optional horizon.
struct SystemFile {
  Matrix f;
  Matrix g;
  std::optional<Vector> y0;
  std::vector<Vector> v;
  std::size_t horizon = kDefaultHorizon;
};

/// Throws Error(ParseError) on malformed input or violated shape rules.
SystemFile parse_system(std::string_view text);
SystemFile load_system(const std::filesystem::path& path);

struct EigenvalueEntry {
  Complex value;
  int multiplicity = 1;
};

struct Classification {
  /// "regular", "singular_nonsquare" or "singular_identically_zero".
  std::string pencil_class;
  int rows = 0;
  int cols = 0;
  std::optional<int> p;
  std::optional<int> q;
  std::optional<int> q_star;
  std::vector<EigenvalueEntry> eigenvalues;
};

struct ConsistencyEntry {
  bool consistent = false;
  std::vector<Complex> coefficient;
  std::optional<double> distance;
  std::optional<std::vector<Complex>> projected_ic;
};

struct TrajectoryEntry {
  /// "unique", "optimal" or "general".
  std::string kind;
  std::size_t horizon = 0;
  std::vector<Complex> coefficient;
  double max_residual = 0.0;
  std::vector<std::vector<Complex>> states;
};

struct ResidualEntry {
  double max = 0.0;
  double tol = 0.0;
  bool passed = true;
  std::vector<double> per_step;
};

struct Tolerances {
  double zero_determinant = 0.0;
  double decompose = 0.0;
  double consistency = 0.0;
};

struct ResultFile {
  std::string tool_version;
  Tolerances tolerances;
  Classification classification;
  std::optional<ConsistencyEntry> consistency;
  std::optional<TrajectoryEntry> trajectory;
  std::optional<ResidualEntry> residual_report;
};

/// Canonical JSON: fixed field order, two-space indent, floats as %.17g,
/// complex values as a bare number when the imaginary part is zero and as
/// {"re": .., "im": ..} otherwise.
std::string write_result(const ResultFile& result);
ResultFile parse_result(std::string_view text);

/// "k,y1,...,ym" header plus one row per state (real parts). Throws
/// Error(ParseError) if a state is not effectively real.
std::string write_trajectory_csv(const TrajectoryEntry& trajectory);

/// Real-valued complex with the imaginary part cleared when it is below the
/// demotion tolerance.
Complex demote(Complex z);
std::vector<Complex> demote(const Vector& v);

std::string format_double(double x);

}  // namespace descriptor::io
