#include "descriptor/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "descriptor/io.hpp"
#include "descriptor/oracle.hpp"
#include "descriptor/solver.hpp"

namespace descriptor::cli {

namespace {

struct Options {
  std::string path;
  std::optional<double> tol;
  std::string output;
  std::string format = "json";
  bool verify = false;
  bool pad_zero = false;
  bool extend_forced = false;
  bool optimal = false;
  bool unique = false;
  bool automatic = false;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::MissingY0:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::NonFinite:
      return kParseError;
    case ErrorCode::NotConsistent:
      return kNotConsistent;
    case ErrorCode::InsufficientHorizon:
      return kInsufficientHorizon;
    default:
      return kNumericalFailure;
  }
}

double consistency_tolerance(const Options& opts) {
  if (opts.tol) return *opts.tol;
  if (const char* env = std::getenv(kToleranceEnv); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const double value = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(value > 0.0)) {
      throw Error(ErrorCode::ParseError,
                  std::string(kToleranceEnv) + " must be a positive number, got '" + env + "'");
    }
    return value;
  }
  return kConsistencyTol;
}

// Everything a command needs once the file has been read and classified.
struct Analysis {
  io::SystemFile system;
  Pencil pencil;
  PencilClass pencil_class;
  std::optional<WeierstrassDecomposition> decomposition;
  io::ResultFile result;
};

Analysis analyze_file(const Options& opts, double consistency_tol) {
  io::SystemFile sys = io::load_system(opts.path);
  Pencil pencil(sys.f, sys.g);
  PencilClass cls = classify(pencil);

  io::ResultFile result;
  result.tool_version = kToolVersion;
  result.tolerances = {kZeroDeterminantTol, kDecomposeTol, consistency_tol};
  result.classification.rows = static_cast<int>(pencil.rows());
  result.classification.cols = static_cast<int>(pencil.cols());

  std::optional<WeierstrassDecomposition> decomp;
  if (const auto* regular = std::get_if<Regular>(&cls)) {
    decomp = decompose(pencil, regular->spectrum);
    result.classification.pencil_class = "regular";
    result.classification.p = decomp->p;
    result.classification.q = decomp->q;
    result.classification.q_star = decomp->q_star;
    for (const auto& e : regular->spectrum.eigenvalues) {
      result.classification.eigenvalues.push_back({io::demote(e.value), e.multiplicity});
    }
  } else if (std::holds_alternative<SingularNonSquare>(cls)) {
    result.classification.pencil_class = "singular_nonsquare";
  } else {
    result.classification.pencil_class = "singular_identically_zero";
  }
  return {std::move(sys), std::move(pencil), std::move(cls), std::move(decomp), std::move(result)};
}

InputSequence inputs_of(const Analysis& a, const Options& opts) {
  if (a.system.v.empty()) return InputSequence::zero(a.pencil.rows());
  return InputSequence(a.system.v, opts.pad_zero);
}

const WeierstrassDecomposition& require_regular(const Analysis& a) {
  if (!a.decomposition) {
    throw Error(ErrorCode::NotRegular,
                "pencil is " + a.result.classification.pencil_class + "; no solution theory applies");
  }
  return *a.decomposition;
}

InitialCondition require_y0(const Analysis& a) {
  if (!a.system.y0) throw Error(ErrorCode::MissingY0, "system file has no Y0");
  return {*a.system.y0};
}

io::ConsistencyEntry consistency_entry(const ConsistencyVerdict& verdict) {
  io::ConsistencyEntry entry;
  if (const auto* c = std::get_if<Consistent>(&verdict)) {
    entry.consistent = true;
    entry.coefficient = io::demote(c->coefficient);
  } else {
    const auto& n = std::get<NonConsistent>(verdict);
    entry.consistent = false;
    entry.coefficient = io::demote(n.coefficient);
    entry.distance = n.distance;
    entry.projected_ic = io::demote(n.projected_ic);
  }
  return entry;
}

const char* kind_name(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::Unique: return "unique";
    case TrajectoryKind::Optimal: return "optimal";
    case TrajectoryKind::General: return "general";
  }
  return "general";
}

io::TrajectoryEntry trajectory_entry(const Trajectory& t) {
  io::TrajectoryEntry entry;
  entry.kind = kind_name(t.kind);
  entry.horizon = t.horizon();
  entry.coefficient = io::demote(t.coefficient);
  entry.max_residual = t.max_residual;
  for (const auto& s : t.states) entry.states.push_back(io::demote(s));
  return entry;
}

io::ResidualEntry residual_entry(const Analysis& a, const InputSequence& v, const Trajectory& t) {
  std::vector<oracle::Vector> inputs;
  if (!v.is_zero()) {
    for (std::size_t k = 0; k < t.horizon(); ++k) inputs.push_back(v.at(k));
  }
  double state_scale = 0.0;
  for (const auto& s : t.states) state_scale = std::max(state_scale, s.cwiseAbs().maxCoeff());
  const double matrix_scale = a.pencil.f().cwiseAbs().rowwise().sum().maxCoeff() +
                              a.pencil.g().cwiseAbs().rowwise().sum().maxCoeff();
  const double tol = 1e-8 * std::max(1.0, matrix_scale * state_scale);
  const oracle::ResidualReport report =
      oracle::residual_check(a.pencil.f(), a.pencil.g(), inputs, t.states, tol);
  return {report.max, report.tol, report.passed, report.per_step};
}

void emit(const Options& opts, const std::string& text, std::ostream& out) {
  if (opts.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(opts.output);
  if (!file) throw Error(ErrorCode::ParseError, "cannot write " + opts.output);
  file << text;
}

int cmd_analyze(const Options& opts, std::ostream& out) {
  Analysis a = analyze_file(opts, consistency_tolerance(opts));
  emit(opts, io::write_result(a.result), out);
  return kOk;
}

int cmd_check(const Options& opts, std::ostream& out) {
  const double tol = consistency_tolerance(opts);
  Analysis a = analyze_file(opts, tol);
  const InitialCondition ic = require_y0(a);
  const auto& d = require_regular(a);
  a.result.consistency = consistency_entry(check_consistency(d, ic, inputs_of(a, opts), tol));
  emit(opts, io::write_result(a.result), out);
  return kOk;
}

int cmd_solve(const Options& opts, std::ostream& out) {
  const double tol = consistency_tolerance(opts);
  Analysis a = analyze_file(opts, tol);
  const InitialCondition ic = require_y0(a);
  const auto& d = require_regular(a);
  const InputSequence v = inputs_of(a, opts);
  const bool zero_inputs = v.is_zero() || v.stored_all_zero();

  const ConsistencyVerdict verdict = check_consistency(d, ic, v, tol);
  a.result.consistency = consistency_entry(verdict);
  const bool consistent = std::holds_alternative<Consistent>(verdict);

  const bool want_unique = opts.unique || (!opts.optimal && consistent);
  std::optional<Trajectory> trajectory;
  if (want_unique) {
    trajectory = unique_solution(d, ic, v, a.system.horizon, tol);
  } else if (zero_inputs) {
    trajectory = optimal_solution(d, ic, a.system.horizon);
  } else if (opts.extend_forced) {
    trajectory = optimal_solution_with_input(d, ic, v, a.system.horizon);
  } else {
    throw Error(ErrorCode::NotConsistent,
                "the optimal solution is defined for zero inputs only; "
                "pass --extend-forced to project y0 - Q D_0 instead");
  }

  a.result.trajectory = trajectory_entry(*trajectory);
  if (opts.verify) {
    const InputSequence none = InputSequence::zero(a.pencil.rows());
    a.result.residual_report =
        residual_entry(a, !want_unique && zero_inputs ? none : v, *trajectory);
  }

  if (opts.format == "csv") {
    emit(opts, io::write_trajectory_csv(*a.result.trajectory), out);
  } else {
    emit(opts, io::write_result(a.result), out);
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Analyze and solve descriptor systems F y[k+1] = G y[k] + v[k]",
               "descriptor_solve"};
  app.require_subcommand(1);
  Options opts;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("file", opts.path, "System definition (JSON)")->required();
    cmd->add_option("--tol", opts.tol,
                    std::string("Consistency tolerance factor (default 1e-8, env ") +
                        kToleranceEnv + ")")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--output,-o", opts.output, "Write the result here instead of stdout");
    cmd->add_flag("--pad-zero", opts.pad_zero,
                  "Extend V with zeros where the anticausal sum needs future inputs");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "Classify the pencil and report its spectrum");
  add_common(analyze);
  CLI::App* check = app.add_subcommand("check", "Classify the initial condition");
  add_common(check);
  CLI::App* solve = app.add_subcommand("solve", "Compute the unique or optimal trajectory");
  add_common(solve);
  auto* optimal = solve->add_flag("--optimal", opts.optimal, "Always use the least-squares projection");
  auto* unique = solve->add_flag("--unique", opts.unique, "Require a consistent initial condition");
  auto* automatic = solve->add_flag("--auto", opts.automatic, "Unique when consistent, else optimal (default)");
  optimal->excludes(unique)->excludes(automatic);
  unique->excludes(automatic);
  solve->add_flag("--verify", opts.verify, "Append the independent residual report");
  solve->add_flag("--extend-forced", opts.extend_forced,
                  "Allow the optimal projection with nonzero inputs");
  solve->add_option("--format", opts.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("descriptor_solve");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }

  try {
    if (*analyze) return cmd_analyze(opts, out);
    if (*check) return cmd_check(opts, out);
    return cmd_solve(opts, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

}  // namespace descriptor::cli
