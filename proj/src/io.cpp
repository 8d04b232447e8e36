#include "descriptor/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace descriptor::io {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

double real_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where + ": expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(where + ": non-finite number");
  return x;
}

Vector real_vector(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where + ": expected an array of numbers");
  Vector out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = real_number(j[i], where + "[" + std::to_string(i) + "]");
  }
  return out;
}

Matrix real_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where + ": expected a non-empty array of rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) fail(where + ": rows must be non-empty arrays");
  Matrix out(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string row_where = where + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols) fail(row_where + ": ragged row");
    out.row(static_cast<Eigen::Index>(r)) = real_vector(j[r], row_where).transpose();
  }
  return out;
}

json complex_to_json(Complex z) {
  if (z.imag() == 0.0) return z.real();
  json o;
  o["re"] = z.real();
  o["im"] = z.imag();
  return o;
}

Complex complex_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_object() && j.contains("re") && j.contains("im")) {
    return {real_number(j.at("re"), where + ".re"), real_number(j.at("im"), where + ".im")};
  }
  fail(where + ": expected a number or {re, im}");
}

json complex_list(const std::vector<Complex>& v) {
  json out = json::array();
  for (const auto& z : v) out.push_back(complex_to_json(z));
  return out;
}

std::vector<Complex> complex_list_from(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where + ": expected an array");
  std::vector<Complex> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(complex_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void emit(const json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += inner + json(key).dump() + ": ";
        emit(value, out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i > 0) out += ", ";
          emit(j[i], out, indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out += ",\n";
        out += inner;
        emit(j[i], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

template <typename T>
std::optional<T> optional_int(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

std::string format_double(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Complex demote(Complex z) { return num::is_effectively_real(z) ? Complex(z.real(), 0.0) : z; }

std::vector<Complex> demote(const Vector& v) {
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(demote(v(i)));
  return out;
}

SystemFile parse_system(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("system file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("system file must be a JSON object");
  if (!j.contains("F") || !j.contains("G")) fail("system file needs both F and G");

  SystemFile sys;
  sys.f = real_matrix(j.at("F"), "F");
  sys.g = real_matrix(j.at("G"), "G");
  if (sys.f.rows() != sys.g.rows() || sys.f.cols() != sys.g.cols()) {
    fail("F and G must have the same shape");
  }
  if (j.contains("Y0") && !j.at("Y0").is_null()) {
    sys.y0 = real_vector(j.at("Y0"), "Y0");
    if (sys.y0->size() != sys.f.cols()) fail("Y0 length must equal the column count of F");
  }
  if (j.contains("V") && !j.at("V").is_null()) {
    const json& v = j.at("V");
    if (!v.is_array()) fail("V must be an array of vectors");
    for (std::size_t k = 0; k < v.size(); ++k) {
      Vector vk = real_vector(v[k], "V[" + std::to_string(k) + "]");
      if (vk.size() != sys.f.rows()) fail("V[" + std::to_string(k) + "] length must equal the row count of F");
      sys.v.push_back(std::move(vk));
    }
  }
  if (j.contains("horizon")) {
    const json& h = j.at("horizon");
    if (!h.is_number_integer() || h.get<long long>() <= 0) fail("horizon must be a positive integer");
    sys.horizon = static_cast<std::size_t>(h.get<long long>());
  }
  return sys;
}

SystemFile load_system(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_system(buffer.str());
}

std::string write_result(const ResultFile& r) {
  json j;
  j["tool_version"] = r.tool_version;
  j["tolerances"] = {{"zero_determinant", r.tolerances.zero_determinant},
                     {"decompose", r.tolerances.decompose},
                     {"consistency", r.tolerances.consistency}};

  const auto& c = r.classification;
  json cls;
  cls["pencil_class"] = c.pencil_class;
  cls["rows"] = c.rows;
  cls["cols"] = c.cols;
  if (c.p) cls["p"] = *c.p;
  if (c.q) cls["q"] = *c.q;
  if (c.q_star) cls["q_star"] = *c.q_star;
  json eigs = json::array();
  for (const auto& e : c.eigenvalues) {
    json entry;
    entry["value"] = complex_to_json(e.value);
    entry["multiplicity"] = e.multiplicity;
    eigs.push_back(entry);
  }
  cls["eigenvalues"] = eigs;
  j["classification"] = cls;

  if (r.consistency) {
    json cons;
    cons["consistent"] = r.consistency->consistent;
    cons["coefficient"] = complex_list(r.consistency->coefficient);
    if (r.consistency->distance) cons["distance"] = *r.consistency->distance;
    if (r.consistency->projected_ic) cons["projected_ic"] = complex_list(*r.consistency->projected_ic);
    j["consistency"] = cons;
  }
  if (r.trajectory) {
    const auto& t = *r.trajectory;
    json traj;
    traj["kind"] = t.kind;
    traj["horizon"] = t.horizon;
    traj["coefficient"] = complex_list(t.coefficient);
    traj["max_residual"] = t.max_residual;
    json states = json::array();
    for (const auto& s : t.states) states.push_back(complex_list(s));
    traj["states"] = states;
    j["trajectory"] = traj;
  }
  if (r.residual_report) {
    const auto& rr = *r.residual_report;
    json rep;
    rep["max"] = rr.max;
    rep["tol"] = rr.tol;
    rep["passed"] = rr.passed;
    rep["per_step"] = rr.per_step;
    j["residual_report"] = rep;
  }

  std::string out;
  emit(j, out, 0);
  out += "\n";
  return out;
}

ResultFile parse_result(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("result file is not valid JSON: ") + e.what());
  }
  try {
    ResultFile r;
    r.tool_version = j.at("tool_version").get<std::string>();
    const json& tol = j.at("tolerances");
    r.tolerances = {tol.at("zero_determinant").get<double>(), tol.at("decompose").get<double>(),
                    tol.at("consistency").get<double>()};

    const json& cls = j.at("classification");
    r.classification.pencil_class = cls.at("pencil_class").get<std::string>();
    r.classification.rows = cls.at("rows").get<int>();
    r.classification.cols = cls.at("cols").get<int>();
    r.classification.p = optional_int<int>(cls, "p");
    r.classification.q = optional_int<int>(cls, "q");
    r.classification.q_star = optional_int<int>(cls, "q_star");
    for (const auto& e : cls.at("eigenvalues")) {
      r.classification.eigenvalues.push_back(
          {complex_from_json(e.at("value"), "eigenvalue"), e.at("multiplicity").get<int>()});
    }

    if (j.contains("consistency")) {
      const json& cons = j.at("consistency");
      ConsistencyEntry entry;
      entry.consistent = cons.at("consistent").get<bool>();
      entry.coefficient = complex_list_from(cons.at("coefficient"), "coefficient");
      if (cons.contains("distance")) entry.distance = cons.at("distance").get<double>();
      if (cons.contains("projected_ic")) {
        entry.projected_ic = complex_list_from(cons.at("projected_ic"), "projected_ic");
      }
      r.consistency = entry;
    }
    if (j.contains("trajectory")) {
      const json& traj = j.at("trajectory");
      TrajectoryEntry t;
      t.kind = traj.at("kind").get<std::string>();
      t.horizon = traj.at("horizon").get<std::size_t>();
      t.coefficient = complex_list_from(traj.at("coefficient"), "coefficient");
      t.max_residual = traj.at("max_residual").get<double>();
      for (const auto& s : traj.at("states")) t.states.push_back(complex_list_from(s, "state"));
      r.trajectory = t;
    }
    if (j.contains("residual_report")) {
      const json& rep = j.at("residual_report");
      r.residual_report = ResidualEntry{rep.at("max").get<double>(), rep.at("tol").get<double>(),
                                        rep.at("passed").get<bool>(),
                                        rep.at("per_step").get<std::vector<double>>()};
    }
    return r;
  } catch (const json::exception& e) {
    fail(std::string("result file has unexpected layout: ") + e.what());
  }
}

std::string write_trajectory_csv(const TrajectoryEntry& trajectory) {
  std::string out = "k";
  const std::size_t m = trajectory.states.empty() ? 0 : trajectory.states.front().size();
  for (std::size_t i = 1; i <= m; ++i) out += ",y" + std::to_string(i);
  out += "\n";
  for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
    out += std::to_string(k);
    for (const auto& z : trajectory.states[k]) {
      if (!num::is_effectively_real(z)) {
        throw Error(ErrorCode::ParseError, "CSV output needs a real trajectory; state " +
                                               std::to_string(k) + " has imaginary part " +
                                               format_double(z.imag()));
      }
      out += "," + format_double(z.real());
    }
    out += "\n";
  }
  return out;
}

}  // namespace descriptor::io
