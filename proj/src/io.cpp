#include "edchan/io.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace edchan::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw FormatError(where + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field \"") + key + "\"");
  return *it;
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

double number_field(const Json& j, const char* key, const std::string& where) {
  return number(field(j, key, where), where + "." + key);
}

double number_or(const Json& j, const char* key, double fallback, const std::string& where) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : number(*it, where + "." + key);
}

std::size_t positive_int_field(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_number_integer() || v.get<long long>() <= 0) {
    fail(where + "." + key, "expected a positive integer");
  }
  return v.get<std::size_t>();
}

const Json& array_field(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_array()) fail(where + "." + key, "expected an array");
  return v;
}

std::size_t exact_sqrt(std::size_t n, const std::string& where) {
  const auto r = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (r * r != n || r == 0) fail(where, "row count is not a positive square");
  return r;
}

void expect_shape(const CMatrix& m, std::size_t rows, std::size_t cols, const std::string& where) {
  if (m.rows() != rows || m.cols() != cols) {
    fail(where, "expected a " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

std::vector<CMatrix> matrix_list(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of matrices");
  std::vector<CMatrix> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(matrix_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

/// Arrays without objects and at most two levels deep print on one line.
bool prints_inline(const Json& j, int depth = 1) {
  if (!j.is_array()) return !j.is_object();
  if (depth > 2) return false;
  for (const auto& e : j) {
    if (e.is_array() ? !prints_inline(e, depth + 1) : e.is_object()) return false;
  }
  return true;
}

void write(std::string& out, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  const std::string inner(static_cast<std::size_t>(indent + 2), ' ');
  switch (j.type()) {
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      // nlohmann::json objects are std::map-backed, so iteration is key-sorted.
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + Json(it.key()).dump() + ": ";
        write(out, it.value(), indent + 2);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      if (prints_inline(j)) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i > 0) out += ", ";
          write(out, j[i], indent);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out += ",\n";
        out += inner;
        write(out, j[i], indent + 2);
      }
      out += "\n" + pad + "]";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

Json parse(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string dump_canonical(const Json& value) {
  std::string out;
  write(out, value, 0);
  out += "\n";
  return out;
}

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(std::span<const Complex> v) {
  Json out = Json::array();
  for (const auto& z : v) out.push_back(to_json(z));
  return out;
}

Json to_json(const EDMap& map) {
  return Json{{"type", "edmap"},
              {"d_e", map.d_e()},
              {"d_g", map.d_g()},
              {"phi", to_json(map.phi().matrix())},
              {"omega", to_json(map.omega().matrix())},
              {"B", to_json(map.b())},
              {"gamma", map.gamma()}};
}

Json to_json(const BlockOperator& op) {
  return Json{{"ee", to_json(op.ee)}, {"eg", to_json(op.eg)}, {"ge", to_json(op.ge)}, {"gg", to_json(op.gg)}};
}

Json to_json(const SemigroupSpec& spec) {
  Json f = Json::array();
  for (const auto& op : spec.gen.f) f.push_back(to_json(op));
  return Json{{"type", "semigroup"},
              {"H", to_json(spec.gen.h)},
              {"G", to_json(spec.gen.g)},
              {"F", f},
              {"c", to_json(std::span<const Complex>(spec.c))},
              {"epsilon", spec.epsilon},
              {"kappa", spec.kappa},
              {"d_g", spec.d_g()},
              {"psi", to_json(spec.psi.matrix())}};
}

Json to_json(const GeneratorTable& table) {
  Json l = Json::array(), k = Json::array(), psi = Json::array();
  for (std::size_t i = 0; i < table.times.size(); ++i) {
    l.push_back(to_json(table.l[i].matrix()));
    k.push_back(to_json(table.k[i]));
    psi.push_back(to_json(table.psi[i].matrix()));
  }
  return Json{{"type", "table"},
              {"d_e", table.l.front().d_in()},
              {"d_g", table.psi.front().d_out()},
              {"times", table.times},
              {"L", l},
              {"K", k},
              {"psi", psi}};
}

Json to_json(const SinkWindowSpec& spec) {
  return Json{{"type", "sink_window"},
              {"H", to_json(spec.h)},
              {"G", to_json(spec.g)},
              {"kappa", spec.kappa},
              {"window", Json::array({spec.window_start, spec.window_end})},
              {"strength", spec.strength}};
}

Json to_json(const ChannelTrajectory& traj) {
  Json maps = Json::array();
  for (const auto& m : traj.maps) maps.push_back(to_json(m));
  return Json{{"type", "trajectory"}, {"grid", traj.grid}, {"maps", maps}};
}

Json to_json(const GridSpec& grid) { return Json{{"t_max", grid.t_max}, {"steps", grid.steps}}; }

Complex complex_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  fail(where, "expected a number or an [re, im] pair");
}

std::vector<Complex> vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  std::vector<Complex> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(complex_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

CMatrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  std::vector<Complex> entries;
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string row_where = where + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].empty()) fail(row_where, "expected a non-empty row");
    if (i == 0) cols = j[i].size();
    if (j[i].size() != cols) fail(row_where, "rows have different lengths");
    for (std::size_t k = 0; k < cols; ++k) {
      const Complex z = complex_from_json(j[i][k], row_where + "[" + std::to_string(k) + "]");
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail(row_where, "non-finite entry");
      entries.push_back(z);
    }
  }
  return CMatrix(rows, cols, std::move(entries));
}

std::string document_type(const Json& j) {
  if (!j.is_object()) fail("document", "expected a JSON object");
  const auto it = j.find("type");
  if (it == j.end()) return "edmap";
  if (!it->is_string()) fail("document.type", "expected a string");
  return it->get<std::string>();
}

EDMap edmap_from_json(const Json& j) {
  const std::string where = "edmap";
  const std::size_t d_e = positive_int_field(j, "d_e", where);
  const std::size_t d_g = positive_int_field(j, "d_g", where);
  CMatrix phi = matrix_from_json(field(j, "phi", where), where + ".phi");
  CMatrix omega = matrix_from_json(field(j, "omega", where), where + ".omega");
  CMatrix b = matrix_from_json(field(j, "B", where), where + ".B");
  const double gamma = number_field(j, "gamma", where);
  expect_shape(phi, d_e * d_e, d_e * d_e, where + ".phi");
  expect_shape(omega, d_g * d_g, d_e * d_e, where + ".omega");
  expect_shape(b, d_e, d_e, where + ".B");
  if (!(gamma >= 0.0)) fail(where + ".gamma", "must be non-negative");
  return EDMap(LinearMap(d_e, d_e, std::move(phi)), LinearMap(d_e, d_g, std::move(omega)),
               std::move(b), gamma);
}

SemigroupSpec semigroup_from_json(const Json& j) {
  const std::string where = "semigroup";
  SemigroupSpec spec;
  spec.gen.h = matrix_from_json(field(j, "H", where), where + ".H");
  const std::size_t d_e = spec.gen.h.rows();
  expect_shape(spec.gen.h, d_e, d_e, where + ".H");
  spec.gen.g = matrix_from_json(field(j, "G", where), where + ".G");
  expect_shape(spec.gen.g, d_e, d_e, where + ".G");
  if (j.contains("F")) spec.gen.f = matrix_list(j["F"], where + ".F");
  for (std::size_t mu = 0; mu < spec.gen.f.size(); ++mu) {
    expect_shape(spec.gen.f[mu], d_e, d_e, where + ".F[" + std::to_string(mu) + "]");
  }
  if (j.contains("c")) spec.c = vector_from_json(j["c"], where + ".c");
  if (spec.c.size() != spec.gen.f.size()) fail(where + ".c", "needs one entry per F");
  spec.epsilon = number_or(j, "epsilon", 0.0, where);
  spec.kappa = number_or(j, "kappa", 0.0, where);

  if (j.contains("psi")) {
    CMatrix psi = matrix_from_json(j["psi"], where + ".psi");
    const std::size_t d_g = exact_sqrt(psi.rows(), where + ".psi");
    expect_shape(psi, d_g * d_g, d_e * d_e, where + ".psi");
    spec.psi = LinearMap(d_e, d_g, std::move(psi));
  } else if (j.contains("psi_kraus")) {
    const auto ops = matrix_list(j["psi_kraus"], where + ".psi_kraus");
    if (ops.empty()) fail(where + ".psi_kraus", "needs at least one operator");
    const std::size_t d_g = ops.front().rows();
    for (std::size_t m = 0; m < ops.size(); ++m) {
      expect_shape(ops[m], d_g, d_e, where + ".psi_kraus[" + std::to_string(m) + "]");
    }
    spec.psi = LinearMap::from_kraus(ops, d_e, d_g);
  } else {
    fail(where, "needs \"psi\" or \"psi_kraus\"");
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
  return spec;
}

GeneratorTable table_from_json(const Json& j) {
  const std::string where = "table";
  GeneratorTable table;
  const Json& times = array_field(j, "times", where);
  for (std::size_t i = 0; i < times.size(); ++i) {
    table.times.push_back(number(times[i], where + ".times[" + std::to_string(i) + "]"));
  }
  const auto l = matrix_list(array_field(j, "L", where), where + ".L");
  table.k = matrix_list(array_field(j, "K", where), where + ".K");
  const auto psi = matrix_list(array_field(j, "psi", where), where + ".psi");
  if (l.empty() || psi.empty()) fail(where, "needs at least one row");
  const std::size_t d_e = exact_sqrt(l.front().rows(), where + ".L[0]");
  const std::size_t d_g = exact_sqrt(psi.front().rows(), where + ".psi[0]");
  for (std::size_t i = 0; i < l.size(); ++i) {
    expect_shape(l[i], d_e * d_e, d_e * d_e, where + ".L[" + std::to_string(i) + "]");
    table.l.emplace_back(d_e, d_e, l[i]);
  }
  for (std::size_t i = 0; i < psi.size(); ++i) {
    expect_shape(psi[i], d_g * d_g, d_e * d_e, where + ".psi[" + std::to_string(i) + "]");
    table.psi.emplace_back(d_e, d_g, psi[i]);
  }
  try {
    table.validate();
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
  return table;
}

SinkWindowSpec sink_window_from_json(const Json& j) {
  const std::string where = "sink_window";
  SinkWindowSpec spec;
  spec.h = matrix_from_json(field(j, "H", where), where + ".H");
  spec.g = matrix_from_json(field(j, "G", where), where + ".G");
  expect_shape(spec.h, spec.h.rows(), spec.h.rows(), where + ".H");
  expect_shape(spec.g, spec.h.rows(), spec.h.rows(), where + ".G");
  spec.kappa = number_or(j, "kappa", 0.0, where);
  const Json& window = array_field(j, "window", where);
  if (window.size() != 2) fail(where + ".window", "expected [start, end]");
  spec.window_start = number(window[0], where + ".window[0]");
  spec.window_end = number(window[1], where + ".window[1]");
  spec.strength = number_field(j, "strength", where);
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
  return spec;
}

ChannelTrajectory trajectory_from_json(const Json& j) {
  const std::string where = "trajectory";
  ChannelTrajectory traj;
  const Json& grid = array_field(j, "grid", where);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    traj.grid.push_back(number(grid[i], where + ".grid[" + std::to_string(i) + "]"));
  }
  for (const auto& m : array_field(j, "maps", where)) traj.maps.push_back(edmap_from_json(m));
  try {
    traj.validate();
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
  return traj;
}

std::optional<GridSpec> grid_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("grid") || !j["grid"].is_object()) return std::nullopt;
  const Json& g = j["grid"];
  GridSpec grid;
  grid.t_max = number_field(g, "t_max", "grid");
  grid.steps = positive_int_field(g, "steps", "grid");
  return grid;
}

DynamicsInput dynamics_from_json(const Json& j) {
  const std::string type = document_type(j);
  if (type == "semigroup") return semigroup_from_json(j);
  if (type == "table") return table_from_json(j);
  if (type == "sink_window") return sink_window_from_json(j);
  if (type == "trajectory") return trajectory_from_json(j);
  fail("document.type", "\"" + type + "\" is not a dynamics document");
}

ChannelTrajectory trajectory_of(const DynamicsInput& input, const GridSpec& grid) {
  if (const auto* traj = std::get_if<ChannelTrajectory>(&input)) return *traj;
  const std::vector<double> times = uniform_grid(grid.t_max, grid.steps);
  if (const auto* spec = std::get_if<SemigroupSpec>(&input)) return semigroup_trajectory(*spec, times);
  if (const auto* table = std::get_if<GeneratorTable>(&input)) return table_trajectory(*table, times);
  return sink_window_trajectory(std::get<SinkWindowSpec>(input), times);
}

}  // namespace edchan::io
