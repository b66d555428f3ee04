#include "edchan/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "edchan/channel.hpp"
#include "edchan/cpcheck.hpp"
#include "edchan/dynamics.hpp"
#include "edchan/fixtures.hpp"
#include "edchan/io.hpp"

namespace edchan::cli {

namespace {

using io::Json;

constexpr double kDefaultTol = 1e-9;

struct Config {
  std::string input;
  std::string output;
  std::string initial_state;
  std::optional<double> tol;
  std::optional<double> t_max;
  std::optional<std::size_t> steps;
  std::uint64_t seed = 1;
  std::size_t samples = 100000;
  bool list = false;
  std::string demo_name;
};

/// A command's result: the text to emit and the exit code.
struct Outcome {
  std::string text;
  int code = kExitOk;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double resolve_tol(const Config& cfg) {
  double tol = kDefaultTol;
  if (const char* env = std::getenv("EDCHAN_TOL"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    tol = std::strtod(env, &end);
    if (end == env || *end != '\0') throw UsageError("EDCHAN_TOL is not a number");
  }
  if (cfg.tol) tol = *cfg.tol;
  if (!std::isfinite(tol) || tol <= 0.0) throw UsageError("tolerance must be positive");
  return tol;
}

std::string read_text(const std::string& path) {
  std::ostringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    buf << in.rdbuf();
  }
  return buf.str();
}

Json load_document(const std::string& input) {
  if (input.empty()) throw UsageError("--input is required");
  if (input.starts_with("demo:")) return fixtures::document(input.substr(5));
  return io::parse(read_text(input));
}

io::GridSpec resolve_grid(const Config& cfg, const Json& doc) {
  io::GridSpec grid = io::grid_from_json(doc).value_or(io::GridSpec{});
  if (cfg.t_max) grid.t_max = *cfg.t_max;
  if (cfg.steps) grid.steps = *cfg.steps;
  if (!std::isfinite(grid.t_max) || grid.t_max <= 0.0) throw UsageError("t_max must be positive");
  if (grid.steps < 2) throw UsageError("steps must be at least 2");
  return grid;
}

EDMap load_edmap(const Json& doc) {
  const std::string type = io::document_type(doc);
  if (type != "edmap") throw io::FormatError("document.type: expected \"edmap\", got \"" + type + "\"");
  return io::edmap_from_json(doc);
}

Json verify_report(const EDMap& map, const Config& cfg, double tol) {
  const EdCpReport cp = is_cp_ed(map, tol);
  const bool tp = is_trace_preserving(map, tol);

  Json ball = nullptr;
  if (is_cp(map.phi(), tol).psd) {
    const KrausSet kraus = canonical_kraus(map.phi(), tol);
    const BallDecomposition bd = ball_decompose(map.b(), kraus, map.gamma(), tol);
    ball = Json{{"member", bd.member},
                {"norm_sq", bd.norm_sq},
                {"residual", bd.residual},
                {"beta", io::to_json(std::span<const Complex>(bd.beta))}};
  }

  Json report{{"cp", cp.cp},
              {"tp", tp},
              {"trace_nonincreasing_phi", is_trace_nonincreasing(map.phi(), tol)},
              {"min_choi_eigenvalue", cp.min_choi_eigenvalue},
              {"omega_cp", cp.omega_cp},
              {"omega_min_eigenvalue", cp.omega_min_eigenvalue},
              {"damped_phi_cp", cp.damped_phi_cp},
              {"damped_phi_min_eigenvalue", cp.damped_phi_min_eigenvalue},
              {"branch", to_string(cp.branch)},
              {"ball", ball},
              {"d_e", map.d_e()},
              {"d_g", map.d_g()},
              {"tol", tol},
              {"witnesses", Json::array()}};

  if (map.d_g() == 1) {
    const PositivityVerdict pv = is_positive_ed_dg1(map, cfg.samples, tol, cfg.seed);
    Json positive{{"status", to_string(pv.status)},
                  {"samples_drawn", pv.samples_drawn},
                  {"seed", cfg.seed},
                  {"one_sided", true}};
    if (pv.not_positive()) {
      positive["source"] = pv.source;
      report["witnesses"].push_back(Json{{"source", pv.source},
                                         {"vector", io::to_json(std::span<const Complex>(pv.witness))},
                                         {"min_eigenvalue", pv.witness_min_eigenvalue}});
    }
    report["positive"] = positive;
  }
  return report;
}

Outcome cmd_verify(const Config& cfg) {
  const double tol = resolve_tol(cfg);
  const EDMap map = load_edmap(load_document(cfg.input));
  const Json report = verify_report(map, cfg, tol);
  const bool ok = report["cp"].get<bool>() && report["tp"].get<bool>();
  return {io::dump_canonical(report), ok ? kExitOk : kExitNegative};
}

Outcome cmd_kraus(const Config& cfg) {
  const double tol = resolve_tol(cfg);
  const EDMap map = load_edmap(load_document(cfg.input));
  std::vector<BlockOperator> ops;
  try {
    ops = explicit_kraus_ed(map, tol);
  } catch (const NotCompletelyPositiveError& e) {
    return {io::dump_canonical(Json{{"cp", false}, {"error", e.what()}}), kExitNegative};
  }
  const LinearMap rebuilt = map_from_kraus(to_kraus_set(ops));
  Json operators = Json::array();
  for (const auto& op : ops) operators.push_back(io::to_json(op));
  const Json report{{"cp", true},
                    {"d_e", map.d_e()},
                    {"d_g", map.d_g()},
                    {"count", ops.size()},
                    {"operators", operators},
                    {"reconstruction_error", max_abs_diff(rebuilt.matrix(), map.full_map().matrix())},
                    {"tol", tol}};
  return {io::dump_canonical(report), kExitOk};
}

CMatrix load_initial_state(const Config& cfg, std::size_t d_e, std::size_t d_g) {
  const std::size_t d = d_e + d_g;
  if (cfg.initial_state.empty()) {
    CMatrix rho(d, d);
    rho(0, 0) = rho(0, d_e) = rho(d_e, 0) = rho(d_e, d_e) = 0.5;
    return rho;
  }
  const Json doc = io::parse(read_text(cfg.initial_state));
  const Json& m = doc.is_object() && doc.contains("state") ? doc["state"] : doc;
  CMatrix rho = io::matrix_from_json(m, "state");
  if (rho.rows() != d || rho.cols() != d) {
    throw io::FormatError("state: expected a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
  }
  if (!is_hermitian(rho, 1e-10)) throw io::FormatError("state: must be hermitian");
  if (min_eigenvalue_hermitian(rho) < -1e-10) throw io::FormatError("state: must be positive semidefinite");
  if (std::abs(rho.trace() - 1.0) > 1e-10) throw io::FormatError("state: must have unit trace");
  return rho;
}

Outcome cmd_evolve(const Config& cfg) {
  const double tol = resolve_tol(cfg);
  const Json doc = load_document(cfg.input);
  const io::DynamicsInput input = io::dynamics_from_json(doc);
  const ChannelTrajectory traj = io::trajectory_of(input, resolve_grid(cfg, doc));
  const std::size_t d_e = traj.maps.front().d_e();
  const std::size_t d_g = traj.maps.front().d_g();
  const BlockOperator x0 = BlockOperator::from_full(load_initial_state(cfg, d_e, d_g), d_e, d_g);

  std::string csv = "t,tr_ee,tr_gg,coherence_norm,total_trace,min_propagator_choi_eig\n";
  for (std::size_t n = 0; n < traj.size(); ++n) {
    const BlockOperator x = apply(traj.maps[n], x0);
    std::string prop = "nan";
    try {
      const EDMap step = n == 0 ? traj.maps[0] : propagator(traj, n, n - 1);
      prop = io::format_double(is_cp_ed(step, tol).min_choi_eigenvalue);
    } catch (const NonInvertibleError&) {
    }
    csv += io::format_double(traj.grid[n]) + "," + io::format_double(x.ee.trace().real()) + "," +
           io::format_double(x.gg.trace().real()) + "," + io::format_double(x.eg.frobenius_norm()) +
           "," + io::format_double(x.trace().real()) + "," + prop + "\n";
  }
  return {csv, kExitOk};
}

Json divisibility_report(const ChannelTrajectory& traj, double tol) {
  const DivisibilityReport div = is_cp_divisible(traj, tol);
  bool maps_cp = true;
  double min_map = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const EdCpReport rep = is_cp_ed(traj.maps[i], tol);
    maps_cp = maps_cp && rep.cp;
    if (i == 0 || rep.min_choi_eigenvalue < min_map) min_map = rep.min_choi_eigenvalue;
  }
  const auto [i, j] = div.worst_pair;
  return Json{{"cp_divisible", div.cp_divisible},
              {"min_eigenvalue", div.min_eigenvalue},
              {"worst_pair", Json::array({i, j})},
              {"worst_times", Json::array({traj.grid[i], traj.grid[j]})},
              {"step_min_eigenvalues", div.step_min_eigenvalues},
              {"maps_cp", maps_cp},
              {"min_map_choi_eigenvalue", min_map},
              {"points", traj.size()},
              {"t_max", traj.grid.back()},
              {"tol", tol}};
}

Outcome cmd_divisibility(const Config& cfg) {
  const double tol = resolve_tol(cfg);
  const Json doc = load_document(cfg.input);
  const io::DynamicsInput input = io::dynamics_from_json(doc);
  const io::GridSpec grid = std::holds_alternative<ChannelTrajectory>(input) ? io::GridSpec{} : resolve_grid(cfg, doc);
  const ChannelTrajectory traj = io::trajectory_of(input, grid);
  if (traj.size() < 2) throw UsageError("divisibility needs at least two grid points");
  const Json report = divisibility_report(traj, tol);
  return {io::dump_canonical(report), report["cp_divisible"].get<bool>() ? kExitOk : kExitNegative};
}

Outcome cmd_demo(const Config& cfg) {
  if (cfg.list) {
    Json items = Json::array();
    for (const auto& f : fixtures::list()) items.push_back(Json{{"name", f.name}, {"description", f.description}});
    return {io::dump_canonical(Json{{"fixtures", items}}), kExitOk};
  }
  if (!cfg.demo_name.empty()) return {io::dump_canonical(fixtures::document(cfg.demo_name)), kExitOk};

  const double tol = resolve_tol(cfg);
  Json checks = Json::array();
  bool all = true;
  auto record = [&](const std::string& name, const std::string& claim, bool pass) {
    checks.push_back(Json{{"fixture", name}, {"claim", claim}, {"pass", pass}});
    all = all && pass;
  };

  Config quick = cfg;
  quick.samples = std::min<std::size_t>(cfg.samples, 10000);
  const Json ad = verify_report(io::edmap_from_json(fixtures::document("amplitude_damping")), quick, tol);
  record("amplitude_damping", "cp and tp", ad["cp"].get<bool>() && ad["tp"].get<bool>());
  const Json qb = verify_report(io::edmap_from_json(fixtures::document("qubit_non_cp")), quick, tol);
  record("qubit_non_cp", "tp, not cp, not positive",
         qb["tp"].get<bool>() && !qb["cp"].get<bool>() && qb["positive"]["status"] == "NotPositive");

  for (const char* name : {"semigroup", "non_cp_divisible"}) {
    const Json doc = fixtures::document(name);
    const ChannelTrajectory traj =
        io::trajectory_of(io::dynamics_from_json(doc), *io::grid_from_json(doc));
    const Json rep = divisibility_report(traj, tol);
    const bool divisible = rep["cp_divisible"].get<bool>();
    if (std::string(name) == "semigroup") {
      record(name, "cp-divisible", divisible);
    } else {
      record(name, "cp at every time, not cp-divisible", rep["maps_cp"].get<bool>() && !divisible);
    }
  }
  return {io::dump_canonical(Json{{"checks", checks}, {"pass", all}}), all ? kExitOk : kExitNegative};
}

void add_common(CLI::App* sub, Config& cfg, bool dynamics) {
  sub->add_option("--input", cfg.input, "input JSON file, '-' for stdin, or demo:<name>");
  sub->add_option("--output", cfg.output, "write the report here instead of stdout");
  sub->add_option("--tol", cfg.tol, "eigenvalue tolerance (default 1e-9, or EDCHAN_TOL)");
  sub->add_option("--seed", cfg.seed, "seed for the positivity sampler");
  sub->add_option("--samples", cfg.samples, "positivity sampler draws");
  if (dynamics) {
    sub->add_option("--t-max", cfg.t_max, "final time of the uniform grid");
    sub->add_option("--steps", cfg.steps, "number of grid steps (>= 2)");
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"excitation-damping channel toolkit"};
  app.name("edchan");
  app.require_subcommand(1, 1);

  auto* verify = app.add_subcommand("verify", "CP, TP, positivity and Kraus-ball report for a map");
  add_common(verify, cfg, false);
  auto* kraus = app.add_subcommand("kraus", "block Kraus operators of a CP map");
  add_common(kraus, cfg, false);
  auto* evolve = app.add_subcommand("evolve", "CSV observables along a trajectory");
  add_common(evolve, cfg, true);
  evolve->add_option("--initial-state", cfg.initial_state, "JSON density matrix on H_e (+) H_g");
  auto* divisibility = app.add_subcommand("divisibility", "CP-divisibility report for a trajectory");
  add_common(divisibility, cfg, true);
  auto* demo = app.add_subcommand("demo", "run the built-in fixtures, list them, or print one");
  add_common(demo, cfg, false);
  demo->add_flag("--list", cfg.list, "list the built-in fixtures");
  demo->add_option("name", cfg.demo_name, "print this fixture as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  Outcome outcome;
  try {
    if (verify->parsed()) {
      outcome = cmd_verify(cfg);
    } else if (kraus->parsed()) {
      outcome = cmd_kraus(cfg);
    } else if (evolve->parsed()) {
      outcome = cmd_evolve(cfg);
    } else if (divisibility->parsed()) {
      outcome = cmd_divisibility(cfg);
    } else {
      outcome = cmd_demo(cfg);
    }
  } catch (const std::exception& e) {
    err << "edchan: error: " << e.what() << "\n";
    return kExitInputError;
  }

  if (cfg.output.empty()) {
    out << outcome.text;
  } else {
    std::ofstream file(cfg.output, std::ios::binary);
    file << outcome.text;
    if (!file) {
      err << "edchan: error: cannot write " << cfg.output << "\n";
      return kExitInputError;
    }
  }
  return outcome.code;
}

}  // namespace edchan::cli
