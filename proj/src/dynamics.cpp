#include "edchan/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace edchan {

namespace {

constexpr Complex kI{0.0, 1.0};

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void validate_grid(std::span<const double> grid) {
  require(!grid.empty(), "time grid is empty");
  require(grid.front() == 0.0, "time grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    require(std::isfinite(grid[i]) && grid[i] > grid[i - 1], "time grid must increase strictly");
  }
}

CMatrix sum_f_dagger_f(const std::vector<CMatrix>& f, std::size_t d) {
  CMatrix acc(d, d);
  for (const auto& op : f) acc += op.adjoint() * op;
  return acc;
}

/// Weights w with f'(z) ~ sum_n w_n f(nodes[n]), exact for polynomials of
/// degree < nodes.size() (Fornberg's recursion, first derivative only).
std::vector<double> first_derivative_weights(std::span<const double> nodes, double z) {
  const std::size_t n = nodes.size();
  std::vector<double> c0(n, 0.0), c1(n, 0.0);
  c0[0] = 1.0;
  double prod_prev = 1.0;
  double off = nodes[0] - z;
  for (std::size_t i = 1; i < n; ++i) {
    double prod = 1.0;
    const double off_prev = off;
    off = nodes[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double gap = nodes[i] - nodes[j];
      prod *= gap;
      if (j == i - 1) {
        c1[i] = prod_prev * (c0[i - 1] - off_prev * c1[i - 1]) / prod;
        c0[i] = -prod_prev * off_prev * c0[i - 1] / prod;
      }
      c1[j] = (off * c1[j] - c0[j]) / gap;
      c0[j] = off * c0[j] / gap;
    }
    prod_prev = prod;
  }
  return c1;
}

}  // namespace

void GKLSGenerator::validate(double tol) const {
  const std::size_t d = h.rows();
  require(d > 0 && h.is_square(), "H must be square and non-empty");
  require(g.rows() == d && g.cols() == d, "G must match H");
  require(is_hermitian(h, tol), "H must be hermitian");
  require(is_hermitian(g, tol), "G must be hermitian");
  require(min_eigenvalue_hermitian(hermitian_part(g)) >= -tol, "G must be positive semidefinite");
  for (const auto& op : f) require(op.rows() == d && op.cols() == d, "every F must match H");
}

CMatrix GKLSGenerator::damping_operator() const {
  return kI * h + 0.5 * (g + sum_f_dagger_f(f, h.rows()));
}

CMatrix GKLSGenerator::effective_hamiltonian() const { return h - (0.5 * kI) * g; }

LinearMap gkls_superop(const GKLSGenerator& gen) {
  const std::size_t d = gen.dim();
  const CMatrix gamma_op = gen.damping_operator();
  const CMatrix id = CMatrix::identity(d);
  LinearMap l = LinearMap::sandwich(gamma_op, id) + LinearMap::sandwich(id, gamma_op.adjoint());
  l *= -1.0;
  if (!gen.f.empty()) l += LinearMap::from_kraus(gen.f, d, d);
  return l;
}

void SemigroupSpec::validate(double tol) const {
  gen.validate(tol);
  require(std::isfinite(epsilon), "epsilon must be finite");
  require(std::isfinite(kappa) && kappa >= 0.0, "kappa must be non-negative");
  require(c.size() == gen.f.size(), "c must have one entry per F");
  double norm_sq = 0.0;
  for (const auto& ci : c) norm_sq += std::norm(ci);
  require(norm_sq <= 1.0 + tol, "sum |c|^2 must not exceed 1");
  require(psi.d_in() == gen.dim() && psi.d_out() > 0, "psi must map B(H_e) into B(H_g)");
  require(is_cp(psi, tol).psd, "psi must be completely positive");
}

CMatrix coherence_generator(const SemigroupSpec& spec) {
  CMatrix k = -spec.gen.damping_operator();
  k = add_identity(std::move(k), -(kI * spec.epsilon + 0.5 * spec.kappa));
  const double root_kappa = std::sqrt(spec.kappa);
  for (std::size_t mu = 0; mu < spec.gen.f.size(); ++mu) {
    k -= (root_kappa * spec.c[mu]) * spec.gen.f[mu];
  }
  return k;
}

EDMap semigroup_at(const SemigroupSpec& spec, double t) {
  require(std::isfinite(t) && t >= 0.0, "t must be non-negative");
  const std::size_t d = spec.d_e();
  const LinearMap l = gkls_superop(spec.gen);
  LinearMap phi(d, d, matexp(l.matrix() * t));
  LinearMap integral(d, d, integral_of_exp(l.matrix(), t));
  return EDMap(std::move(phi), compose(spec.psi, integral), matexp(coherence_generator(spec) * t), 1.0);
}

bool check_tp_condition(const SemigroupSpec& spec, double tol) {
  return max_abs_diff(trace_density(spec.psi), spec.gen.g) <= tol;
}

SinkFactorization psi_from_sink(const CMatrix& g, const LinearMap& sink, double tol,
                                bool single_operator) {
  const std::size_t d_e = g.rows();
  require(d_e > 0 && g.is_square(), "G must be square and non-empty");
  require(is_hermitian(g, tol), "G must be hermitian");
  require(sink.d_in() == sink.d_out() && sink.d_in() > 0, "sink must map B(H_g) to itself");
  const std::size_t d_g = sink.d_in();

  const HermitianEigen eig = eigh(hermitian_part(g));
  require(eig.values.empty() || eig.values.front() >= -tol, "G must be positive semidefinite");

  std::vector<std::size_t> kept;
  for (std::size_t m = 0; m < d_e; ++m) {
    if (eig.values[m] > tol) kept.push_back(m);
  }
  // Larger eigenvalues first so the factor is reproducible.
  std::reverse(kept.begin(), kept.end());

  std::vector<CMatrix> ops;
  if (kept.size() <= d_g) {
    CMatrix m_op(d_g, d_e);
    for (std::size_t row = 0; row < kept.size(); ++row) {
      const double s = std::sqrt(eig.values[kept[row]]);
      for (std::size_t j = 0; j < d_e; ++j) m_op(row, j) = s * std::conj(eig.vectors(j, kept[row]));
    }
    ops.push_back(std::move(m_op));
  } else {
    require(!single_operator, "rank(G) exceeds d_g; no single M with M^dagger M = G exists");
    for (std::size_t idx : kept) {
      CMatrix m_op(d_g, d_e);
      const double s = std::sqrt(eig.values[idx]);
      for (std::size_t j = 0; j < d_e; ++j) m_op(0, j) = s * std::conj(eig.vectors(j, idx));
      ops.push_back(std::move(m_op));
    }
  }

  SinkFactorization out;
  out.psi = compose(sink, LinearMap::from_kraus(ops, d_e, d_g));
  out.m_ops = std::move(ops);
  out.sink_is_channel = is_cp(sink, tol).psd &&
                        max_abs_diff(trace_density(sink), CMatrix::identity(d_g)) <= tol;
  return out;
}

EDMap wigner_weisskopf_at(const CMatrix& h, const CMatrix& g, double epsilon, double kappa,
                          const LinearMap& psi, double t) {
  const GKLSGenerator gen{h, g, {}};
  gen.validate();
  require(std::isfinite(kappa) && kappa >= 0.0, "kappa must be non-negative");
  require(std::isfinite(t) && t >= 0.0, "t must be non-negative");
  const std::size_t d = h.rows();
  require(psi.d_in() == d, "psi must act on B(H_e)");

  const CMatrix h_eff = gen.effective_hamiltonian();
  const CMatrix a_t = matexp((-kI * t) * h_eff);
  const Complex scale = std::exp(-kI * (epsilon * t)) * std::exp(-0.5 * kappa * t);
  const LinearMap l0 = gkls_superop(gen);
  LinearMap integral(d, d, integral_of_exp(l0.matrix(), t));
  return EDMap(LinearMap::sandwich(a_t, a_t.adjoint()), compose(psi, integral), scale * a_t, 1.0);
}

void ChannelTrajectory::validate(double tol) const {
  require(grid.size() == maps.size(), "grid and maps must have the same length");
  validate_grid(grid);
  const EDMap& first = maps.front();
  for (const auto& m : maps) {
    require(m.d_e() == first.d_e() && m.d_g() == first.d_g(), "all maps must share dimensions");
  }
  require(max_abs_diff(first, EDMap::identity(first.d_e(), first.d_g())) <= tol,
          "the map at t = 0 must be the identity");
}

std::vector<double> uniform_grid(double t_max, std::size_t steps) {
  require(std::isfinite(t_max) && t_max > 0.0, "t_max must be positive");
  require(steps > 0, "steps must be positive");
  std::vector<double> grid(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    grid[i] = t_max * static_cast<double>(i) / static_cast<double>(steps);
  }
  grid.back() = t_max;
  return grid;
}

ChannelTrajectory semigroup_trajectory(const SemigroupSpec& spec, std::span<const double> grid) {
  validate_grid(grid);
  ChannelTrajectory traj;
  traj.grid.assign(grid.begin(), grid.end());
  traj.maps.reserve(grid.size());
  for (double t : grid) traj.maps.push_back(semigroup_at(spec, t));
  return traj;
}

TimeLocalGenerators time_local_generators(const ChannelTrajectory& traj, std::size_t i, FdStencil stencil) {
  if (i == 0 || i + 1 >= traj.size()) {
    throw std::out_of_range("time-local generators need an interior grid point");
  }
  const std::size_t reach = stencil == FdStencil::five_point && i >= 2 && i + 2 < traj.size() ? 2 : 1;
  const std::size_t first = i - reach;
  const std::span<const double> nodes(traj.grid.data() + first, 2 * reach + 1);
  const std::vector<double> weights = first_derivative_weights(nodes, traj.grid[i]);

  const EDMap& mid = traj.maps[i];
  if (condition_number(mid.phi().matrix()) > kSingularConditionLimit) {
    throw NonInvertibleError(NonInvertibleReason::phi_singular);
  }
  if (condition_number(mid.b()) > kSingularConditionLimit) {
    throw NonInvertibleError(NonInvertibleReason::b_singular);
  }

  auto derivative = [&](auto&& part) {
    CMatrix acc = weights[0] * part(traj.maps[first]);
    for (std::size_t n = 1; n < weights.size(); ++n) acc += weights[n] * part(traj.maps[first + n]);
    return acc;
  };
  const CMatrix phi_dot = derivative([](const EDMap& m) -> const CMatrix& { return m.phi().matrix(); });
  const CMatrix omega_dot = derivative([](const EDMap& m) -> const CMatrix& { return m.omega().matrix(); });
  const CMatrix b_dot = derivative([](const EDMap& m) -> const CMatrix& { return m.b(); });

  const CMatrix phi_inv = inverse(mid.phi().matrix());
  const std::size_t d_e = mid.d_e();
  const std::size_t d_g = mid.d_g();
  return TimeLocalGenerators{LinearMap(d_e, d_e, phi_dot * phi_inv), b_dot * inverse(mid.b()),
                             LinearMap(d_e, d_g, omega_dot * phi_inv)};
}

EDMap propagator(const ChannelTrajectory& traj, std::size_t i, std::size_t j) {
  if (i >= traj.size() || j > i) throw std::out_of_range("propagator needs j <= i < size");
  return compose(traj.maps[i], invert(traj.maps[j]));
}

DivisibilityReport is_cp_divisible(const ChannelTrajectory& traj, double tol) {
  DivisibilityReport report;
  bool first = true;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const EdCpReport step = is_cp_ed(propagator(traj, i + 1, i), tol);
    report.step_min_eigenvalues.push_back(step.min_choi_eigenvalue);
    report.cp_divisible = report.cp_divisible && step.cp;
    if (first || step.min_choi_eigenvalue < report.min_eigenvalue) {
      report.min_eigenvalue = step.min_choi_eigenvalue;
      report.worst_pair = {i + 1, i};
      first = false;
    }
  }
  return report;
}

GeneratorReport is_gkls_generator(const LinearMap& l, double tol) {
  require(l.d_in() == l.d_out() && l.d_in() > 0, "a generator must map B(H) to itself");
  const std::size_t d = l.d_in();
  const CMatrix c = choi(l).c;

  CMatrix q = CMatrix::identity(d * d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) q(a * d + a, b * d + b) -= 1.0 / static_cast<double>(d);
  }

  GeneratorReport report;
  report.hermiticity_preserving = is_hermitian(c, tol);
  report.ccp_min_eigenvalue = min_eigenvalue_hermitian(q * hermitian_part(c) * q);
  report.trace_max_eigenvalue = max_eigenvalue_hermitian(hermitian_part(trace_density(l)));
  report.trace_nonincreasing = report.trace_max_eigenvalue <= tol;
  report.valid = report.hermiticity_preserving && report.ccp_min_eigenvalue >= -tol;
  return report;
}

ChannelTrajectory build_td_trajectory(const MapSupplier& l, const OperatorSupplier& k,
                                      const MapSupplier& psi, std::span<const double> grid) {
  validate_grid(grid);
  LinearMap l_prev = l(grid[0]);
  LinearMap psi_prev = psi(grid[0]);
  require(l_prev.d_in() == l_prev.d_out(), "L must map B(H_e) to itself");
  const std::size_t d_e = l_prev.d_in();
  require(psi_prev.d_in() == d_e, "psi must act on B(H_e)");
  const std::size_t d_g = psi_prev.d_out();

  ChannelTrajectory traj;
  traj.grid.assign(grid.begin(), grid.end());
  traj.maps.reserve(grid.size());
  traj.maps.push_back(EDMap::identity(d_e, d_g));

  CMatrix phi = CMatrix::identity(d_e * d_e);
  CMatrix b = CMatrix::identity(d_e);
  CMatrix omega(d_g * d_g, d_e * d_e);

  for (std::size_t n = 0; n + 1 < grid.size(); ++n) {
    const double dt = grid[n + 1] - grid[n];
    const double t_mid = grid[n] + 0.5 * dt;
    const LinearMap l_mid = l(t_mid);
    const LinearMap psi_mid = psi(t_mid);
    LinearMap l_next = l(grid[n + 1]);
    LinearMap psi_next = psi(grid[n + 1]);
    const CMatrix k_mid = k(t_mid);
    require(l_mid.d_in() == d_e && l_mid.d_out() == d_e && l_next.d_in() == d_e &&
                l_next.d_out() == d_e,
            "L changes dimension along the grid");
    require(psi_mid.d_in() == d_e && psi_mid.d_out() == d_g && psi_next.d_in() == d_e &&
                psi_next.d_out() == d_g,
            "psi changes dimension along the grid");
    require(k_mid.rows() == d_e && k_mid.cols() == d_e, "K must be d_e x d_e");

    const CMatrix phi_next = matexp(l_mid.matrix() * dt) * phi;
    b = matexp(k_mid * dt) * b;

    const bool constant = l_prev.matrix() == l_mid.matrix() && l_mid.matrix() == l_next.matrix() &&
                          psi_prev.matrix() == psi_mid.matrix() &&
                          psi_mid.matrix() == psi_next.matrix();
    if (constant) {
      omega += psi_mid.matrix() * integral_of_exp(l_mid.matrix(), dt) * phi;
    } else {
      omega += (0.5 * dt) * (psi_prev.matrix() * phi + psi_next.matrix() * phi_next);
    }
    phi = phi_next;
    l_prev = std::move(l_next);
    psi_prev = std::move(psi_next);

    traj.maps.emplace_back(LinearMap(d_e, d_e, phi), LinearMap(d_e, d_g, omega), b, 1.0);
  }
  return traj;
}

void GeneratorTable::validate() const {
  require(!times.empty(), "generator table is empty");
  require(l.size() == times.size() && k.size() == times.size() && psi.size() == times.size(),
          "generator table columns must have equal length");
  for (std::size_t i = 1; i < times.size(); ++i) {
    require(std::isfinite(times[i]) && times[i] > times[i - 1], "table times must increase strictly");
  }
  const std::size_t d_e = l.front().d_in();
  const std::size_t d_g = psi.front().d_out();
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(l[i].d_in() == d_e && l[i].d_out() == d_e, "L entries must be d_e -> d_e");
    require(k[i].rows() == d_e && k[i].cols() == d_e, "K entries must be d_e x d_e");
    require(psi[i].d_in() == d_e && psi[i].d_out() == d_g, "psi entries must be d_e -> d_g");
  }
}

namespace {

/// Segment index and weight of t in the table; weight 0 outside the table.
std::pair<std::size_t, double> locate(const std::vector<double>& times, double t) {
  if (t <= times.front()) return {0, 0.0};
  if (t >= times.back()) return {times.size() - 1, 0.0};
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
  return {i, (t - times[i]) / (times[i + 1] - times[i])};
}

template <typename T>
T interpolate(const std::vector<T>& values, std::size_t i, double w) {
  if (w == 0.0) return values[i];
  return (1.0 - w) * values[i] + w * values[i + 1];
}

}  // namespace

LinearMap GeneratorTable::l_at(double t) const {
  const auto [i, w] = locate(times, t);
  return interpolate(l, i, w);
}

CMatrix GeneratorTable::k_at(double t) const {
  const auto [i, w] = locate(times, t);
  return interpolate(k, i, w);
}

LinearMap GeneratorTable::psi_at(double t) const {
  const auto [i, w] = locate(times, t);
  return interpolate(psi, i, w);
}

ChannelTrajectory table_trajectory(const GeneratorTable& table, std::span<const double> grid) {
  table.validate();
  return build_td_trajectory([&](double t) { return table.l_at(t); },
                             [&](double t) { return table.k_at(t); },
                             [&](double t) { return table.psi_at(t); }, grid);
}

void SinkWindowSpec::validate(double tol) const {
  GKLSGenerator{h, g, {}}.validate(tol);
  require(std::isfinite(kappa) && kappa >= 0.0, "kappa must be non-negative");
  require(std::isfinite(window_start) && window_start >= 0.0, "window must start at t >= 0");
  require(std::isfinite(window_end) && window_end > window_start, "window must have positive length");
  require(std::isfinite(strength) && strength >= 0.0 && strength <= 1.0,
          "strength must lie in [0, 1]");
}

double SinkWindowSpec::mixing_at(double t) const {
  if (t <= window_start || t >= window_end) return 0.0;
  const double s = std::sin(std::numbers::pi * (t - window_start) / (window_end - window_start));
  return strength * s * s;
}

ChannelTrajectory sink_window_trajectory(const SinkWindowSpec& spec, std::span<const double> grid) {
  spec.validate();
  const std::size_t d = spec.h.rows();
  const GKLSGenerator gen{spec.h, spec.g, {}};
  const LinearMap l = gkls_superop(gen);
  const CMatrix k = add_identity(-gen.damping_operator(), -0.5 * spec.kappa);
  const SinkFactorization factor = psi_from_sink(spec.g, LinearMap::identity(d), 1e-12, true);
  const LinearMap& feed = factor.psi;
  const LinearMap id = LinearMap::identity(d);
  const LinearMap transpose = LinearMap::transpose_map(d);

  return build_td_trajectory(
      [&](double) { return l; }, [&](double) { return k; },
      [&](double t) {
        const double p = spec.mixing_at(t);
        if (p == 0.0) return feed;
        return compose((1.0 - p) * id + p * transpose, feed);
      },
      grid);
}

}  // namespace edchan
