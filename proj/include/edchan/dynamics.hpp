#pragma once

// Time-dependent excitation-damping channels with gamma_t = 1: GKLS
// generators on the excited sector, semigroups, time-local generator
// extraction, propagators and CP-divisibility.

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "edchan/channel.hpp"
#include "edchan/cpcheck.hpp"
#include "edchan/matcore.hpp"

namespace edchan {

/// L = -i[H, .] - {G, .}/2 + sum_mu (F_mu . F_mu^dagger - {F_mu^dagger F_mu, .}/2).
struct GKLSGenerator {
  CMatrix h;
  CMatrix g;
  std::vector<CMatrix> f;

  std::size_t dim() const noexcept { return h.rows(); }
  /// Throws std::invalid_argument unless H is hermitian and G is PSD within tol.
  void validate(double tol = 1e-9) const;
  /// i H + (G + sum F^dagger F) / 2.
  CMatrix damping_operator() const;
  /// H - (i/2) G.
  CMatrix effective_hamiltonian() const;
};

LinearMap gkls_superop(const GKLSGenerator& gen);

struct SemigroupSpec {
  GKLSGenerator gen;
  double epsilon = 0.0;
  double kappa = 0.0;
  std::vector<Complex> c;
  /// CP map B(H_e) -> B(H_g).
  LinearMap psi;

  std::size_t d_e() const noexcept { return gen.dim(); }
  std::size_t d_g() const noexcept { return psi.d_out(); }
  /// Checks the generator, kappa >= 0, sum |c|^2 <= 1 + tol, |c| == |F| and psi CP.
  void validate(double tol = 1e-9) const;
};

/// K = -i H - (G + sum F^dagger F)/2 - (i eps + kappa/2) I - sqrt(kappa) sum c_mu F_mu.
CMatrix coherence_generator(const SemigroupSpec& spec);

/// phi_t = e^{tL}, B_t = e^{tK}, omega_t = psi o int_0^t e^{tau L} dtau, gamma = 1.
EDMap semigroup_at(const SemigroupSpec& spec, double t);

/// tr psi(E_jl) == tr(G E_jl) on every matrix unit.
bool check_tp_condition(const SemigroupSpec& spec, double tol);

struct SinkFactorization {
  LinearMap psi;
  /// d_g x d_e operators with sum M^dagger M = G.
  std::vector<CMatrix> m_ops;
  /// The sink is CP and trace preserving; only then does tr psi(X) = tr(GX) hold.
  bool sink_is_channel = false;
};

/// psi = sink o sum_m M_m(.)M_m^dagger with G = sum_m M_m^dagger M_m. A single
/// M is used when rank(G) <= d_g, otherwise one rank-one operator per
/// eigenvector of G; single_operator = true turns the latter case into an error.
SinkFactorization psi_from_sink(const CMatrix& g, const LinearMap& sink, double tol,
                                bool single_operator = false);

/// Semigroup with F = {}: A_t = e^{-i H_eff t}, B_t = e^{-i eps t} e^{-kappa t/2} A_t.
EDMap wigner_weisskopf_at(const CMatrix& h, const CMatrix& g, double epsilon, double kappa,
                          const LinearMap& psi, double t);

struct ChannelTrajectory {
  std::vector<double> grid;
  std::vector<EDMap> maps;

  std::size_t size() const noexcept { return grid.size(); }
  /// Throws unless sizes agree, the grid starts at 0 and increases strictly,
  /// and maps[0] is the identity channel within tol.
  void validate(double tol = 1e-9) const;
};

std::vector<double> uniform_grid(double t_max, std::size_t steps);
ChannelTrajectory semigroup_trajectory(const SemigroupSpec& spec, std::span<const double> grid);

struct TimeLocalGenerators {
  LinearMap l;
  CMatrix k;
  LinearMap psi;
};

/// Central difference stencils on the grid itself: points i-1..i+1 or i-2..i+2.
/// five_point drops to three_point next to either end of the grid.
enum class FdStencil { three_point, five_point };

/// L_t = phi'_t o phi_t^-1, K_t = B'_t B_t^-1, psi_t = omega'_t o phi_t^-1 with
/// the time derivatives taken by the given stencil. Throws std::out_of_range at
/// boundary points and NonInvertibleError when phi_t or B_t is singular.
TimeLocalGenerators time_local_generators(const ChannelTrajectory& traj, std::size_t i,
                                          FdStencil stencil = FdStencil::five_point);

/// maps[i] o maps[j]^-1, requires j <= i.
EDMap propagator(const ChannelTrajectory& traj, std::size_t i, std::size_t j);

struct DivisibilityReport {
  bool cp_divisible = true;
  /// (i + 1, i) of the step with the smallest Choi eigenvalue.
  std::pair<std::size_t, std::size_t> worst_pair{0, 0};
  double min_eigenvalue = 0.0;
  /// Entry i is the minimum Choi eigenvalue of propagator(i + 1, i).
  std::vector<double> step_min_eigenvalues;
};

/// CP test of every consecutive propagator; composition closes the rest.
DivisibilityReport is_cp_divisible(const ChannelTrajectory& traj, double tol);

struct GeneratorReport {
  bool valid = false;
  bool hermiticity_preserving = false;
  bool trace_nonincreasing = false;
  /// Smallest eigenvalue of (I - P) C_L (I - P), P the normalized maximally entangled projector.
  double ccp_min_eigenvalue = 0.0;
  /// Largest eigenvalue of W with tr L(X) = tr(WX).
  double trace_max_eigenvalue = 0.0;
};

/// Conditional complete positivity of L plus the trace non-increasing test.
GeneratorReport is_gkls_generator(const LinearMap& l, double tol);

using MapSupplier = std::function<LinearMap(double)>;
using OperatorSupplier = std::function<CMatrix(double)>;

/// phi_t and B_t by time-ordered products of midpoint exponentials; omega_t by
/// accumulating psi_tau o phi_tau. Steps on which the suppliers return
/// identical values at both ends and the midpoint are integrated exactly,
/// the rest with the trapezoidal rule.
ChannelTrajectory build_td_trajectory(const MapSupplier& l, const OperatorSupplier& k,
                                      const MapSupplier& psi, std::span<const double> grid);

/// Generators tabulated on a time grid, linearly interpolated in between and
/// held constant outside the table.
struct GeneratorTable {
  std::vector<double> times;
  std::vector<LinearMap> l;
  std::vector<CMatrix> k;
  std::vector<LinearMap> psi;

  void validate() const;
  LinearMap l_at(double t) const;
  CMatrix k_at(double t) const;
  LinearMap psi_at(double t) const;
};

ChannelTrajectory table_trajectory(const GeneratorTable& table, std::span<const double> grid);

/// Wigner-Weisskopf excited-sector dynamics whose ground-sector sink turns
/// non-CP inside a time window:
///   psi_t = E_t o M(.)M^dagger,  G = M^dagger M,
///   E_t = (1 - p(t)) id + p(t) transpose,  p(t) = strength sin^2(pi (t - t0)/(t1 - t0)) on [t0, t1].
/// E_t stays trace preserving throughout.
struct SinkWindowSpec {
  CMatrix h;
  CMatrix g;
  double kappa = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  double strength = 0.0;

  void validate(double tol = 1e-9) const;
  double mixing_at(double t) const;
};

ChannelTrajectory sink_window_trajectory(const SinkWindowSpec& spec, std::span<const double> grid);

}  // namespace edchan
