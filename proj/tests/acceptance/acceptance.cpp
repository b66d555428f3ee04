// Acceptance suite: one line per criterion with its verdict and runtime.
// Exit status is non-zero when any criterion fails or exceeds its time limit.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "edchan/channel.hpp"
#include "edchan/cpcheck.hpp"
#include "edchan/dynamics.hpp"
#include "edchan/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace edchan;
using edchan::testing::Rng;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double limit_s;
  std::function<Verdict()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

Complex random_phase(Rng& rng) { return std::polar(1.0, rng.uniform(0.0, 2.0 * M_PI)); }

/// Kraus family A_mu with B = sum beta_mu A_mu scaled so that sum |beta|^2 = fraction * gamma.
EDMap ball_instance(Rng& rng, std::size_t d_e, std::size_t r, double gamma, double fraction, const LinearMap& omega) {
  const auto ops = edchan::testing::random_kraus(rng, r, d_e, d_e, 0.5);
  std::vector<Complex> beta(r);
  double norm_sq = 0.0;
  for (auto& b : beta) {
    b = rng.complex_normal();
    norm_sq += std::norm(b);
  }
  const double s = std::sqrt(fraction * gamma / norm_sq);
  CMatrix b(d_e, d_e);
  for (std::size_t mu = 0; mu < r; ++mu) b += (s * beta[mu]) * ops[mu];
  return EDMap(LinearMap::from_kraus(ops, d_e, d_e), omega, b, gamma);
}

bool oracle_cp(const EDMap& m, double tol) {
  const CMatrix s = edchan::testing::full_superop_oracle(m);
  return edchan::testing::min_eigenvalue_oracle(edchan::testing::choi_oracle(s, m.dim(), m.dim())) >= -tol;
}

std::vector<SemigroupSpec> criterion5_specs() {
  Rng rng(5005);
  std::vector<SemigroupSpec> specs;
  for (std::size_t i = 0; i < 20; ++i) {
    // Every fourth spec has a psi that is not matched to G, so it loses trace.
    specs.push_back(edchan::testing::random_semigroup(rng, 1 + i % 3, 1 + (i / 3) % 3, i % 4 != 3));
  }
  return specs;
}

Verdict criterion1() {
  Rng rng(101);
  const double tol = 1e-8;
  int agree = 0, cp_count = 0;
  for (int n = 0; n < 200; ++n) {
    const std::size_t de = 1 + rng.index(3), dg = 1 + rng.index(3);
    EDMap m = EDMap::identity(de, dg);
    switch (n % 4) {
      case 0:
        m = edchan::testing::random_edmap(rng, de, dg);
        break;
      case 1:
        m = edchan::testing::random_cp_edmap(rng, de, dg, rng.uniform(0.1, 0.95));
        break;
      case 2:
        m = edchan::testing::random_cp_edmap(rng, de, dg, rng.uniform(1.05, 2.0));
        break;
      default: {
        // gamma = 0: CP requires B = 0.
        const EDMap base = edchan::testing::random_cp_edmap(rng, de, dg, 0.5);
        const CMatrix b = n % 8 == 3 ? CMatrix(de, de) : edchan::testing::random_matrix(rng, de, de, 0.1);
        m = EDMap(base.phi(), base.omega(), b, 0.0);
      }
    }
    const bool fast = is_cp_ed(m, tol).cp;
    const bool oracle = oracle_cp(m, tol);
    agree += fast == oracle;
    cp_count += oracle;
  }
  return {agree == 200, fmt("%d/200 agree, %d CP by the oracle", agree, cp_count)};
}

Verdict criterion2() {
  Rng rng(202);
  const double band = 1e-9;
  int checked = 0, wrong = 0, skipped = 0;
  for (double a : linspace(0.0, 1.2, 25)) {
    for (double b : linspace(0.0, 1.2, 25)) {
      for (double gamma : linspace(0.0, 1.2, 5)) {
        const double edge = std::sqrt(gamma) * a;
        if (std::abs(b - edge) <= band) {
          ++skipped;
          continue;
        }
        const EDMap m = qubit_map(a * random_phase(rng), b * random_phase(rng), 0.5 * random_phase(rng), gamma);
        ++checked;
        wrong += is_cp_ed(m, 1e-12).cp != (b <= edge);
      }
    }
  }
  return {wrong == 0, fmt("%d misclassified of %d, %d in the boundary band", wrong, checked, skipped)};
}

Verdict criterion3() {
  Rng rng(303);
  const double tol = 1e-10;
  int flips = 0;
  for (int n = 0; n < 50; ++n) {
    const std::size_t de = 1 + rng.index(3);
    const std::size_t r = 1 + rng.index(de * de);
    const double gamma = rng.uniform(0.2, 1.5);
    const LinearMap omega = edchan::testing::random_cp_map(rng, de, 1 + rng.index(3), 2, 0.5);
    // Same Kraus family and beta direction on both sides of the boundary.
    Rng inner_a(1000 + n), inner_b(1000 + n);
    const EDMap inside = ball_instance(inner_a, de, r, gamma, 0.99, omega);
    const EDMap outside = ball_instance(inner_b, de, r, gamma, 1.01, omega);
    auto verdicts = [&](const EDMap& m) {
      const BallDecomposition bd = ball_decompose(m.b(), canonical_kraus(m.phi(), tol), m.gamma(), tol);
      return std::pair{bd.member, is_cp_ed(m, tol).cp};
    };
    const auto [in_member, in_cp] = verdicts(inside);
    const auto [out_member, out_cp] = verdicts(outside);
    flips += in_member && in_cp && !out_member && !out_cp;
  }
  return {flips == 50, fmt("%d/50 flip at the boundary", flips)};
}

Verdict criterion4() {
  Rng rng(404);
  const double tol = 1e-10;
  double choi_err = 0.0, explicit_err = 0.0;
  int count_ok = 0;
  for (int n = 0; n < 100; ++n) {
    const std::size_t de = 1 + rng.index(3), dg = 1 + rng.index(3);
    EDMap m = edchan::testing::random_cp_edmap(rng, de, dg, rng.uniform(0.0, 1.0));
    if (n % 10 == 9) m = EDMap(m.phi(), m.omega(), CMatrix(de, de), 0.0);
    const LinearMap full = m.full_map();
    choi_err = std::max(choi_err, max_abs_diff(map_from_kraus(canonical_kraus(full, tol)).matrix(), full.matrix()));
    const auto ops = explicit_kraus_ed(m, tol);
    explicit_err = std::max(explicit_err, max_abs_diff(map_from_kraus(to_kraus_set(ops)).matrix(), full.matrix()));
    const std::size_t r = canonical_kraus(m.phi(), tol).size();
    const std::size_t s = canonical_kraus(m.omega(), tol).size();
    count_ok += ops.size() <= r + s + 1;
  }
  const bool pass = choi_err <= 1e-9 && explicit_err <= 1e-9 && count_ok == 100;
  return {pass, fmt("choi round trip %.2e, explicit %.2e, count bound %d/100", choi_err, explicit_err, count_ok)};
}

Verdict criterion5() {
  Rng rng(505);
  double law = 0.0, drift = 0.0;
  int cp_ok = 0, cp_total = 0, tp_specs = 0;
  for (const auto& spec : criterion5_specs()) {
    const auto ts = linspace(0.0, 2.0, 5);
    for (double t : ts) {
      for (double s : ts) {
        law = std::max(law, max_abs_diff(compose(semigroup_at(spec, t), semigroup_at(spec, s)), semigroup_at(spec, t + s)));
      }
    }
    const bool tp = check_tp_condition(spec, 1e-10);
    tp_specs += tp;
    const std::size_t d = spec.d_e() + spec.d_g();
    const BlockOperator rho = BlockOperator::from_full(edchan::testing::random_density(rng, d), spec.d_e(), spec.d_g());
    for (double t : linspace(0.0, 2.0, 50)) {
      const EDMap m = semigroup_at(spec, t);
      ++cp_total;
      cp_ok += is_cp_ed(m, 1e-9).cp;
      if (tp) drift = std::max(drift, std::abs(apply(m, rho).trace() - 1.0));
    }
  }
  const bool pass = law <= 1e-8 && cp_ok == cp_total && drift <= 1e-9;
  return {pass, fmt("law residual %.2e, CP %d/%d, trace drift %.2e over %d TP specs", law, cp_ok, cp_total, drift,
                    tp_specs)};
}

Verdict criterion6() {
  double l_err = 0.0, k_err = 0.0, omega_err = 0.0;
  const auto grid = uniform_grid(1.0, 1000);
  const double dt = grid[1] - grid[0];
  for (const auto& spec : criterion5_specs()) {
    const ChannelTrajectory traj = semigroup_trajectory(spec, grid);
    const LinearMap l = gkls_superop(spec.gen);
    const CMatrix k = coherence_generator(spec);
    const std::size_t last = traj.size() - 2;
    // Composite Simpson over the interior points 1..last (an even number of intervals).
    CMatrix integral(spec.d_g() * spec.d_g(), spec.d_e() * spec.d_e());
    for (std::size_t i = 1; i <= last; ++i) {
      const TimeLocalGenerators gen = time_local_generators(traj, i);
      l_err = std::max(l_err, max_abs_diff(gen.l.matrix(), l.matrix()));
      k_err = std::max(k_err, max_abs_diff(gen.k, k));
      const CMatrix rate = compose(gen.psi, traj.maps[i].phi()).matrix();
      const double weight = i == 1 || i == last ? 1.0 : (i % 2 == 0 ? 4.0 : 2.0);
      integral += (weight * dt / 3.0) * rate;
    }
    const CMatrix expected = traj.maps[last].omega().matrix() - traj.maps[1].omega().matrix();
    omega_err = std::max(omega_err, max_abs_diff(integral, expected));
  }
  const bool pass = l_err <= 1e-5 && k_err <= 1e-5 && omega_err <= 1e-6;
  return {pass, fmt("L %.2e, K %.2e, omega integral %.2e", l_err, k_err, omega_err)};
}

Verdict criterion7() {
  double worst = 0.0;
  int divisible = 0;
  for (const auto& spec : criterion5_specs()) {
    const DivisibilityReport rep = is_cp_divisible(semigroup_trajectory(spec, uniform_grid(2.0, 200)), 1e-6);
    divisible += rep.cp_divisible;
    worst = std::min(worst, rep.min_eigenvalue);
  }
  const SinkWindowSpec fixture = fixtures::non_cp_divisible();
  const io::GridSpec g = fixtures::non_cp_divisible_grid();
  const ChannelTrajectory traj = sink_window_trajectory(fixture, uniform_grid(g.t_max, g.steps));
  int cp_points = 0;
  for (const auto& m : traj.maps) cp_points += is_cp_ed(m, 1e-9).cp;
  const DivisibilityReport frep = is_cp_divisible(traj, 1e-9);
  const bool pass = divisible == 20 && worst >= -1e-6 && cp_points == static_cast<int>(traj.size()) &&
                    !frep.cp_divisible && frep.min_eigenvalue <= -1e-4;
  return {pass, fmt("semigroups %d/20 divisible (min %.2e); fixture CP at %d/%zu points, divisibility min %.3e", divisible,
                    worst, cp_points, traj.size(), frep.min_eigenvalue)};
}

Verdict criterion8() {
  // Kraus rank of phi uniform in 1..d_e^2; sum |beta|^2 on both sides of gamma;
  // one instance in five has an indefinite omega density.
  Rng rng(808);
  const double tol = 1e-9;
  int agree = 0, cp_count = 0, missed = 0, false_witness = 0;
  std::string misses;
  for (int n = 0; n < 100; ++n) {
    const std::size_t de = 1 + rng.index(3);
    const std::size_t r = 1 + rng.index(de * de);
    const double gamma = rng.uniform(0.2, 1.5);
    const CMatrix w = n % 5 == 4 ? edchan::testing::random_hermitian(rng, de, 0.5) : edchan::testing::random_psd(rng, de, 0.5);
    const LinearMap omega = LinearMap::from_action(de, 1, [&w](const CMatrix& x) { return CMatrix{{(w * x).trace()}}; });
    const double fraction = rng.uniform(0.3, 2.0);
    const EDMap m = ball_instance(rng, de, r, gamma, fraction, omega);
    const bool cp = is_cp_ed(m, tol).cp;
    const bool witness = is_positive_ed_dg1(m, 100000, tol, 9000 + static_cast<std::uint64_t>(n)).not_positive();
    cp_count += cp;
    agree += witness == !cp;
    if (!cp && !witness) {
      ++missed;
      misses += fmt(" (d_e=%zu r=%zu |beta|^2/gamma=%.2f)", de, r, fraction);
    }
    false_witness += cp && witness;
  }
  return {agree == 100, fmt("%d/100 agree; %d CP, %d witnesses on CP maps, %d non-CP without witness:", agree, cp_count,
                            false_witness, missed) + misses};
}

Verdict criterion9() {
  Rng rng(909);
  double err = 0.0;
  int variants = 0;
  auto reason = [](const EDMap& m) {
    try {
      invert(m);
    } catch (const NonInvertibleError& e) {
      return static_cast<int>(e.reason());
    }
    return -1;
  };
  for (int n = 0; n < 100; ++n) {
    const std::size_t de = 1 + rng.index(3), dg = 1 + rng.index(3);
    const LinearMap phi = LinearMap::identity(de) + 0.2 * edchan::testing::random_hp_map(rng, de, de, 0.5);
    const CMatrix b = CMatrix::identity(de) + edchan::testing::random_matrix(rng, de, de, 0.2);
    const EDMap m(phi, edchan::testing::random_hp_map(rng, de, dg, 0.5), b, rng.uniform(0.3, 1.5));
    const LinearMap id = LinearMap::identity(de + dg);
    const EDMap inv = invert(m);
    err = std::max(err, max_abs_diff(compose(inv, m).full_map().matrix(), id.matrix()));
    err = std::max(err, max_abs_diff(compose(m, inv).full_map().matrix(), id.matrix()));

    CMatrix singular_b = b;
    for (std::size_t i = 0; i < de; ++i) singular_b(i, de - 1) = 0.0;
    variants += reason(EDMap(phi, m.omega(), b, 0.0)) == static_cast<int>(NonInvertibleReason::gamma_zero);
    variants += reason(EDMap(LinearMap::zero(de, de), m.omega(), b, 1.0)) == static_cast<int>(NonInvertibleReason::phi_singular);
    variants += reason(EDMap(phi, m.omega(), singular_b, 1.0)) == static_cast<int>(NonInvertibleReason::b_singular);
  }
  return {err <= 1e-10 && variants == 300, fmt("round trip %.2e, %d/300 error variants match", err, variants)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "sector CP criterion matches the full Choi oracle", 10.0, criterion1},
      {2, "qubit CP law |b| <= sqrt(gamma)|a|", 5.0, criterion2},
      {3, "Kraus ball boundary flips CP", 5.0, criterion3},
      {4, "Kraus round trips and operator count", 10.0, criterion4},
      {5, "GKLS semigroups: law, CP, trace", 30.0, criterion5},
      {6, "time-local generator extraction", 30.0, criterion6},
      {7, "CP-divisibility of semigroups and the sink-window fixture", 30.0, criterion7},
      {8, "d_g = 1: positivity witness iff not CP", 60.0, criterion8},
      {9, "inversion round trip and error variants", 5.0, criterion9},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = v.pass && in_time;
    failures += !pass;
    std::printf("%s  %d  %s: %s  [%.2f s, limit %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.title, v.detail.c_str(),
                secs, c.limit_s, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
