#include "edchan/cpcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace edchan {

namespace {

// Largest entry (first one within 1e-12 of the maximum modulus) made real positive.
void fix_phase(std::vector<Complex>& v) {
  double best = 0.0;
  for (const auto& z : v) best = std::max(best, std::abs(z));
  if (best == 0.0) return;
  for (const auto& z : v) {
    if (std::abs(z) >= best - 1e-12) {
      const Complex phase = std::conj(z) / std::abs(z);
      for (auto& w : v) w *= phase;
      return;
    }
  }
}

bool lex_real_less(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  return std::lexicographical_compare(
      a.begin(), a.end(), b.begin(), b.end(),
      [](const Complex& x, const Complex& y) { return x.real() < y.real(); });
}

PositivityVerdict witness_verdict(std::vector<Complex> xi, double min_eig, std::size_t drawn,
                                  std::string source) {
  PositivityVerdict v;
  v.status = PositivityVerdict::Status::not_positive;
  v.witness = std::move(xi);
  v.witness_min_eigenvalue = min_eig;
  v.samples_drawn = drawn;
  v.source = std::move(source);
  return v;
}

CMatrix projector(std::span<const Complex> xi) {
  CMatrix x(xi.size(), xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i)
    for (std::size_t j = 0; j < xi.size(); ++j) x(i, j) = xi[i] * std::conj(xi[j]);
  return x;
}

}  // namespace

ChoiMatrix choi(const LinearMap& map) {
  const std::size_t di = map.d_in();
  const std::size_t d_o = map.d_out();
  const CMatrix& s = map.matrix();
  CMatrix c(d_o * di, d_o * di);
  for (std::size_t a = 0; a < d_o; ++a)
    for (std::size_t b = 0; b < d_o; ++b)
      for (std::size_t j = 0; j < di; ++j)
        for (std::size_t k = 0; k < di; ++k)
          c(a * di + j, b * di + k) = s(a + b * d_o, j + k * di);
  return {di, d_o, std::move(c)};
}

LinearMap map_from_choi(const ChoiMatrix& choi_matrix) {
  const std::size_t di = choi_matrix.d_in;
  const std::size_t d_o = choi_matrix.d_out;
  if (choi_matrix.c.rows() != di * d_o || !choi_matrix.c.is_square()) {
    throw ShapeError("map_from_choi: Choi matrix shape does not match d_in, d_out");
  }
  CMatrix s(d_o * d_o, di * di);
  for (std::size_t a = 0; a < d_o; ++a)
    for (std::size_t b = 0; b < d_o; ++b)
      for (std::size_t j = 0; j < di; ++j)
        for (std::size_t k = 0; k < di; ++k)
          s(a + b * d_o, j + k * di) = choi_matrix.c(a * di + j, b * di + k);
  return {di, d_o, std::move(s)};
}

KrausSet kraus_from_choi(const ChoiMatrix& choi_matrix, double tol) {
  const std::size_t di = choi_matrix.d_in;
  const std::size_t d_o = choi_matrix.d_out;
  if (!is_hermitian(choi_matrix.c, tol)) {
    throw NotCompletelyPositiveError("kraus_from_choi: Choi matrix is not hermitian");
  }
  const HermitianEigen eig = eigh(choi_matrix.c);
  if (!eig.values.empty() && eig.values.front() < -tol) {
    throw NotCompletelyPositiveError("kraus_from_choi: Choi matrix has eigenvalue " +
                                     std::to_string(eig.values.front()));
  }

  struct Pair {
    double lambda;
    std::vector<Complex> v;
  };
  std::vector<Pair> kept;
  const std::size_t n = choi_matrix.c.rows();
  for (std::size_t idx = 0; idx < eig.values.size(); ++idx) {
    if (eig.values[idx] <= tol) continue;
    std::vector<Complex> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = eig.vectors(i, idx);
    fix_phase(v);
    kept.push_back({eig.values[idx], std::move(v)});
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const Pair& a, const Pair& b) { return a.lambda > b.lambda; });
  for (std::size_t start = 0; start < kept.size();) {
    std::size_t end = start + 1;
    while (end < kept.size() && kept[end - 1].lambda - kept[end].lambda <= tol) ++end;
    std::stable_sort(kept.begin() + static_cast<std::ptrdiff_t>(start),
                     kept.begin() + static_cast<std::ptrdiff_t>(end),
                     [](const Pair& a, const Pair& b) { return lex_real_less(a.v, b.v); });
    start = end;
  }

  KrausSet out{di, d_o, {}};
  out.operators.reserve(kept.size());
  for (const auto& [lambda, v] : kept) {
    // Output index leads in the Choi ordering, so A(a, j) = sqrt(lambda) v[a * d_in + j].
    CMatrix a(d_o, di);
    const double scale = std::sqrt(lambda);
    for (std::size_t r = 0; r < d_o; ++r)
      for (std::size_t j = 0; j < di; ++j) a(r, j) = scale * v[r * di + j];
    out.operators.push_back(std::move(a));
  }
  return out;
}

KrausSet canonical_kraus(const LinearMap& map, double tol) {
  return kraus_from_choi(choi(map), tol);
}

LinearMap map_from_kraus(const KrausSet& kraus) {
  return LinearMap::from_kraus(kraus.operators, kraus.d_in, kraus.d_out);
}

PsdVerdict is_cp(const LinearMap& map, double tol) {
  const ChoiMatrix c = choi(map);
  const double lo = min_eigenvalue_hermitian(c.c);
  if (!is_hermitian(c.c, tol)) return {false, lo};
  return {lo >= -tol, lo};
}

std::string to_string(CpBranch branch) {
  return branch == CpBranch::gamma_zero ? "gamma_zero" : "gamma_positive";
}

LinearMap damped_phi(const EDMap& map) {
  if (map.gamma() == 0.0) return map.phi();
  return map.phi() - LinearMap::sandwich(map.b(), map.b().adjoint()) * Complex(1.0 / map.gamma());
}

EdCpReport is_cp_ed(const EDMap& map, double tol) {
  EdCpReport r;
  const PsdVerdict omega = is_cp(map.omega(), tol);
  r.omega_cp = omega.psd;
  r.omega_min_eigenvalue = omega.min_eigenvalue;
  if (map.gamma() <= tol) {
    r.branch = CpBranch::gamma_zero;
    const PsdVerdict phi = is_cp(map.phi(), tol);
    r.damped_phi_cp = phi.psd && map.b().max_abs() <= tol;
    r.damped_phi_min_eigenvalue = phi.min_eigenvalue;
  } else {
    r.branch = CpBranch::gamma_positive;
    const PsdVerdict damped = is_cp(damped_phi(map), tol);
    r.damped_phi_cp = damped.psd;
    r.damped_phi_min_eigenvalue = damped.min_eigenvalue;
  }
  r.cp = r.omega_cp && r.damped_phi_cp;
  r.min_choi_eigenvalue = std::min(r.omega_min_eigenvalue, r.damped_phi_min_eigenvalue);
  return r;
}

BallDecomposition ball_decompose(const CMatrix& b, const KrausSet& kraus, double gamma,
                                 double tol) {
  if (b.rows() != kraus.d_out || b.cols() != kraus.d_in) {
    throw ShapeError("ball_decompose: B shape does not match the Kraus operators");
  }
  const auto target = vectorize(b);
  const std::size_t r = kraus.size();
  BallDecomposition out;
  if (r == 0) {
    out.residual = b.frobenius_norm();
    out.member = out.residual <= tol;
    return out;
  }
  CMatrix basis(target.size(), r);
  for (std::size_t mu = 0; mu < r; ++mu) {
    const auto v = vectorize(kraus.operators[mu]);
    for (std::size_t i = 0; i < v.size(); ++i) basis(i, mu) = v[i];
  }
  out.beta = edchan::apply(pinv(basis), target);
  const auto fit = edchan::apply(basis, out.beta);
  double res = 0.0;
  for (std::size_t i = 0; i < fit.size(); ++i) res += std::norm(fit[i] - target[i]);
  out.residual = std::sqrt(res);
  for (const auto& z : out.beta) out.norm_sq += std::norm(z);
  out.member = out.residual <= tol && out.norm_sq <= gamma + tol;
  return out;
}

std::vector<BlockOperator> explicit_kraus_ed(const EDMap& map, double tol) {
  const EdCpReport report = is_cp_ed(map, tol);
  if (!report.cp) {
    throw NotCompletelyPositiveError("explicit_kraus_ed: map is not completely positive");
  }
  const std::size_t de = map.d_e();
  const std::size_t dg = map.d_g();
  const KrausSet phi_kraus = canonical_kraus(map.phi(), tol);
  const KrausSet omega_kraus = canonical_kraus(map.omega(), tol);

  std::vector<Complex> beta(phi_kraus.size(), Complex{});
  double norm_sq = 0.0;
  if (report.branch == CpBranch::gamma_positive) {
    const BallDecomposition ball = ball_decompose(map.b(), phi_kraus, map.gamma(), tol);
    if (!ball.member) {
      throw NotCompletelyPositiveError("explicit_kraus_ed: B lies outside the Kraus ball");
    }
    beta = ball.beta;
    norm_sq = ball.norm_sq;
  }

  std::vector<BlockOperator> ops;
  const CMatrix eye_g = CMatrix::identity(dg);
  const double slack = map.gamma() - norm_sq;
  if (slack > tol) {
    BlockOperator a0 = BlockOperator::zeros(de, dg);
    a0.gg = eye_g * Complex(std::sqrt(slack));
    ops.push_back(std::move(a0));
  }
  for (std::size_t mu = 0; mu < phi_kraus.size(); ++mu) {
    BlockOperator a = BlockOperator::zeros(de, dg);
    a.ee = phi_kraus.operators[mu];
    a.gg = eye_g * std::conj(beta[mu]);
    ops.push_back(std::move(a));
  }
  for (const auto& q : omega_kraus.operators) {
    BlockOperator a = BlockOperator::zeros(de, dg);
    a.ge = q;
    ops.push_back(std::move(a));
  }
  return ops;
}

KrausSet to_kraus_set(const std::vector<BlockOperator>& ops) {
  KrausSet out;
  if (ops.empty()) return out;
  const std::size_t d = ops.front().d_e() + ops.front().d_g();
  out.d_in = out.d_out = d;
  for (const auto& op : ops) out.operators.push_back(op.to_full());
  return out;
}

bool is_trace_nonincreasing(const LinearMap& phi, double tol) {
  if (phi.d_in() != phi.d_out()) throw ShapeError("is_trace_nonincreasing: phi must be e->e");
  const std::size_t de = phi.d_in();
  const CMatrix w = trace_density(phi);
  CMatrix gap(de, de);
  for (std::size_t j = 0; j < de; ++j)
    for (std::size_t l = 0; l < de; ++l) gap(j, l) = (j == l ? 1.0 : 0.0) - w(l, j);
  if (!is_hermitian(gap, tol)) return false;
  return is_psd(gap, tol).psd;
}

std::string to_string(PositivityVerdict::Status status) {
  return status == PositivityVerdict::Status::not_positive ? "NotPositive" : "NoWitnessFound";
}

PositivityVerdict is_positive_sampled(const LinearMap& map, std::size_t samples, double tol,
                                      std::uint64_t seed) {
  const std::size_t d = map.d_in();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Complex> xi(d);
  for (std::size_t s = 0; s < samples; ++s) {
    double norm = 0.0;
    for (auto& z : xi) {
      z = Complex(normal(rng), normal(rng));
      norm += std::norm(z);
    }
    const double inv = 1.0 / std::sqrt(norm);
    for (auto& z : xi) z *= inv;
    const CMatrix out = map.apply(projector(xi));
    if (!is_hermitian(out, tol)) {
      return witness_verdict(xi, min_eigenvalue_hermitian(out), s + 1, "sampled");
    }
    if (psd_by_cholesky(out, tol)) continue;
    const double lo = min_eigenvalue_hermitian(out);
    if (lo < -tol) return witness_verdict(xi, lo, s + 1, "sampled");
  }
  PositivityVerdict v;
  v.samples_drawn = samples;
  return v;
}

PositivityVerdict is_positive_ed_dg1(const EDMap& map, std::size_t samples, double tol,
                                     std::uint64_t seed) {
  if (map.d_g() != 1) {
    throw std::invalid_argument("is_positive_ed_dg1: requires a one-dimensional ground sector");
  }
  const std::size_t de = map.d_e();

  // omega(|xi><xi|) = <xi| W |xi>
  const CMatrix w = trace_density(map.omega());
  if (!is_hermitian(w, tol)) {
    // Some basis pair gives a non-real value on a PSD input.
    const double s = 1.0 / std::sqrt(2.0);
    for (std::size_t j = 0; j < de; ++j)
      for (std::size_t l = j + 1; l < de; ++l)
        for (const Complex phase : {Complex(1.0), Complex(0.0, 1.0)}) {
          std::vector<Complex> xi(de);
          xi[j] = s;
          xi[l] = s * phase;
          const CMatrix out = map.omega().apply(projector(xi));
          if (std::abs(out(0, 0).imag()) > tol) {
            return witness_verdict(std::move(xi), out(0, 0).real(), 0, "omega");
          }
        }
    for (std::size_t j = 0; j < de; ++j) {
      if (std::abs(w(j, j).imag()) > tol) {
        std::vector<Complex> xi(de);
        xi[j] = 1.0;
        return witness_verdict(std::move(xi), w(j, j).real(), 0, "omega");
      }
    }
  }
  const HermitianEigen we = eigh(w);
  if (!we.values.empty() && we.values.front() < -tol) {
    std::vector<Complex> xi(de);
    for (std::size_t i = 0; i < de; ++i) xi[i] = we.vectors(i, 0);
    return witness_verdict(std::move(xi), we.values.front(), 0, "omega");
  }

  if (map.gamma() <= tol) {
    if (map.b().max_abs() > tol) {
      // Any |xi> with B|xi> != 0 breaks positivity as the coherence weight grows.
      std::size_t best = 0;
      double best_norm = 0.0;
      for (std::size_t j = 0; j < de; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < de; ++i) col += std::norm(map.b()(i, j));
        if (col > best_norm) {
          best_norm = col;
          best = j;
        }
      }
      std::vector<Complex> xi(de);
      xi[best] = 1.0;
      return witness_verdict(std::move(xi), -std::numeric_limits<double>::infinity(), 0,
                             "b_nonzero");
    }
    PositivityVerdict v = is_positive_sampled(map.phi(), samples, tol, seed);
    if (v.not_positive()) v.source = "damped_phi";
    return v;
  }
  PositivityVerdict v = is_positive_sampled(damped_phi(map), samples, tol, seed);
  if (v.not_positive()) v.source = "damped_phi";
  return v;
}

}  // namespace edchan
