#include "generators.hpp"

#include <cmath>

namespace edchan::testing {

CMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double scale) {
  CMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = scale * rng.complex_normal();
  }
  return m;
}

CMatrix random_hermitian(Rng& rng, std::size_t d, double scale) {
  return hermitian_part(random_matrix(rng, d, d, scale));
}

CMatrix random_psd(Rng& rng, std::size_t d, double scale) {
  const CMatrix a = random_matrix(rng, d, d, scale);
  return hermitian_part(a.adjoint() * a);
}

CMatrix random_density(Rng& rng, std::size_t d) {
  CMatrix rho = random_psd(rng, d);
  rho *= 1.0 / rho.trace().real();
  return rho;
}

std::vector<CMatrix> random_kraus(Rng& rng, std::size_t count, std::size_t d_in, std::size_t d_out,
                                  double scale) {
  std::vector<CMatrix> ops;
  for (std::size_t i = 0; i < count; ++i) ops.push_back(random_matrix(rng, d_out, d_in, scale));
  return ops;
}

LinearMap random_cp_map(Rng& rng, std::size_t d_in, std::size_t d_out, std::size_t count,
                        double scale) {
  return LinearMap::from_kraus(random_kraus(rng, count, d_in, d_out, scale), d_in, d_out);
}

LinearMap random_hp_map(Rng& rng, std::size_t d_in, std::size_t d_out, double scale) {
  return random_cp_map(rng, d_in, d_out, 2, scale) - random_cp_map(rng, d_in, d_out, 1, scale);
}

EDMap random_edmap(Rng& rng, std::size_t d_e, std::size_t d_g) {
  return EDMap(random_hp_map(rng, d_e, d_e, 0.5), random_hp_map(rng, d_e, d_g, 0.5),
               random_matrix(rng, d_e, d_e, 0.5), rng.uniform(0.0, 2.0));
}

EDMap random_cp_edmap(Rng& rng, std::size_t d_e, std::size_t d_g, double ball_fraction) {
  const std::size_t r = 1 + rng.index(d_e * d_e);
  const auto ops = random_kraus(rng, r, d_e, d_e, 0.5);
  const double gamma = rng.uniform(0.2, 1.5);
  std::vector<Complex> beta(r);
  double norm_sq = 0.0;
  for (auto& b : beta) {
    b = rng.complex_normal();
    norm_sq += std::norm(b);
  }
  const double s = std::sqrt(ball_fraction * gamma / norm_sq);
  CMatrix b(d_e, d_e);
  for (std::size_t mu = 0; mu < r; ++mu) b += (s * beta[mu]) * ops[mu];
  return EDMap(LinearMap::from_kraus(ops, d_e, d_e),
               random_cp_map(rng, d_e, d_g, 1 + rng.index(3), 0.5), b, gamma);
}

SemigroupSpec random_semigroup(Rng& rng, std::size_t d_e, std::size_t d_g, bool with_tp, double scale) {
  SemigroupSpec spec;
  spec.gen.h = random_hermitian(rng, d_e, scale);
  spec.gen.g = random_psd(rng, d_e, scale);
  const std::size_t nf = rng.index(3);
  double c_norm_sq = 0.0;
  for (std::size_t mu = 0; mu < nf; ++mu) {
    spec.gen.f.push_back(random_matrix(rng, d_e, d_e, 0.5 * scale));
    spec.c.push_back(rng.complex_normal());
    c_norm_sq += std::norm(spec.c.back());
  }
  // Scale c into the unit ball.
  if (nf > 0) {
    const double s = rng.uniform(0.1, 0.95) / std::sqrt(c_norm_sq);
    for (auto& c : spec.c) c *= s;
  }
  spec.epsilon = rng.uniform(-1.0, 1.0);
  spec.kappa = rng.uniform(0.0, 1.0);
  if (with_tp) {
    // A random channel on the ground sector as the sink.
    auto sink_ops = random_kraus(rng, 2, d_g, d_g);
    CMatrix s(d_g, d_g);
    for (const auto& k : sink_ops) s += k.adjoint() * k;
    const HermitianEigen eig = eigh(s);
    CMatrix inv_sqrt(d_g, d_g);
    for (std::size_t i = 0; i < d_g; ++i) inv_sqrt(i, i) = 1.0 / std::sqrt(eig.values[i]);
    const CMatrix fix = eig.vectors * inv_sqrt * eig.vectors.adjoint();
    for (auto& k : sink_ops) k = k * fix;
    spec.psi = psi_from_sink(spec.gen.g, LinearMap::from_kraus(sink_ops, d_g, d_g), 1e-12).psi;
  } else {
    spec.psi = random_cp_map(rng, d_e, d_g, 2, scale);
  }
  return spec;
}

}  // namespace edchan::testing
