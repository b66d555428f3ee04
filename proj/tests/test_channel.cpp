#include <doctest.h>

#include <cmath>
#include <optional>

#include "edchan/channel.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace edchan;
using edchan::testing::Rng;

namespace {

/// Phi(X) evaluated by the oracle superoperator.
CMatrix oracle_apply(const EDMap& map, const CMatrix& x) {
  const std::size_t d = map.dim();
  return devectorize(edchan::apply(edchan::testing::full_superop_oracle(map), vectorize(x)), d, d);
}

EDMap random_invertible(Rng& rng, std::size_t d_e, std::size_t d_g) {
  // Near-identity phi and B keep the condition numbers small.
  const LinearMap phi = LinearMap::identity(d_e) + 0.2 * edchan::testing::random_hp_map(rng, d_e, d_e, 0.5);
  const CMatrix b = CMatrix::identity(d_e) + edchan::testing::random_matrix(rng, d_e, d_e, 0.2);
  return EDMap(phi, edchan::testing::random_hp_map(rng, d_e, d_g, 0.5), b, rng.uniform(0.3, 1.5));
}

}  // namespace

TEST_CASE("linear map constructors agree") {
  Rng rng(1);
  const auto ops = edchan::testing::random_kraus(rng, 3, 2, 3);
  const LinearMap kraus = LinearMap::from_kraus(ops, 2, 3);
  const CMatrix x = edchan::testing::random_matrix(rng, 2, 2);
  CMatrix direct(3, 3);
  for (const auto& a : ops) direct += a * x * a.adjoint();
  CHECK(max_abs_diff(kraus(x), direct) <= 1e-12);

  const LinearMap sw = LinearMap::sandwich(ops[0], ops[1].adjoint());
  CHECK(max_abs_diff(sw(x), ops[0] * x * ops[1].adjoint()) <= 1e-12);

  const LinearMap tabulated = LinearMap::from_action(2, 3, [&](const CMatrix& m) { return kraus(m); });
  CHECK(max_abs_diff(tabulated.matrix(), kraus.matrix()) <= 1e-12);

  CHECK(max_abs_diff(LinearMap::transpose_map(3)(direct), direct.transpose()) == 0.0);
  const CMatrix rho = edchan::testing::random_density(rng, 3);
  CHECK(max_abs_diff(LinearMap::trace_times(2, rho)(x), x.trace() * rho) <= 1e-12);
  CHECK_THROWS_AS(LinearMap(2, 2, CMatrix(3, 4)), ShapeError);
}

TEST_CASE("trace density reproduces traces") {
  Rng rng(2);
  const LinearMap m = edchan::testing::random_hp_map(rng, 3, 2);
  const CMatrix w = trace_density(m);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix x = edchan::testing::random_matrix(rng, 3, 3);
    CHECK(std::abs(m(x).trace() - (w * x).trace()) <= 1e-12);
  }
}

TEST_CASE("block operators round trip") {
  Rng rng(3);
  const CMatrix x = edchan::testing::random_matrix(rng, 5, 5);
  const BlockOperator b = BlockOperator::from_full(x, 2, 3);
  CHECK(b.to_full() == x);
  CHECK(b.eg.rows() == 2);
  CHECK(b.eg.cols() == 3);
  CHECK_FALSE(b.is_hermitian(1e-9));
  CHECK(BlockOperator::from_full(hermitian_part(x), 2, 3).is_hermitian(1e-12));
  CHECK_THROWS_AS(BlockOperator(CMatrix(2, 2), CMatrix(2, 2), CMatrix(3, 2), CMatrix(3, 3)), ShapeError);
}

TEST_CASE("apply and full_map agree with the entrywise oracle") {
  Rng rng(4);
  for (std::size_t de = 1; de <= 3; ++de) {
    for (std::size_t dg = 1; dg <= 3; ++dg) {
      const EDMap m = edchan::testing::random_edmap(rng, de, dg);
      CHECK(max_abs_diff(m.full_map().matrix(), edchan::testing::full_superop_oracle(m)) <= 1e-12);
      const CMatrix x = edchan::testing::random_matrix(rng, de + dg, de + dg);
      CHECK(max_abs_diff(apply(m, BlockOperator::from_full(x, de, dg)).to_full(), oracle_apply(m, x)) <= 1e-12);
    }
  }
}

TEST_CASE("apply is linear and hermiticity preserving") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t de = 1 + rng.index(3), dg = 1 + rng.index(3);
    const EDMap m = edchan::testing::random_edmap(rng, de, dg);
    const CMatrix x = edchan::testing::random_matrix(rng, de + dg, de + dg);
    const CMatrix y = edchan::testing::random_matrix(rng, de + dg, de + dg);
    const Complex s{0.3, -1.2};
    auto phi = [&](const CMatrix& z) { return apply(m, BlockOperator::from_full(z, de, dg)).to_full(); };
    CHECK(max_abs_diff(phi(x + s * y), phi(x) + s * phi(y)) <= 1e-12);
    CHECK(is_hermitian(phi(hermitian_part(x)), 1e-12));
  }
}

TEST_CASE("edmap validation") {
  CHECK_THROWS_AS(EDMap(LinearMap::identity(2), LinearMap::zero(2, 1), CMatrix::identity(2), -0.1),
                  std::invalid_argument);
  CHECK_THROWS(EDMap(LinearMap::identity(2), LinearMap::zero(3, 1), CMatrix::identity(2), 1.0));
  CHECK_THROWS(EDMap(LinearMap::identity(2), LinearMap::zero(2, 1), CMatrix::identity(3), 1.0));
}

TEST_CASE("trace preservation") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t de = 1 + rng.index(3), dg = 1 + rng.index(3);
    const LinearMap phi = 0.4 * edchan::testing::random_cp_map(rng, de, de, 2, 0.4);
    const EDMap m = build_tp_map(phi, edchan::testing::random_matrix(rng, de, de, 0.3),
                                 edchan::testing::random_density(rng, dg));
    CHECK(is_trace_preserving(m, 1e-10));
    for (int k = 0; k < 3; ++k) {
      const CMatrix x = edchan::testing::random_hermitian(rng, de + dg);
      CHECK(std::abs(apply(m, BlockOperator::from_full(x, de, dg)).trace() - x.trace()) <= 1e-10);
    }
  }
  CHECK_FALSE(is_trace_preserving(qubit_map(0.8, 0.8, 0.5, 1.0), 1e-9));
  CHECK_FALSE(is_trace_preserving(qubit_map(0.8, 0.8, 0.6, 0.9), 1e-9));
  CHECK(is_trace_preserving(qubit_map(0.8, 0.8, 0.6, 1.0), 1e-12));
  CHECK_THROWS_AS(build_tp_omega(LinearMap::identity(2), CMatrix{{0.5, 0.0}, {0.0, 0.4}}), std::invalid_argument);
  CHECK_THROWS_AS(build_tp_omega(LinearMap::identity(2), CMatrix{{1.5, 0.0}, {0.0, -0.5}}), std::invalid_argument);
}

TEST_CASE("build_tp_omega matches its defining formula") {
  Rng rng(7);
  const LinearMap phi = edchan::testing::random_hp_map(rng, 3, 3);
  const CMatrix state = edchan::testing::random_density(rng, 2);
  const LinearMap omega = build_tp_omega(phi, state);
  const CMatrix x = edchan::testing::random_matrix(rng, 3, 3);
  CHECK(max_abs_diff(omega(x), (x - phi(x)).trace() * state) <= 1e-12);
}

TEST_CASE("composition") {
  Rng rng(8);
  const EDMap m = edchan::testing::random_edmap(rng, 2, 3);
  CHECK(max_abs_diff(compose(EDMap::identity(2, 3), m), m) <= 1e-14);
  CHECK(max_abs_diff(compose(m, EDMap::identity(2, 3)), m) <= 1e-14);

  const double a1 = 0.7, a2 = 0.45;
  const auto ad = [](double a) { return qubit_map(a, a, std::sqrt(1.0 - a * a), 1.0); };
  CHECK(max_abs_diff(compose(ad(a2), ad(a1)), ad(a2 * a1)) <= 1e-15);

  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t de = 1 + rng.index(3), dg = 1 + rng.index(3);
    const EDMap m1 = edchan::testing::random_edmap(rng, de, dg);
    const EDMap m2 = edchan::testing::random_edmap(rng, de, dg);
    const CMatrix product = edchan::testing::full_superop_oracle(m2) * edchan::testing::full_superop_oracle(m1);
    // The product is again of excitation-damping form with the composed blocks.
    CHECK(max_abs_diff(edchan::testing::full_superop_oracle(compose(m2, m1)), product) <= 1e-12);
  }
}

TEST_CASE("inversion round trip") {
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t de = 1 + rng.index(3), dg = 1 + rng.index(3);
    const EDMap m = random_invertible(rng, de, dg);
    const EDMap inv = invert(m);
    const LinearMap id = LinearMap::identity(de + dg);
    CHECK(max_abs_diff(compose(inv, m).full_map().matrix(), id.matrix()) <= 1e-9);
    CHECK(max_abs_diff(compose(m, inv).full_map().matrix(), id.matrix()) <= 1e-9);
  }
}

TEST_CASE("inversion names the failed hypothesis") {
  Rng rng(10);
  const EDMap m = random_invertible(rng, 2, 2);
  auto reason = [](const EDMap& x) {
    try {
      invert(x);
    } catch (const NonInvertibleError& e) {
      return std::optional<NonInvertibleReason>(e.reason());
    }
    return std::optional<NonInvertibleReason>();
  };
  CHECK(reason(EDMap(m.phi(), m.omega(), m.b(), 0.0)) == NonInvertibleReason::gamma_zero);
  CHECK(reason(EDMap(LinearMap::zero(2, 2), m.omega(), m.b(), 1.0)) == NonInvertibleReason::phi_singular);
  CHECK(reason(EDMap(m.phi(), m.omega(), CMatrix{{1.0, 1.0}, {1.0, 1.0}}, 1.0)) == NonInvertibleReason::b_singular);
  // gamma is checked first even when everything is broken.
  CHECK(reason(EDMap(LinearMap::zero(2, 2), m.omega(), CMatrix(2, 2), 0.0)) == NonInvertibleReason::gamma_zero);
  CHECK(to_string(NonInvertibleReason::b_singular) == "B_singular");
  CHECK_FALSE(reason(m).has_value());
}

TEST_CASE("qubit map blocks") {
  const EDMap m = qubit_map({0.6, 0.2}, {0.1, -0.3}, {0.5, 0.5}, 0.7);
  const BlockOperator x(CMatrix{{2.0}}, CMatrix{{{1.0, 1.0}}}, CMatrix{{{1.0, -1.0}}}, CMatrix{{3.0}});
  const BlockOperator y = m.apply(x);
  CHECK(std::abs(y.ee(0, 0) - 0.4 * 2.0) <= 1e-15);
  CHECK(std::abs(y.eg(0, 0) - Complex(0.1, -0.3) * Complex(1.0, 1.0)) <= 1e-15);
  CHECK(std::abs(y.ge(0, 0) - Complex(1.0, -1.0) * Complex(0.1, 0.3)) <= 1e-15);
  CHECK(std::abs(y.gg(0, 0) - (0.7 * 3.0 + 0.5 * 2.0)) <= 1e-15);
}
