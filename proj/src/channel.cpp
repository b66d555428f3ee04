#include "edchan/channel.hpp"

#include <algorithm>
#include <cmath>

namespace edchan {

namespace {

std::string dims(std::size_t a, std::size_t b) {
  return std::to_string(a) + "->" + std::to_string(b);
}

void require_same_dims(const LinearMap& a, const LinearMap& b, const char* what) {
  if (a.d_in() != b.d_in() || a.d_out() != b.d_out()) {
    throw ShapeError(std::string(what) + ": map dimensions " + dims(a.d_in(), a.d_out()) +
                     " vs " + dims(b.d_in(), b.d_out()));
  }
}

void require_shape(const CMatrix& m, std::size_t rows, std::size_t cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ShapeError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                     std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// LinearMap

LinearMap::LinearMap(std::size_t d_in, std::size_t d_out, CMatrix s)
    : d_in_(d_in), d_out_(d_out), s_(std::move(s)) {
  require_shape(s_, d_out * d_out, d_in * d_in, "LinearMap");
}

LinearMap LinearMap::identity(std::size_t d) {
  return {d, d, CMatrix::identity(d * d)};
}

LinearMap LinearMap::zero(std::size_t d_in, std::size_t d_out) {
  return {d_in, d_out, CMatrix(d_out * d_out, d_in * d_in)};
}

LinearMap LinearMap::sandwich(const CMatrix& left, const CMatrix& right) {
  if (left.cols() != right.rows() || left.rows() != right.cols()) {
    throw ShapeError("sandwich: left must be d_out x d_in and right d_in x d_out");
  }
  // vec(L X R) = (R^T (x) L) vec(X)
  return {left.cols(), left.rows(), kron(right.transpose(), left)};
}

LinearMap LinearMap::from_kraus(std::span<const CMatrix> ops, std::size_t d_in,
                                std::size_t d_out) {
  CMatrix s(d_out * d_out, d_in * d_in);
  for (const auto& a : ops) {
    require_shape(a, d_out, d_in, "from_kraus");
    s += kron(a.conj(), a);
  }
  return {d_in, d_out, std::move(s)};
}

LinearMap LinearMap::from_action(std::size_t d_in, std::size_t d_out,
                                 const std::function<CMatrix(const CMatrix&)>& action) {
  CMatrix s(d_out * d_out, d_in * d_in);
  for (std::size_t k = 0; k < d_in; ++k)
    for (std::size_t j = 0; j < d_in; ++j) {
      const CMatrix out = action(CMatrix::unit(d_in, d_in, j, k));
      require_shape(out, d_out, d_out, "from_action");
      const auto v = vectorize(out);
      const std::size_t col = j + k * d_in;
      for (std::size_t r = 0; r < v.size(); ++r) s(r, col) = v[r];
    }
  return {d_in, d_out, std::move(s)};
}

LinearMap LinearMap::transpose_map(std::size_t d) {
  return from_action(d, d, [](const CMatrix& x) { return x.transpose(); });
}

LinearMap LinearMap::trace_times(std::size_t d_in, const CMatrix& state) {
  if (!state.is_square()) throw ShapeError("trace_times: state must be square");
  const std::size_t d_out = state.rows();
  const auto vs = vectorize(state);
  CMatrix s(d_out * d_out, d_in * d_in);
  for (std::size_t j = 0; j < d_in; ++j)
    for (std::size_t r = 0; r < vs.size(); ++r) s(r, j + j * d_in) = vs[r];
  return {d_in, d_out, std::move(s)};
}

CMatrix LinearMap::apply(const CMatrix& x) const {
  require_shape(x, d_in_, d_in_, "LinearMap::apply");
  const auto v = vectorize(x);
  return devectorize(edchan::apply(s_, v), d_out_, d_out_);
}

LinearMap& LinearMap::operator+=(const LinearMap& rhs) {
  require_same_dims(*this, rhs, "LinearMap +");
  s_ += rhs.s_;
  return *this;
}

LinearMap& LinearMap::operator-=(const LinearMap& rhs) {
  require_same_dims(*this, rhs, "LinearMap -");
  s_ -= rhs.s_;
  return *this;
}

LinearMap& LinearMap::operator*=(Complex s) noexcept {
  s_ *= s;
  return *this;
}

LinearMap compose(const LinearMap& outer, const LinearMap& inner) {
  if (outer.d_in() != inner.d_out()) {
    throw ShapeError("compose: " + dims(inner.d_in(), inner.d_out()) + " then " +
                     dims(outer.d_in(), outer.d_out()));
  }
  return {inner.d_in(), outer.d_out(), outer.matrix() * inner.matrix()};
}

CMatrix trace_density(const LinearMap& map) {
  const std::size_t d_in = map.d_in();
  const std::size_t d_out = map.d_out();
  const CMatrix& s = map.matrix();
  CMatrix w(d_in, d_in);
  for (std::size_t l = 0; l < d_in; ++l)
    for (std::size_t j = 0; j < d_in; ++j) {
      Complex tr{};
      for (std::size_t i = 0; i < d_out; ++i) tr += s(i + i * d_out, j + l * d_in);
      w(l, j) = tr;
    }
  return w;
}

// ---------------------------------------------------------------------------
// BlockOperator

BlockOperator::BlockOperator(CMatrix ee_, CMatrix eg_, CMatrix ge_, CMatrix gg_)
    : ee(std::move(ee_)), eg(std::move(eg_)), ge(std::move(ge_)), gg(std::move(gg_)) {
  const std::size_t de = ee.rows();
  const std::size_t dg = gg.rows();
  require_shape(ee, de, de, "BlockOperator ee");
  require_shape(eg, de, dg, "BlockOperator eg");
  require_shape(ge, dg, de, "BlockOperator ge");
  require_shape(gg, dg, dg, "BlockOperator gg");
}

BlockOperator BlockOperator::zeros(std::size_t d_e, std::size_t d_g) {
  return {CMatrix(d_e, d_e), CMatrix(d_e, d_g), CMatrix(d_g, d_e), CMatrix(d_g, d_g)};
}

BlockOperator BlockOperator::from_full(const CMatrix& x, std::size_t d_e, std::size_t d_g) {
  require_shape(x, d_e + d_g, d_e + d_g, "BlockOperator::from_full");
  return {x.block(0, 0, d_e, d_e), x.block(0, d_e, d_e, d_g), x.block(d_e, 0, d_g, d_e),
          x.block(d_e, d_e, d_g, d_g)};
}

CMatrix BlockOperator::to_full() const {
  const std::size_t de = d_e();
  CMatrix x(de + d_g(), de + d_g());
  x.set_block(0, 0, ee);
  x.set_block(0, de, eg);
  x.set_block(de, 0, ge);
  x.set_block(de, de, gg);
  return x;
}

bool BlockOperator::is_hermitian(double tol) const {
  return edchan::is_hermitian(ee, tol) && edchan::is_hermitian(gg, tol) &&
         max_abs_diff(ge, eg.adjoint()) <= tol;
}

// ---------------------------------------------------------------------------
// EDMap

EDMap::EDMap(LinearMap phi, LinearMap omega, CMatrix b, double gamma)
    : phi_(std::move(phi)), omega_(std::move(omega)), b_(std::move(b)), gamma_(gamma) {
  if (phi_.d_in() != phi_.d_out()) throw ShapeError("EDMap: phi must map B(H_e) to itself");
  if (omega_.d_in() != phi_.d_in()) throw ShapeError("EDMap: omega must act on B(H_e)");
  require_shape(b_, phi_.d_in(), phi_.d_in(), "EDMap B");
  if (!(gamma_ >= 0.0) || !std::isfinite(gamma_)) {
    throw std::invalid_argument("EDMap: gamma must be finite and >= 0");
  }
}

EDMap EDMap::identity(std::size_t d_e, std::size_t d_g) {
  return {LinearMap::identity(d_e), LinearMap::zero(d_e, d_g), CMatrix::identity(d_e), 1.0};
}

BlockOperator EDMap::apply(const BlockOperator& x) const {
  if (x.d_e() != d_e() || x.d_g() != d_g()) {
    throw ShapeError("EDMap::apply: operator sectors " + dims(x.d_e(), x.d_g()) +
                     " vs map sectors " + dims(d_e(), d_g()));
  }
  return {phi_.apply(x.ee), b_ * x.eg, x.ge * b_.adjoint(),
          x.gg * Complex(gamma_) + omega_.apply(x.ee)};
}

LinearMap EDMap::full_map() const {
  const std::size_t de = d_e();
  const std::size_t dg = d_g();
  return LinearMap::from_action(dim(), dim(), [&](const CMatrix& x) {
    return apply(BlockOperator::from_full(x, de, dg)).to_full();
  });
}

BlockOperator apply(const EDMap& map, const BlockOperator& x) { return map.apply(x); }

bool is_trace_preserving(const EDMap& map, double tol) {
  if (std::abs(map.gamma() - 1.0) > tol) return false;
  const CMatrix w = trace_density(map.phi()) + trace_density(map.omega());
  return max_abs_diff(w, CMatrix::identity(map.d_e())) <= tol;
}

std::string to_string(NonInvertibleReason reason) {
  switch (reason) {
    case NonInvertibleReason::gamma_zero:
      return "gamma_zero";
    case NonInvertibleReason::phi_singular:
      return "phi_singular";
    case NonInvertibleReason::b_singular:
      return "B_singular";
  }
  return "unknown";
}

NonInvertibleError::NonInvertibleError(NonInvertibleReason reason)
    : std::runtime_error("excitation-damping map is not invertible: " + to_string(reason)),
      reason_(reason) {}

EDMap invert(const EDMap& map) {
  if (map.gamma() <= kGammaZeroThreshold) {
    throw NonInvertibleError(NonInvertibleReason::gamma_zero);
  }
  if (condition_number(map.phi().matrix()) > kSingularConditionLimit) {
    throw NonInvertibleError(NonInvertibleReason::phi_singular);
  }
  if (condition_number(map.b()) > kSingularConditionLimit) {
    throw NonInvertibleError(NonInvertibleReason::b_singular);
  }
  const double inv_gamma = 1.0 / map.gamma();
  LinearMap phi_inv(map.d_e(), map.d_e(), inverse(map.phi().matrix()));
  LinearMap omega_inv = compose(map.omega(), phi_inv) * Complex(-inv_gamma);
  return {std::move(phi_inv), std::move(omega_inv), inverse(map.b()), inv_gamma};
}

LinearMap build_tp_omega(const LinearMap& phi, const CMatrix& state) {
  constexpr double kStateTol = 1e-10;
  if (phi.d_in() != phi.d_out()) throw ShapeError("build_tp_omega: phi must be e->e");
  if (!state.is_square()) throw ShapeError("build_tp_omega: state must be square");
  if (!is_hermitian(state, kStateTol) || std::abs(state.trace() - 1.0) > kStateTol ||
      min_eigenvalue_hermitian(state) < -kStateTol) {
    throw std::invalid_argument("build_tp_omega: Omega is not a state (PSD, unit trace)");
  }
  // omega(X) = tr(X) state - tr(phi(X)) state, both rank-one in vectorized form.
  const std::size_t de = phi.d_in();
  const CMatrix w = trace_density(phi);
  CMatrix leak = CMatrix::identity(de) - w;
  const auto vs = vectorize(state);
  CMatrix s(vs.size(), de * de);
  for (std::size_t l = 0; l < de; ++l)
    for (std::size_t j = 0; j < de; ++j) {
      // coefficient of x_jl in tr[X - phi(X)] is leak(l, j)
      const Complex coeff = leak(l, j);
      for (std::size_t r = 0; r < vs.size(); ++r) s(r, j + l * de) = coeff * vs[r];
    }
  return {de, state.rows(), std::move(s)};
}

EDMap build_tp_map(const LinearMap& phi, const CMatrix& b, const CMatrix& state) {
  return {phi, build_tp_omega(phi, state), b, 1.0};
}

EDMap qubit_map(Complex a, Complex b, Complex q, double gamma) {
  return {LinearMap(1, 1, CMatrix{{std::norm(a)}}), LinearMap(1, 1, CMatrix{{std::norm(q)}}),
          CMatrix{{b}}, gamma};
}

EDMap compose(const EDMap& m2, const EDMap& m1) {
  if (m2.d_e() != m1.d_e() || m2.d_g() != m1.d_g()) {
    throw ShapeError("compose: sector dimensions " + dims(m1.d_e(), m1.d_g()) + " vs " +
                     dims(m2.d_e(), m2.d_g()));
  }
  LinearMap omega = compose(m2.omega(), m1.phi()) + m1.omega() * Complex(m2.gamma());
  return {compose(m2.phi(), m1.phi()), std::move(omega), m2.b() * m1.b(),
          m2.gamma() * m1.gamma()};
}

double max_abs_diff(const EDMap& a, const EDMap& b) {
  if (a.d_e() != b.d_e() || a.d_g() != b.d_g()) throw ShapeError("max_abs_diff: sector mismatch");
  return std::max({max_abs_diff(a.phi().matrix(), b.phi().matrix()),
                   max_abs_diff(a.omega().matrix(), b.omega().matrix()),
                   max_abs_diff(a.b(), b.b()), std::abs(a.gamma() - b.gamma())});
}

}  // namespace edchan
