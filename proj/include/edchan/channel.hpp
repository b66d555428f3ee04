#pragma once

// Superoperators, block operators on H_e (+) H_g, and excitation-damping maps
//
//            [ X_ee  X_eg ]      [ phi(X_ee)        B X_eg                      ]
//   Phi  :   [ X_ge  X_gg ]  ->  [ X_ge B^dagger    gamma X_gg + omega(X_ee)    ]
//
// Superoperators act on column-stacked operators (see vectorize()).

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "edchan/matcore.hpp"

namespace edchan {

/// Linear map B(C^d_in) -> B(C^d_out) stored as a d_out^2 x d_in^2 matrix on
/// column-stacked operators.
class LinearMap {
 public:
  LinearMap() = default;
  LinearMap(std::size_t d_in, std::size_t d_out, CMatrix s);

  static LinearMap identity(std::size_t d);
  static LinearMap zero(std::size_t d_in, std::size_t d_out);
  /// X -> left X right. left is d_out x d_in, right is d_in x d_out.
  static LinearMap sandwich(const CMatrix& left, const CMatrix& right);
  /// X -> sum_mu A_mu X A_mu^dagger; every operator is d_out x d_in.
  static LinearMap from_kraus(std::span<const CMatrix> ops, std::size_t d_in, std::size_t d_out);
  /// Tabulates an arbitrary linear action on the matrix units.
  static LinearMap from_action(std::size_t d_in, std::size_t d_out,
                               const std::function<CMatrix(const CMatrix&)>& action);
  static LinearMap transpose_map(std::size_t d);
  /// X -> tr(X) * state.
  static LinearMap trace_times(std::size_t d_in, const CMatrix& state);

  std::size_t d_in() const noexcept { return d_in_; }
  std::size_t d_out() const noexcept { return d_out_; }
  const CMatrix& matrix() const noexcept { return s_; }

  CMatrix apply(const CMatrix& x) const;
  CMatrix operator()(const CMatrix& x) const { return apply(x); }

  LinearMap& operator+=(const LinearMap& rhs);
  LinearMap& operator-=(const LinearMap& rhs);
  LinearMap& operator*=(Complex s) noexcept;
  friend LinearMap operator+(LinearMap a, const LinearMap& b) { return a += b; }
  friend LinearMap operator-(LinearMap a, const LinearMap& b) { return a -= b; }
  friend LinearMap operator*(LinearMap a, Complex s) { return a *= s; }
  friend LinearMap operator*(Complex s, LinearMap a) { return a *= s; }

 private:
  std::size_t d_in_ = 0;
  std::size_t d_out_ = 0;
  CMatrix s_;
};

/// outer o inner.
LinearMap compose(const LinearMap& outer, const LinearMap& inner);

/// The operator W with tr map(X) = tr(W X) for all X; W(l, j) = tr map(|j><l|).
CMatrix trace_density(const LinearMap& map);

/// Operator on H_e (+) H_g split into its four sector blocks.
struct BlockOperator {
  CMatrix ee;
  CMatrix eg;
  CMatrix ge;
  CMatrix gg;

  BlockOperator() = default;
  /// Validates block shapes.
  BlockOperator(CMatrix ee, CMatrix eg, CMatrix ge, CMatrix gg);

  static BlockOperator zeros(std::size_t d_e, std::size_t d_g);
  static BlockOperator from_full(const CMatrix& x, std::size_t d_e, std::size_t d_g);

  std::size_t d_e() const noexcept { return ee.rows(); }
  std::size_t d_g() const noexcept { return gg.rows(); }
  CMatrix to_full() const;
  /// ee, gg hermitian and ge == eg^dagger.
  bool is_hermitian(double tol) const;
  Complex trace() const { return ee.trace() + gg.trace(); }
};

/// Excitation-damping map (phi, omega, B, gamma).
class EDMap {
 public:
  EDMap() = default;
  /// phi: e->e, omega: e->g, B: d_e x d_e, gamma >= 0.
  EDMap(LinearMap phi, LinearMap omega, CMatrix b, double gamma);

  static EDMap identity(std::size_t d_e, std::size_t d_g);

  std::size_t d_e() const noexcept { return phi_.d_in(); }
  std::size_t d_g() const noexcept { return omega_.d_out(); }
  std::size_t dim() const noexcept { return d_e() + d_g(); }
  const LinearMap& phi() const noexcept { return phi_; }
  const LinearMap& omega() const noexcept { return omega_; }
  const CMatrix& b() const noexcept { return b_; }
  double gamma() const noexcept { return gamma_; }

  BlockOperator apply(const BlockOperator& x) const;
  /// Phi as a superoperator on B(H_e (+) H_g).
  LinearMap full_map() const;

 private:
  LinearMap phi_;
  LinearMap omega_;
  CMatrix b_;
  double gamma_ = 1.0;
};

BlockOperator apply(const EDMap& map, const BlockOperator& x);

/// gamma == 1 and tr phi(E_jl) + tr omega(E_jl) == delta_jl on every matrix unit.
bool is_trace_preserving(const EDMap& map, double tol);

/// Condition-number limit above which phi's matrix or B count as singular.
inline constexpr double kSingularConditionLimit = 1e12;
/// gamma at or below this counts as zero for inversion.
inline constexpr double kGammaZeroThreshold = 1e-12;

enum class NonInvertibleReason { gamma_zero, phi_singular, b_singular };

std::string to_string(NonInvertibleReason reason);

class NonInvertibleError : public std::runtime_error {
 public:
  explicit NonInvertibleError(NonInvertibleReason reason);
  NonInvertibleReason reason() const noexcept { return reason_; }

 private:
  NonInvertibleReason reason_;
};

/// (phi^-1, -gamma^-1 omega o phi^-1, B^-1, gamma^-1). Throws NonInvertibleError
/// naming the first failed hypothesis (checked in the order gamma, phi, B).
EDMap invert(const EDMap& map);

/// omega(X) = tr[X - phi(X)] * state. state must be a density matrix (within 1e-10).
LinearMap build_tp_omega(const LinearMap& phi, const CMatrix& state);

/// The manifestly trace preserving map with gamma = 1 and omega from build_tp_omega.
EDMap build_tp_map(const LinearMap& phi, const CMatrix& b, const CMatrix& state);

/// d_e = d_g = 1 map with blocks (|a|^2 x_ee, b x_eg, b* x_ge, gamma x_gg + |q|^2 x_ee).
EDMap qubit_map(Complex a, Complex b, Complex q, double gamma);

/// m2 o m1 = (phi2 o phi1, omega2 o phi1 + gamma2 omega1, B2 B1, gamma2 gamma1).
EDMap compose(const EDMap& m2, const EDMap& m1);

/// Max-entry distance between two maps over all four components.
double max_abs_diff(const EDMap& a, const EDMap& b);

}  // namespace edchan
