#pragma once

// Complete positivity and positivity of linear maps and excitation-damping
// maps: Choi matrices, canonical Kraus sets, the Kraus-ball decomposition of
// B, block Kraus operators for Phi, and a one-sided positivity sampler.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "edchan/channel.hpp"
#include "edchan/matcore.hpp"

namespace edchan {

/// Unnormalized Choi matrix C = sum_jk map(E_jk) (x) E_jk, output factor first.
struct ChoiMatrix {
  std::size_t d_in = 0;
  std::size_t d_out = 0;
  CMatrix c;
};

struct KrausSet {
  std::size_t d_in = 0;
  std::size_t d_out = 0;
  std::vector<CMatrix> operators;

  std::size_t size() const noexcept { return operators.size(); }
};

/// Coefficients of B in a Kraus family plus the ball-membership verdict.
struct BallDecomposition {
  std::vector<Complex> beta;
  double residual = 0.0;
  double norm_sq = 0.0;
  bool member = false;
};

class NotCompletelyPositiveError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

ChoiMatrix choi(const LinearMap& map);
LinearMap map_from_choi(const ChoiMatrix& c);

/// Canonical Kraus set from the Choi eigendecomposition: eigenvalues above tol,
/// sorted descending (near-ties ordered by the real parts of the eigenvector
/// entries), each eigenvector phase-fixed so its largest entry is real positive.
/// Throws NotCompletelyPositiveError if the Choi matrix has an eigenvalue below -tol.
KrausSet kraus_from_choi(const ChoiMatrix& c, double tol);
KrausSet canonical_kraus(const LinearMap& map, double tol);
LinearMap map_from_kraus(const KrausSet& kraus);

/// Choi-matrix PSD test. Maps that are not hermiticity preserving are reported
/// as not CP, with the minimum eigenvalue of the Choi matrix's hermitian part.
PsdVerdict is_cp(const LinearMap& map, double tol);

enum class CpBranch { gamma_zero, gamma_positive };
std::string to_string(CpBranch branch);

struct EdCpReport {
  bool cp = false;
  bool omega_cp = false;
  /// gamma > 0: phi - B(.)B^dagger / gamma is CP. gamma == 0: phi is CP and B == 0.
  bool damped_phi_cp = false;
  CpBranch branch = CpBranch::gamma_positive;
  double omega_min_eigenvalue = 0.0;
  double damped_phi_min_eigenvalue = 0.0;
  /// min of the two eigenvalues above.
  double min_choi_eigenvalue = 0.0;
};

/// phi - gamma^-1 B(.)B^dagger; just phi when gamma is zero.
LinearMap damped_phi(const EDMap& map);

/// Sector-wise CP criterion: omega CP, plus either (gamma ~ 0, B ~ 0, phi CP)
/// or (gamma > 0, phi - gamma^-1 B(.)B^dagger CP). gamma and B are treated as
/// zero when at or below tol.
EdCpReport is_cp_ed(const EDMap& map, double tol);

/// Least-squares fit B = sum_mu beta_mu A_mu. Membership requires
/// residual <= tol and sum |beta_mu|^2 <= gamma + tol.
BallDecomposition ball_decompose(const CMatrix& b, const KrausSet& kraus, double gamma, double tol);

/// Block Kraus operators of a CP excitation-damping map: diag(0, c0 I_g),
/// diag(A_mu, beta_mu^* I_g) and the lower-left Q_nu. Operators whose scale
/// falls to tol or below are omitted. Throws NotCompletelyPositiveError if the
/// map is not CP or B falls outside the Kraus ball.
std::vector<BlockOperator> explicit_kraus_ed(const EDMap& map, double tol);

/// Full-space Kraus set of the block operators.
KrausSet to_kraus_set(const std::vector<BlockOperator>& ops);

/// PSD test of the d_e x d_e matrix delta_jl - tr phi(|e_j><e_l|).
bool is_trace_nonincreasing(const LinearMap& phi, double tol);

/// One-sided positivity verdict. Only not_positive is a certificate.
struct PositivityVerdict {
  enum class Status { not_positive, no_witness_found };
  Status status = Status::no_witness_found;
  /// Input vector |xi> whose projector is mapped out of the PSD cone.
  std::vector<Complex> witness;
  double witness_min_eigenvalue = 0.0;
  std::size_t samples_drawn = 0;
  /// Which condition produced the witness: "sampled", "omega", "b_nonzero", "damped_phi".
  std::string source;

  bool not_positive() const noexcept { return status == Status::not_positive; }
};

std::string to_string(PositivityVerdict::Status status);

/// Draws Haar-random pure states |xi> and tests map(|xi><xi|) >= -tol.
PositivityVerdict is_positive_sampled(const LinearMap& map, std::size_t samples, double tol,
                                      std::uint64_t seed);

/// Positivity of Phi when d_g = 1. The omega condition is decided exactly via
/// its density W; the condition on phi - gamma^-1 B(.)B^dagger is sampled.
/// Throws std::invalid_argument unless d_g == 1.
PositivityVerdict is_positive_ed_dg1(const EDMap& map, std::size_t samples, double tol,
                                     std::uint64_t seed);

}  // namespace edchan
