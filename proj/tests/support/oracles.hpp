#pragma once

// Reference computations that share no code path with the library routines
// they check.

#include "edchan/channel.hpp"
#include "edchan/matcore.hpp"

namespace edchan::testing {

/// Superoperator of Phi on H_e (+) H_g written entry by entry from the block formula.
CMatrix full_superop_oracle(const EDMap& map);

/// sum_jk map(E_jk) (x) E_jk, each column of S devectorized by hand.
CMatrix choi_oracle(const CMatrix& s, std::size_t d_in, std::size_t d_out);

/// Minimum eigenvalue of the hermitian part through Eigen's complex Schur route.
double min_eigenvalue_oracle(const CMatrix& m);

/// V diag(exp(lambda)) V^-1 from a general complex eigendecomposition.
CMatrix expm_eigen_oracle(const CMatrix& m);

/// Taylor series of exp(m) summed to convergence after scaling by 2^-s, then squared.
CMatrix expm_taylor_oracle(const CMatrix& m);

/// V diag((exp(lambda t) - 1) / lambda) V^-1, with t where lambda vanishes.
CMatrix integral_of_exp_oracle(const CMatrix& l, double t);

/// Matrix product by triple loop.
CMatrix naive_product(const CMatrix& a, const CMatrix& b);

}  // namespace edchan::testing
