#pragma once

// Dense complex matrices and the numerical primitives the channel code is
// built from: hermiticity/PSD tests, eigendecomposition, matrix exponential,
// pseudo-inverse and column-stacking vectorization.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace edchan {

using Complex = std::complex<double>;

/// Thrown when operand shapes do not fit the operation.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Row-major dense complex matrix with value semantics.
class CMatrix {
 public:
  CMatrix() = default;
  /// Zero matrix of the given shape.
  CMatrix(std::size_t rows, std::size_t cols);
  /// Takes ownership of row-major entries; rejects size mismatch and non-finite values.
  CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static CMatrix identity(std::size_t n);
  static CMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  static CMatrix diagonal(std::span<const Complex> diag);
  /// Matrix unit |row><col| of the given shape.
  static CMatrix unit(std::size_t rows, std::size_t cols, std::size_t row, std::size_t col);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return entries_.empty(); }

  Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  std::span<Complex> data() noexcept { return entries_; }
  std::span<const Complex> data() const noexcept { return entries_; }

  CMatrix adjoint() const;
  CMatrix transpose() const;
  CMatrix conj() const;
  Complex trace() const;

  /// Largest entry modulus (max-entry norm).
  double max_abs() const noexcept;
  double frobenius_norm() const noexcept;
  /// Maximum absolute column sum.
  double norm1() const noexcept;

  /// Copy of the block starting at (row, col).
  CMatrix block(std::size_t row, std::size_t col, std::size_t rows, std::size_t cols) const;
  void set_block(std::size_t row, std::size_t col, const CMatrix& src);

  CMatrix& operator+=(const CMatrix& rhs);
  CMatrix& operator-=(const CMatrix& rhs);
  CMatrix& operator*=(Complex s) noexcept;

  friend CMatrix operator+(CMatrix lhs, const CMatrix& rhs) { return lhs += rhs; }
  friend CMatrix operator-(CMatrix lhs, const CMatrix& rhs) { return lhs -= rhs; }
  friend CMatrix operator-(CMatrix m) { return m *= -1.0; }
  friend CMatrix operator*(CMatrix m, Complex s) { return m *= s; }
  friend CMatrix operator*(Complex s, CMatrix m) { return m *= s; }
  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);

  bool operator==(const CMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

CMatrix kron(const CMatrix& a, const CMatrix& b);
double max_abs_diff(const CMatrix& a, const CMatrix& b);
/// a + s*I for square a.
CMatrix add_identity(CMatrix a, Complex s);

bool is_hermitian(const CMatrix& m, double tol);
/// (M + M^dagger) / 2.
CMatrix hermitian_part(const CMatrix& m);

struct PsdVerdict {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

/// Default PSD tolerance: 1e-9 scaled by max(1, |tr M|).
double default_psd_tol(const CMatrix& m);

/// Eigenvalue test on the hermitian part of M. Throws std::domain_error when M
/// is further than tol from hermitian.
PsdVerdict is_psd(const CMatrix& m, double tol);

/// Eigenpairs of a hermitian matrix; values ascending, vectors as columns.
struct HermitianEigen {
  std::vector<double> values;
  CMatrix vectors;
};
HermitianEigen eigh(const CMatrix& m);
double min_eigenvalue_hermitian(const CMatrix& m);
/// Cholesky test of hermitian_part(M) + tol*I; true means every eigenvalue is
/// above -tol. Cheaper than an eigensolve for hot sampling loops.
bool psd_by_cholesky(const CMatrix& m, double tol);
double max_eigenvalue_hermitian(const CMatrix& m);

/// e^M by scaling and squaring with degree 3..13 Pade approximants.
CMatrix matexp(const CMatrix& m);

/// Integral of e^{tau L} over [0, t], read off the upper-right block of
/// exp(t [[L, I], [0, 0]]). Exact for singular L.
CMatrix integral_of_exp(const CMatrix& l, double t);

/// Moore-Penrose pseudo-inverse; singular values below tol * sigma_max are dropped.
CMatrix pinv(const CMatrix& m, double tol = 1e-12);
/// Inverse of a square matrix via partial-pivot LU. Throws std::domain_error if singular.
CMatrix inverse(const CMatrix& m);
std::vector<double> singular_values(const CMatrix& m);
/// sigma_max / sigma_min; +inf for singular input.
double condition_number(const CMatrix& m);

/// Column-stacking: v[i + j * rows] = M(i, j).
std::vector<Complex> vectorize(const CMatrix& m);
CMatrix devectorize(std::span<const Complex> v, std::size_t rows, std::size_t cols);

/// M v for a column vector v.
std::vector<Complex> apply(const CMatrix& m, std::span<const Complex> v);

}  // namespace edchan
