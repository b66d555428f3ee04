#include "edchan/matcore.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "edchan/kernels.hpp"

namespace edchan {

namespace {

using EMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EMat> view(const CMatrix& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()),
          static_cast<Eigen::Index>(m.cols())};
}

CMatrix from_eigen(const EMat& e) {
  CMatrix out(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  std::copy(e.data(), e.data() + e.size(), out.data().begin());
  return out;
}

void require_square(const CMatrix& m, const char* what) {
  if (!m.is_square()) {
    throw ShapeError(std::string(what) + ": matrix must be square, got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

std::string shape(const CMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, Complex{}) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw ShapeError("CMatrix: " + std::to_string(entries_.size()) + " entries for shape " +
                     std::to_string(rows_) + "x" + std::to_string(cols_));
  }
  for (const auto& z : entries_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw std::invalid_argument("CMatrix: non-finite entry");
    }
  }
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  entries_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw ShapeError("CMatrix: ragged initializer");
    entries_.insert(entries_.end(), row.begin(), row.end());
  }
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const Complex> diag) {
  CMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

CMatrix CMatrix::unit(std::size_t rows, std::size_t cols, std::size_t row, std::size_t col) {
  CMatrix m(rows, cols);
  m(row, col) = 1.0;
  return m;
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

CMatrix CMatrix::transpose() const {
  CMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

CMatrix CMatrix::conj() const {
  CMatrix out = *this;
  for (auto& z : out.entries_) z = std::conj(z);
  return out;
}

Complex CMatrix::trace() const {
  require_square(*this, "trace");
  Complex t{};
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double CMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& z : entries_) m = std::max(m, std::abs(z));
  return m;
}

double CMatrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (const auto& z : entries_) s += std::norm(z);
  return std::sqrt(s);
}

double CMatrix::norm1() const noexcept {
  double best = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) col += std::abs((*this)(i, j));
    best = std::max(best, col);
  }
  return best;
}

CMatrix CMatrix::block(std::size_t row, std::size_t col, std::size_t rows,
                       std::size_t cols) const {
  if (row + rows > rows_ || col + cols > cols_) throw ShapeError("block: out of range");
  CMatrix out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out(i, j) = (*this)(row + i, col + j);
  return out;
}

void CMatrix::set_block(std::size_t row, std::size_t col, const CMatrix& src) {
  if (row + src.rows_ > rows_ || col + src.cols_ > cols_) {
    throw ShapeError("set_block: out of range");
  }
  for (std::size_t i = 0; i < src.rows_; ++i)
    for (std::size_t j = 0; j < src.cols_; ++j) (*this)(row + i, col + j) = src(i, j);
}

CMatrix& CMatrix::operator+=(const CMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) {
    throw ShapeError("add: " + shape(*this) + " vs " + shape(rhs));
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += rhs.entries_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) {
    throw ShapeError("subtract: " + shape(*this) + " vs " + shape(rhs));
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= rhs.entries_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(Complex s) noexcept {
  for (auto& z : entries_) z *= s;
  return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("multiply: " + shape(a) + " * " + shape(b));
  CMatrix c(a.rows(), b.cols());
  if (c.empty() || a.cols() == 0) return c;
  kernels::gemm(a.rows(), b.cols(), a.cols(), a.data().data(), b.data().data(),
                c.data().data());
  return c;
}

std::vector<Complex> apply(const CMatrix& m, std::span<const Complex> v) {
  if (m.cols() != v.size()) throw ShapeError("apply: vector length mismatch");
  std::vector<Complex> y(m.rows());
  if (m.rows() == 0) return y;
  kernels::gemv(m.rows(), m.cols(), m.data().data(), v.data(), y.data());
  return y;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("max_abs_diff: " + shape(a) + " vs " + shape(b));
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

CMatrix add_identity(CMatrix a, Complex s) {
  require_square(a, "add_identity");
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += s;
  return a;
}

bool is_hermitian(const CMatrix& m, double tol) {
  require_square(m, "is_hermitian");
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j)
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
  return true;
}

CMatrix hermitian_part(const CMatrix& m) {
  require_square(m, "hermitian_part");
  CMatrix h(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) h(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  return h;
}

double default_psd_tol(const CMatrix& m) {
  return 1e-9 * std::max(1.0, std::abs(m.trace()));
}

HermitianEigen eigh(const CMatrix& m) {
  require_square(m, "eigh");
  HermitianEigen out;
  if (m.rows() == 0) return out;
  const CMatrix h = hermitian_part(m);
  Eigen::SelfAdjointEigenSolver<EMat> solver(view(h));
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigh: eigensolver failed");
  out.values.assign(solver.eigenvalues().data(),
                    solver.eigenvalues().data() + solver.eigenvalues().size());
  out.vectors = from_eigen(solver.eigenvectors());
  return out;
}

double min_eigenvalue_hermitian(const CMatrix& m) {
  require_square(m, "min_eigenvalue_hermitian");
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<EMat> solver(view(hermitian_part(m)), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double max_eigenvalue_hermitian(const CMatrix& m) {
  require_square(m, "max_eigenvalue_hermitian");
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<EMat> solver(view(hermitian_part(m)), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(solver.eigenvalues().size() - 1);
}

bool psd_by_cholesky(const CMatrix& m, double tol) {
  require_square(m, "psd_by_cholesky");
  const std::size_t n = m.rows();
  if (n == 1) return m(0, 0).real() >= -tol;
  EMat shifted = 0.5 * (view(m) + view(m).adjoint());
  shifted.diagonal().array() += tol;
  Eigen::LLT<EMat> llt(shifted);
  return llt.info() == Eigen::Success;
}

PsdVerdict is_psd(const CMatrix& m, double tol) {
  require_square(m, "is_psd");
  if (!is_hermitian(m, tol)) throw std::domain_error("is_psd: matrix is not hermitian within tol");
  const double lo = min_eigenvalue_hermitian(m);
  return {lo >= -tol, lo};
}

namespace {

// Pade coefficients b_0..b_m for exp; Higham (2005) degree choices.
constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                           302702400.0,   30270240.0,   2162160.0,
                                           110880.0,      3960.0,       90.0,
                                           1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

// 1-norm bounds below which degree m meets unit roundoff (double).
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

CMatrix solve_pade(const CMatrix& u, const CMatrix& v) {
  const EMat p = view(v) + view(u);
  const EMat q = view(v) - view(u);
  return from_eigen(q.partialPivLu().solve(p));
}

template <std::size_t N>
CMatrix pade_low(const CMatrix& a, const std::array<double, N>& b) {
  const std::size_t n = a.rows();
  const CMatrix eye = CMatrix::identity(n);
  const CMatrix a2 = a * a;
  CMatrix power = eye;
  CMatrix u_inner(n, n);
  CMatrix v(n, n);
  for (std::size_t j = 0; j + 1 < N; j += 2) {
    v += b[j] * power;
    u_inner += b[j + 1] * power;
    power = power * a2;
  }
  return solve_pade(a * u_inner, v);
}

CMatrix pade13(const CMatrix& a) {
  const auto& b = kPade13;
  const CMatrix eye = CMatrix::identity(a.rows());
  const CMatrix a2 = a * a;
  const CMatrix a4 = a2 * a2;
  const CMatrix a6 = a4 * a2;
  const CMatrix u_hi = b[13] * a6 + b[11] * a4 + b[9] * a2;
  const CMatrix u =
      a * (a6 * u_hi + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * eye);
  const CMatrix v_hi = b[12] * a6 + b[10] * a4 + b[8] * a2;
  const CMatrix v = a6 * v_hi + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * eye;
  return solve_pade(u, v);
}

}  // namespace

CMatrix matexp(const CMatrix& m) {
  require_square(m, "matexp");
  if (m.rows() == 0) return m;
  const double norm = m.norm1();
  if (norm <= kTheta3) return pade_low(m, kPade3);
  if (norm <= kTheta5) return pade_low(m, kPade5);
  if (norm <= kTheta7) return pade_low(m, kPade7);
  if (norm <= kTheta9) return pade_low(m, kPade9);
  const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
  CMatrix r = pade13(m * Complex(std::ldexp(1.0, -squarings)));
  for (int s = 0; s < squarings; ++s) r = r * r;
  return r;
}

CMatrix integral_of_exp(const CMatrix& l, double t) {
  require_square(l, "integral_of_exp");
  if (!(t >= 0.0)) throw std::invalid_argument("integral_of_exp: t must be >= 0");
  const std::size_t n = l.rows();
  CMatrix aug(2 * n, 2 * n);
  aug.set_block(0, 0, l * Complex(t));
  for (std::size_t i = 0; i < n; ++i) aug(i, n + i) = t;
  return matexp(aug).block(0, n, n, n);
}

CMatrix pinv(const CMatrix& m, double tol) {
  if (m.empty()) return CMatrix(m.cols(), m.rows());
  Eigen::JacobiSVD<EMat> svd(view(m), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cutoff = tol * (s.size() ? s(0) : 0.0);
  Eigen::VectorXd inv_s(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) inv_s(i) = (s(i) > cutoff && s(i) > 0) ? 1.0 / s(i) : 0.0;
  const EMat p = svd.matrixV() * inv_s.asDiagonal() * svd.matrixU().adjoint();
  return from_eigen(p);
}

CMatrix inverse(const CMatrix& m) {
  require_square(m, "inverse");
  if (m.rows() == 0) return m;
  Eigen::FullPivLU<EMat> lu(view(m));
  if (!lu.isInvertible()) throw std::domain_error("inverse: matrix is singular");
  return from_eigen(lu.inverse());
}

std::vector<double> singular_values(const CMatrix& m) {
  if (m.empty()) return {};
  Eigen::JacobiSVD<EMat> svd(view(m));
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

double condition_number(const CMatrix& m) {
  const auto s = singular_values(m);
  if (s.empty()) return 1.0;
  if (s.back() <= 0.0) return std::numeric_limits<double>::infinity();
  return s.front() / s.back();
}

std::vector<Complex> vectorize(const CMatrix& m) {
  std::vector<Complex> v(m.size());
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) v[i + j * m.rows()] = m(i, j);
  return v;
}

CMatrix devectorize(std::span<const Complex> v, std::size_t rows, std::size_t cols) {
  if (v.size() != rows * cols) {
    throw ShapeError("devectorize: length " + std::to_string(v.size()) + " for shape " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
  CMatrix m(rows, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = v[i + j * rows];
  return m;
}

}  // namespace edchan
