/*
    Copyright 2026 The exactcond Authors

    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#ifndef EXACTCOND_LINALG_HPP_
#define EXACTCOND_LINALG_HPP_

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace exactcond {

/// Raised when a caller violates a documented precondition (dimension
/// mismatch, bad index block, non-PSD covariance, ...).
class ContractError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Raised when an iterative kernel fails to converge.
class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace linalg {

using Indices = std::vector<std::size_t>;

/// Indices [begin, end).
Indices range(std::size_t begin, std::size_t end);

/// Complement of `block` inside [0, n), in increasing order.
Indices complement(const Indices& block, std::size_t n);

// Relative factor in the numerical-rank rule: sigma_i is zero iff
// sigma_i <= max(rows, cols) * sigma_max * kRankEpsilon.
inline constexpr double kRankEpsilon = 1e-12;

// Default relative tolerance for affine-subspace membership.
inline constexpr double kDefaultSupportTolerance = 1e-8;

// Negative eigenvalues down to -kPsdSlack (scaled by 1 + max|entry|) are
// clamped to zero when repairing a covariance.
inline constexpr double kPsdSlack = 1e-10;

// Eigenvalues of a difference of covariances below kCancellationEpsilon * n *
// scale are rounding residue and are set to zero (see clean_psd).
inline constexpr double kCancellationEpsilon = 1e-12;

/// Process-wide support tolerance. Thread-safe; the CLI sets it from GAUSS_TOL.
double support_tolerance();
void set_support_tolerance(double tol);

class Vector {
  public:
    Vector() = default;
    explicit Vector(std::size_t n, double fill = 0.0) : data_(n, fill) {}
    Vector(std::initializer_list<double> values) : data_(values) {}
    explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

    static Vector zeros(std::size_t n) { return Vector(n); }

    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }
    const std::vector<double>& raw() const { return data_; }

    auto begin() { return data_.begin(); }
    auto end() { return data_.end(); }
    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

    friend bool operator==(const Vector&, const Vector&) = default;

  private:
    std::vector<double> data_;
};

/// Dense row-major matrix.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
    static Matrix identity(std::size_t n);
    static Matrix diagonal(const Vector& d);
    static Matrix column(const Vector& v);
    static Matrix row(const Vector& v);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    Vector row_vector(std::size_t i) const;
    Vector col_vector(std::size_t j) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

std::ostream& operator<<(std::ostream& os, const Vector& v);
std::ostream& operator<<(std::ostream& os, const Matrix& m);

// Vector arithmetic.
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator-(const Vector& a);
Vector operator*(double s, const Vector& v);
double dot(const Vector& a, const Vector& b);
double norm(const Vector& v);
double max_abs(const Vector& v);
Vector concat(const Vector& a, const Vector& b);
Vector select(const Vector& v, const Indices& idx);

// Matrix arithmetic. Products dispatch to the OpenMP kernels.
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& m);
Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, const Vector& x);
Matrix transpose(const Matrix& m);

/// a * a^T
Matrix gram(const Matrix& a);
/// a * s * a^T
Matrix sandwich(const Matrix& a, const Matrix& s);

Matrix hstack(const Matrix& a, const Matrix& b);
Matrix vstack(const Matrix& a, const Matrix& b);
Matrix block_diag(const Matrix& a, const Matrix& b);
Matrix select_rows(const Matrix& m, const Indices& rows);
Matrix select_cols(const Matrix& m, const Indices& cols);
Matrix select(const Matrix& m, const Indices& rows, const Indices& cols);
Matrix symmetrize(const Matrix& m);

double frobenius_norm(const Matrix& m);
double max_abs(const Matrix& m);
bool all_finite(const Matrix& m);
bool all_finite(const Vector& v);

/// max |a - b| <= tol * (1 + max(|a|, |b|)); false on shape mismatch.
bool approx_equal(const Matrix& a, const Matrix& b, double tol);
bool approx_equal(const Vector& a, const Vector& b, double tol);

// Reference kernels. Single-threaded; the parallel ones must agree with these.
namespace serial {
Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& x);
Matrix gram(const Matrix& a);
}  // namespace serial

// OpenMP kernels.
namespace parallel {
Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& x);
Matrix gram(const Matrix& a);
}  // namespace parallel

/// Full SVD: m = u * diag(s) * v^T with u (rows x rows), v (cols x cols)
/// orthogonal and s (min(rows, cols)) nonincreasing.
struct Svd {
    Matrix u;
    Vector s;
    Matrix v;
};

/// One-sided Jacobi SVD. Throws NumericalError if the sweeps do not converge.
Svd svd(const Matrix& m);

/// max(rows, cols) * sigma_max * kRankEpsilon.
double rank_threshold(std::size_t rows, std::size_t cols, double sigma_max);
std::size_t numerical_rank(const Svd& d, std::size_t rows, std::size_t cols);
std::size_t rank(const Matrix& m);

/// Moore-Penrose pseudoinverse.
Matrix pinv(const Matrix& m);

struct Rref {
    Matrix r;
    Indices pivots;
    std::size_t rank = 0;
};

/// Reduced row echelon form by Gauss-Jordan elimination with partial pivoting.
/// Entries at or below the rank threshold are treated as zero.
Rref rref(const Matrix& m);

/// As rref, also returning the invertible `transform` with transform * m == r.
struct RrefWithTransform {
    Rref rref;
    Matrix transform;
};
RrefWithTransform rref_with_transform(const Matrix& m);

/// Orthonormal bases computed from the SVD at the rank threshold.
Matrix column_basis(const Matrix& m);
Matrix null_space(const Matrix& m);
Matrix left_null_space(const Matrix& m);

struct SymEigen {
    Vector values;  // ascending
    Matrix vectors; // columns
};
/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
SymEigen sym_eigen(const Matrix& m);

/// Symmetrize, clamp eigenvalues in [-kPsdSlack, 0) to zero. A larger negative
/// eigenvalue throws ContractError.
Matrix repair_psd(const Matrix& m);

/// For a covariance computed as a difference of terms of magnitude `scale`
/// (a Schur complement): symmetrize and zero every eigenvalue at or below
/// kCancellationEpsilon * n * scale. Returns the input unchanged (up to
/// symmetrization) when nothing is cut, and exact zeros when everything is.
Matrix clean_psd(const Matrix& m, double scale);

/// Some `a` with a * a^T == sigma, from the eigendecomposition.
Matrix psd_root(const Matrix& sigma);

/// point + span(basis), basis columns orthonormal.
class AffineSubspace {
  public:
    AffineSubspace(Vector point, Matrix basis);

    /// point + col(directions); directions need not be orthonormal.
    static AffineSubspace spanned(Vector point, const Matrix& directions);
    static AffineSubspace whole(std::size_t n);
    static AffineSubspace single(Vector point);

    const Vector& point() const { return point_; }
    const Matrix& basis() const { return basis_; }
    std::size_t ambient_dim() const { return point_.size(); }
    std::size_t dim() const { return basis_.cols(); }

    /// Component of (v - point) orthogonal to the direction space.
    Vector residual(const Vector& v) const;

  private:
    Vector point_;
    Matrix basis_;
};

bool subspace_contains(const AffineSubspace& s, const Vector& v);
bool subspace_contains(const AffineSubspace& s, const Vector& v, double tol);

/// inner is a subset of outer.
bool subspace_includes(const AffineSubspace& outer, const AffineSubspace& inner);

/// a * a^T == b * b^T (Frobenius, relative 1e-8), i.e. a = b * u for an orthogonal u.
bool orthogonal_equivalent(const Matrix& a, const Matrix& b);

}  // namespace linalg
}  // namespace exactcond

#endif  // EXACTCOND_LINALG_HPP_
