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

#include "exactcond/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <ostream>

namespace exactcond::linalg {

namespace {

std::atomic<double> g_support_tolerance{kDefaultSupportTolerance};

std::string shape(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ContractError(std::string(what) + ": shape mismatch " + shape(a) + " vs " + shape(b));
    }
}

void require_same_size(const Vector& a, const Vector& b, const char* what) {
    if (a.size() != b.size()) {
        throw ContractError(std::string(what) + ": dimension mismatch " + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()));
    }
}

}  // namespace

Indices range(std::size_t begin, std::size_t end) {
    Indices out;
    for (std::size_t i = begin; i < end; i++) {
        out.push_back(i);
    }
    return out;
}

Indices complement(const Indices& block, std::size_t n) {
    std::vector<bool> taken(n, false);
    for (std::size_t i : block) {
        if (i >= n) {
            throw ContractError("index " + std::to_string(i) + " out of range " + std::to_string(n));
        }
        taken[i] = true;
    }
    Indices out;
    for (std::size_t i = 0; i < n; i++) {
        if (!taken[i]) {
            out.push_back(i);
        }
    }
    return out;
}

double support_tolerance() { return g_support_tolerance.load(std::memory_order_relaxed); }

void set_support_tolerance(double tol) {
    if (!(tol > 0.0) || !std::isfinite(tol)) {
        throw ContractError("support tolerance must be positive and finite");
    }
    g_support_tolerance.store(tol, std::memory_order_relaxed);
}

// ---------------------------------------------------------------------------
// Construction and element access

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw ContractError("ragged matrix literal");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; i++) {
        m(i, i) = 1.0;
    }
    return m;
}

Matrix Matrix::diagonal(const Vector& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); i++) {
        m(i, i) = d[i];
    }
    return m;
}

Matrix Matrix::column(const Vector& v) {
    Matrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); i++) {
        m(i, 0) = v[i];
    }
    return m;
}

Matrix Matrix::row(const Vector& v) {
    Matrix m(1, v.size());
    for (std::size_t i = 0; i < v.size(); i++) {
        m(0, i) = v[i];
    }
    return m;
}

Vector Matrix::row_vector(std::size_t i) const {
    Vector v(cols_);
    for (std::size_t j = 0; j < cols_; j++) {
        v[j] = (*this)(i, j);
    }
    return v;
}

Vector Matrix::col_vector(std::size_t j) const {
    Vector v(rows_);
    for (std::size_t i = 0; i < rows_; i++) {
        v[i] = (*this)(i, j);
    }
    return v;
}

std::ostream& operator<<(std::ostream& os, const Vector& v) {
    os << "[";
    for (std::size_t i = 0; i < v.size(); i++) {
        os << (i ? ", " : "") << v[i];
    }
    return os << "]";
}

std::ostream& operator<<(std::ostream& os, const Matrix& m) {
    os << "[";
    for (std::size_t i = 0; i < m.rows(); i++) {
        os << (i ? ", " : "") << m.row_vector(i);
    }
    return os << "]";
}

// ---------------------------------------------------------------------------
// Arithmetic

Vector operator+(const Vector& a, const Vector& b) {
    require_same_size(a, b, "vector +");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); i++) {
        out[i] = a[i] + b[i];
    }
    return out;
}

Vector operator-(const Vector& a, const Vector& b) {
    require_same_size(a, b, "vector -");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); i++) {
        out[i] = a[i] - b[i];
    }
    return out;
}

Vector operator-(const Vector& a) { return -1.0 * a; }

Vector operator*(double s, const Vector& v) {
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); i++) {
        out[i] = s * v[i];
    }
    return out;
}

double dot(const Vector& a, const Vector& b) {
    require_same_size(a, b, "dot");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); i++) {
        acc += a[i] * b[i];
    }
    return acc;
}

double norm(const Vector& v) { return std::sqrt(dot(v, v)); }

double max_abs(const Vector& v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

Vector concat(const Vector& a, const Vector& b) {
    std::vector<double> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return Vector(std::move(out));
}

Vector select(const Vector& v, const Indices& idx) {
    Vector out(idx.size());
    for (std::size_t i = 0; i < idx.size(); i++) {
        if (idx[i] >= v.size()) {
            throw ContractError("select: index out of range");
        }
        out[i] = v[idx[i]];
    }
    return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "matrix +");
    Matrix out(a.rows(), a.cols());
    auto o = out.values();
    auto x = a.values();
    auto y = b.values();
    for (std::size_t i = 0; i < o.size(); i++) {
        o[i] = x[i] + y[i];
    }
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "matrix -");
    Matrix out(a.rows(), a.cols());
    auto o = out.values();
    auto x = a.values();
    auto y = b.values();
    for (std::size_t i = 0; i < o.size(); i++) {
        o[i] = x[i] - y[i];
    }
    return out;
}

Matrix operator*(double s, const Matrix& m) {
    Matrix out = m;
    for (double& x : out.values()) {
        x *= s;
    }
    return out;
}

Matrix operator*(const Matrix& a, const Matrix& b) { return parallel::matmul(a, b); }

Vector operator*(const Matrix& a, const Vector& x) { return parallel::matvec(a, x); }

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); i++) {
        for (std::size_t j = 0; j < m.cols(); j++) {
            t(j, i) = m(i, j);
        }
    }
    return t;
}

Matrix gram(const Matrix& a) { return parallel::gram(a); }

Matrix sandwich(const Matrix& a, const Matrix& s) {
    if (s.rows() != s.cols() || a.cols() != s.rows()) {
        throw ContractError("sandwich: shape mismatch " + shape(a) + " and " + shape(s));
    }
    return symmetrize(a * s * transpose(a));
}

Matrix hstack(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw ContractError("hstack: row counts differ " + shape(a) + " vs " + shape(b));
    }
    Matrix out(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); i++) {
        for (std::size_t j = 0; j < a.cols(); j++) {
            out(i, j) = a(i, j);
        }
        for (std::size_t j = 0; j < b.cols(); j++) {
            out(i, a.cols() + j) = b(i, j);
        }
    }
    return out;
}

Matrix vstack(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw ContractError("vstack: column counts differ " + shape(a) + " vs " + shape(b));
    }
    Matrix out(a.rows() + b.rows(), a.cols());
    std::copy(a.values().begin(), a.values().end(), out.values().begin());
    std::copy(b.values().begin(), b.values().end(), out.values().begin() + a.values().size());
    return out;
}

Matrix block_diag(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() + b.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); i++) {
        for (std::size_t j = 0; j < a.cols(); j++) {
            out(i, j) = a(i, j);
        }
    }
    for (std::size_t i = 0; i < b.rows(); i++) {
        for (std::size_t j = 0; j < b.cols(); j++) {
            out(a.rows() + i, a.cols() + j) = b(i, j);
        }
    }
    return out;
}

Matrix select(const Matrix& m, const Indices& rows, const Indices& cols) {
    Matrix out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); i++) {
        if (rows[i] >= m.rows()) {
            throw ContractError("select: row index out of range");
        }
        for (std::size_t j = 0; j < cols.size(); j++) {
            if (cols[j] >= m.cols()) {
                throw ContractError("select: column index out of range");
            }
            out(i, j) = m(rows[i], cols[j]);
        }
    }
    return out;
}

Matrix select_rows(const Matrix& m, const Indices& rows) { return select(m, rows, range(0, m.cols())); }

Matrix select_cols(const Matrix& m, const Indices& cols) { return select(m, range(0, m.rows()), cols); }

Matrix symmetrize(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw ContractError("symmetrize: matrix is not square");
    }
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); i++) {
        for (std::size_t j = 0; j < m.cols(); j++) {
            out(i, j) = 0.5 * (m(i, j) + m(j, i));
        }
    }
    return out;
}

double frobenius_norm(const Matrix& m) {
    double acc = 0.0;
    for (double x : m.values()) {
        acc += x * x;
    }
    return std::sqrt(acc);
}

double max_abs(const Matrix& m) {
    double out = 0.0;
    for (double x : m.values()) {
        out = std::max(out, std::abs(x));
    }
    return out;
}

bool all_finite(const Matrix& m) {
    return std::all_of(m.values().begin(), m.values().end(), [](double x) { return std::isfinite(x); });
}

bool all_finite(const Vector& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

bool approx_equal(const Matrix& a, const Matrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        return false;
    }
    const double scale = 1.0 + std::max(max_abs(a), max_abs(b));
    auto x = a.values();
    auto y = b.values();
    for (std::size_t i = 0; i < x.size(); i++) {
        if (!(std::abs(x[i] - y[i]) <= tol * scale)) {
            return false;
        }
    }
    return true;
}

bool approx_equal(const Vector& a, const Vector& b, double tol) {
    if (a.size() != b.size()) {
        return false;
    }
    const double scale = 1.0 + std::max(max_abs(a), max_abs(b));
    for (std::size_t i = 0; i < a.size(); i++) {
        if (!(std::abs(a[i] - b[i]) <= tol * scale)) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// SVD

namespace {

constexpr int kMaxSweeps = 100;

// Extend the orthonormal columns of q (n x k) to an orthonormal basis of R^n.
// Each step takes the standard basis vector with the largest component
// outside the current span, then re-orthogonalises it.
Matrix complete_basis(const Matrix& q, std::size_t n) {
    std::vector<Vector> cols;
    for (std::size_t j = 0; j < q.cols(); j++) {
        cols.push_back(q.col_vector(j));
    }
    std::vector<Vector> residuals(n, Vector(n));
    for (std::size_t e = 0; e < n; e++) {
        residuals[e][e] = 1.0;
    }
    auto project_out = [n](Vector& v, const Vector& c) {
        const double proj = dot(c, v);
        for (std::size_t i = 0; i < n; i++) {
            v[i] -= proj * c[i];
        }
    };
    for (const Vector& c : cols) {
        for (Vector& r : residuals) {
            project_out(r, c);
        }
    }
    while (cols.size() < n) {
        std::size_t best = 0;
        double best_len = -1.0;
        for (std::size_t e = 0; e < n; e++) {
            const double len = norm(residuals[e]);
            if (len > best_len) {
                best_len = len;
                best = e;
            }
        }
        Vector v(n);
        v[best] = 1.0;
        for (int pass = 0; pass < 2; pass++) {
            for (const Vector& c : cols) {
                project_out(v, c);
            }
        }
        v = (1.0 / norm(v)) * v;
        for (Vector& r : residuals) {
            project_out(r, v);
        }
        cols.push_back(std::move(v));
    }
    Matrix out(n, n);
    for (std::size_t j = 0; j < n; j++) {
        for (std::size_t i = 0; i < n; i++) {
            out(i, j) = cols[j][i];
        }
    }
    return out;
}

// One-sided Jacobi (Hestenes) for rows >= cols.
Svd svd_tall(const Matrix& m) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    // Work on columns stored contiguously.
    std::vector<Vector> w(cols, Vector(rows));
    for (std::size_t i = 0; i < rows; i++) {
        for (std::size_t j = 0; j < cols; j++) {
            w[j][i] = m(i, j);
        }
    }
    std::vector<Vector> v(cols, Vector(cols));
    for (std::size_t j = 0; j < cols; j++) {
        v[j][j] = 1.0;
    }

    constexpr double eps = 1e-15;
    // Columns at rounding level relative to the whole matrix carry no rank
    // information and can keep rotating forever against large ones.
    double fro2 = 0.0;
    for (const Vector& col : w) {
        fro2 += dot(col, col);
    }
    const double negligible = eps * eps * fro2;
    bool converged = cols < 2;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; sweep++) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < cols; p++) {
            for (std::size_t q = p + 1; q < cols; q++) {
                const double alpha = dot(w[p], w[p]);
                const double beta = dot(w[q], w[q]);
                const double gamma = dot(w[p], w[q]);
                if (alpha <= negligible || beta <= negligible || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) {
                    continue;
                }
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < rows; i++) {
                    const double wp = w[p][i];
                    const double wq = w[q][i];
                    w[p][i] = c * wp - s * wq;
                    w[q][i] = s * wp + c * wq;
                }
                for (std::size_t i = 0; i < cols; i++) {
                    const double vp = v[p][i];
                    const double vq = v[q][i];
                    v[p][i] = c * vp - s * vq;
                    v[q][i] = s * vp + c * vq;
                }
            }
        }
        converged = !rotated;
    }
    if (!converged) {
        throw NumericalError("svd: Jacobi sweeps did not converge for a " + shape(m) + " matrix");
    }

    std::vector<double> sv(cols);
    for (std::size_t j = 0; j < cols; j++) {
        sv[j] = norm(w[j]);
    }
    std::vector<std::size_t> order(cols);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sv[a] > sv[b]; });

    Svd out;
    out.s = Vector(cols);
    out.v = Matrix(cols, cols);
    const double smax = cols ? sv[order[0]] : 0.0;
    // Columns this small are dominated by rounding and would not be orthogonal
    // after normalisation; the completion step supplies them instead.
    const double tiny = smax * 1e-14 * static_cast<double>(std::max<std::size_t>(rows, 1));
    std::size_t kept = 0;
    for (std::size_t j = 0; j < cols; j++) {
        if (sv[order[j]] > tiny && sv[order[j]] > 0.0) {
            kept++;
        }
    }
    Matrix u_partial(rows, kept);
    for (std::size_t j = 0; j < cols; j++) {
        const std::size_t src = order[j];
        out.s[j] = sv[src];
        for (std::size_t i = 0; i < cols; i++) {
            out.v(i, j) = v[src][i];
        }
        if (j < kept) {
            for (std::size_t i = 0; i < rows; i++) {
                u_partial(i, j) = w[src][i] / sv[src];
            }
        }
    }
    out.u = complete_basis(u_partial, rows);
    return out;
}

}  // namespace

Svd svd(const Matrix& m) {
    if (!all_finite(m)) {
        throw ContractError("svd: matrix has non-finite entries");
    }
    if (m.rows() >= m.cols()) {
        return svd_tall(m);
    }
    Svd t = svd_tall(transpose(m));
    return Svd{std::move(t.v), std::move(t.s), std::move(t.u)};
}

double rank_threshold(std::size_t rows, std::size_t cols, double sigma_max) {
    return static_cast<double>(std::max(rows, cols)) * sigma_max * kRankEpsilon;
}

std::size_t numerical_rank(const Svd& d, std::size_t rows, std::size_t cols) {
    if (d.s.empty()) {
        return 0;
    }
    const double tol = rank_threshold(rows, cols, d.s[0]);
    std::size_t r = 0;
    for (double x : d.s) {
        if (x > tol) {
            r++;
        }
    }
    return r;
}

std::size_t rank(const Matrix& m) { return numerical_rank(svd(m), m.rows(), m.cols()); }

Matrix pinv(const Matrix& m) {
    const Svd d = svd(m);
    const std::size_t r = numerical_rank(d, m.rows(), m.cols());
    Matrix out(m.cols(), m.rows());
    for (std::size_t k = 0; k < r; k++) {
        const double inv = 1.0 / d.s[k];
        for (std::size_t i = 0; i < m.cols(); i++) {
            const double vik = d.v(i, k) * inv;
            if (vik == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < m.rows(); j++) {
                out(i, j) += vik * d.u(j, k);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Row reduction

RrefWithTransform rref_with_transform(const Matrix& m) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    Matrix r = m;
    Matrix t = Matrix::identity(rows);
    Indices pivots;
    if (rows == 0 || cols == 0) {
        return {Rref{r, pivots, 0}, t};
    }
    const Svd d = svd(m);
    const double tol = rank_threshold(rows, cols, d.s.empty() ? 0.0 : d.s[0]);

    auto swap_rows = [](Matrix& x, std::size_t a, std::size_t b) {
        for (std::size_t j = 0; j < x.cols(); j++) {
            std::swap(x(a, j), x(b, j));
        }
    };

    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; col++) {
        std::size_t best = row;
        for (std::size_t i = row + 1; i < rows; i++) {
            if (std::abs(r(i, col)) > std::abs(r(best, col))) {
                best = i;
            }
        }
        if (std::abs(r(best, col)) <= tol) {
            for (std::size_t i = row; i < rows; i++) {
                r(i, col) = 0.0;
            }
            continue;
        }
        swap_rows(r, row, best);
        swap_rows(t, row, best);
        const double inv = 1.0 / r(row, col);
        for (std::size_t j = 0; j < cols; j++) {
            r(row, j) *= inv;
        }
        for (std::size_t j = 0; j < rows; j++) {
            t(row, j) *= inv;
        }
        r(row, col) = 1.0;
        for (std::size_t i = 0; i < rows; i++) {
            if (i == row) {
                continue;
            }
            const double f = r(i, col);
            if (f == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < cols; j++) {
                r(i, j) -= f * r(row, j);
            }
            for (std::size_t j = 0; j < rows; j++) {
                t(i, j) -= f * t(row, j);
            }
            r(i, col) = 0.0;
        }
        pivots.push_back(col);
        row++;
    }
    for (std::size_t i = row; i < rows; i++) {
        for (std::size_t j = 0; j < cols; j++) {
            r(i, j) = 0.0;
        }
    }
    return {Rref{std::move(r), std::move(pivots), row}, std::move(t)};
}

Rref rref(const Matrix& m) { return rref_with_transform(m).rref; }

Matrix column_basis(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) {
        return Matrix(m.rows(), 0);
    }
    const Svd d = svd(m);
    const std::size_t r = numerical_rank(d, m.rows(), m.cols());
    return select_cols(d.u, range(0, r));
}

Matrix null_space(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) {
        return Matrix::identity(m.cols());
    }
    const Svd d = svd(m);
    const std::size_t r = numerical_rank(d, m.rows(), m.cols());
    return select_cols(d.v, range(r, m.cols()));
}

Matrix left_null_space(const Matrix& m) { return null_space(transpose(m)); }

// ---------------------------------------------------------------------------
// Symmetric eigenproblems

SymEigen sym_eigen(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw ContractError("sym_eigen: matrix is not square");
    }
    const std::size_t n = m.rows();
    Matrix a = symmetrize(m);
    Matrix v = Matrix::identity(n);

    auto off_diag = [&]() {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; i++) {
            for (std::size_t j = i + 1; j < n; j++) {
                acc += a(i, j) * a(i, j);
            }
        }
        return acc;
    };
    const double scale = frobenius_norm(a);
    bool converged = n < 2 || scale == 0.0;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; sweep++) {
        if (off_diag() <= 1e-30 * scale * scale) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; p++) {
            for (std::size_t q = p + 1; q < n; q++) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; k++) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; k++) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; k++) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (!converged && off_diag() > 1e-24 * scale * scale) {
        throw NumericalError("sym_eigen: Jacobi sweeps did not converge");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
    SymEigen out{Vector(n), Matrix(n, n)};
    for (std::size_t j = 0; j < n; j++) {
        out.values[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; i++) {
            out.vectors(i, j) = v(i, order[j]);
        }
    }
    return out;
}

Matrix repair_psd(const Matrix& m) {
    if (!all_finite(m)) {
        throw ContractError("covariance has non-finite entries");
    }
    Matrix sym = symmetrize(m);
    if (sym.rows() == 0) {
        return sym;
    }
    const SymEigen e = sym_eigen(sym);
    const double slack = kPsdSlack * (1.0 + max_abs(sym));
    if (e.values[0] >= 0.0) {
        return sym;
    }
    if (e.values[0] < -slack) {
        throw ContractError("covariance is not positive semidefinite (eigenvalue " +
                            std::to_string(e.values[0]) + ")");
    }
    Vector clamped = e.values;
    for (double& x : clamped) {
        x = std::max(x, 0.0);
    }
    return sandwich(e.vectors, Matrix::diagonal(clamped));
}

Matrix clean_psd(const Matrix& m, double scale) {
    Matrix sym = symmetrize(m);
    const std::size_t n = sym.rows();
    if (n == 0) {
        return sym;
    }
    const double cut = kCancellationEpsilon * static_cast<double>(n) * scale;
    const SymEigen e = sym_eigen(sym);
    if (e.values[n - 1] <= cut) {
        return Matrix(n, n);
    }
    if (e.values[0] > cut) {
        return sym;
    }
    Vector kept = e.values;
    for (double& x : kept) {
        if (x <= cut) {
            x = 0.0;
        }
    }
    return sandwich(e.vectors, Matrix::diagonal(kept));
}

Matrix psd_root(const Matrix& sigma) {
    const Matrix repaired = repair_psd(sigma);
    const std::size_t n = repaired.rows();
    const SymEigen e = sym_eigen(repaired);
    Matrix root(n, n);
    for (std::size_t j = 0; j < n; j++) {
        const double s = std::sqrt(std::max(e.values[j], 0.0));
        for (std::size_t i = 0; i < n; i++) {
            root(i, j) = e.vectors(i, j) * s;
        }
    }
    return root;
}

// ---------------------------------------------------------------------------
// Affine subspaces

AffineSubspace::AffineSubspace(Vector point, Matrix basis) : point_(std::move(point)), basis_(std::move(basis)) {
    if (basis_.rows() != point_.size()) {
        throw ContractError("affine subspace: basis has " + std::to_string(basis_.rows()) +
                            " rows, point has dimension " + std::to_string(point_.size()));
    }
    if (basis_.cols() > point_.size()) {
        throw ContractError("affine subspace: more basis vectors than ambient dimensions");
    }
    const Matrix g = transpose(basis_) * basis_;
    if (!approx_equal(g, Matrix::identity(basis_.cols()), 1e-10)) {
        throw ContractError("affine subspace: basis is not orthonormal");
    }
}

AffineSubspace AffineSubspace::spanned(Vector point, const Matrix& directions) {
    Matrix basis = column_basis(directions);
    if (directions.cols() == 0) {
        basis = Matrix(point.size(), 0);
    }
    return AffineSubspace(std::move(point), std::move(basis));
}

AffineSubspace AffineSubspace::whole(std::size_t n) { return AffineSubspace(Vector(n), Matrix::identity(n)); }

AffineSubspace AffineSubspace::single(Vector point) {
    const std::size_t n = point.size();
    return AffineSubspace(std::move(point), Matrix(n, 0));
}

Vector AffineSubspace::residual(const Vector& v) const {
    if (v.size() != ambient_dim()) {
        throw ContractError("subspace membership: vector has dimension " + std::to_string(v.size()) +
                            ", subspace lives in " + std::to_string(ambient_dim()));
    }
    const Vector d = v - point_;
    if (basis_.cols() == 0) {
        return d;
    }
    const Matrix bt = transpose(basis_);
    return d - basis_ * (bt * d);
}

bool subspace_contains(const AffineSubspace& s, const Vector& v, double tol) {
    return norm(s.residual(v)) <= tol * (1.0 + norm(v));
}

bool subspace_contains(const AffineSubspace& s, const Vector& v) {
    return subspace_contains(s, v, support_tolerance());
}

bool subspace_includes(const AffineSubspace& outer, const AffineSubspace& inner) {
    if (outer.ambient_dim() != inner.ambient_dim()) {
        throw ContractError("subspace inclusion: ambient dimensions differ");
    }
    if (!subspace_contains(outer, inner.point())) {
        return false;
    }
    const double tol = support_tolerance();
    const AffineSubspace through_origin(Vector(outer.ambient_dim()), outer.basis());
    for (std::size_t j = 0; j < inner.dim(); j++) {
        if (norm(through_origin.residual(inner.basis().col_vector(j))) > tol) {
            return false;
        }
    }
    return true;
}

bool orthogonal_equivalent(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw ContractError("orthogonal_equivalent: row counts differ");
    }
    const Matrix ga = gram(a);
    const Matrix gb = gram(b);
    return frobenius_norm(ga - gb) <= 1e-8 * (1.0 + frobenius_norm(ga));
}

}  // namespace exactcond::linalg
