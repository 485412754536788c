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

#include "exactcond/gauss.hpp"

#include <string>

namespace exactcond::gauss {

using linalg::transpose;

namespace {

void check_shapes(const Matrix& a, const Vector& b, const Matrix& sigma) {
    if (a.rows() != b.size()) {
        throw ContractError("gauss map: A has " + std::to_string(a.rows()) + " rows but b has dimension " +
                            std::to_string(b.size()));
    }
    if (sigma.rows() != b.size() || sigma.cols() != b.size()) {
        throw ContractError("gauss map: Sigma must be " + std::to_string(b.size()) + "x" +
                            std::to_string(b.size()));
    }
    if (!linalg::all_finite(a) || !linalg::all_finite(b)) {
        throw ContractError("gauss map: non-finite entries");
    }
}

void check_block(const Indices& block, std::size_t n) {
    std::vector<bool> seen(n, false);
    for (std::size_t i : block) {
        if (i >= n) {
            throw ContractError("index block: " + std::to_string(i) + " out of range for dimension " +
                                std::to_string(n));
        }
        if (seen[i]) {
            throw ContractError("index block: duplicate index " + std::to_string(i));
        }
        seen[i] = true;
    }
}

}  // namespace

GaussMap::GaussMap(Matrix a, Vector b, Matrix sigma) {
    check_shapes(a, b, sigma);
    a_ = std::move(a);
    b_ = std::move(b);
    sigma_ = linalg::repair_psd(sigma);
}

GaussMap::GaussMap(Unchecked, Matrix a, Vector b, Matrix sigma)
    : a_(std::move(a)), b_(std::move(b)), sigma_(std::move(sigma)) {}

GaussMap GaussMap::assume_psd(Matrix a, Vector b, Matrix sigma) {
    check_shapes(a, b, sigma);
    Matrix sym = linalg::symmetrize(sigma);
    return GaussMap(Unchecked{}, std::move(a), std::move(b), std::move(sym));
}

bool GaussMap::deterministic() const { return linalg::max_abs(sigma_) == 0.0; }

GaussState::GaussState(Vector mean, Matrix cov) {
    check_shapes(Matrix(mean.size(), 0), mean, cov);
    mean_ = std::move(mean);
    cov_ = linalg::repair_psd(cov);
}

GaussState::GaussState(Unchecked, Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {}

GaussState GaussState::assume_psd(Vector mean, Matrix cov) {
    check_shapes(Matrix(mean.size(), 0), mean, cov);
    Matrix sym = linalg::symmetrize(cov);
    return GaussState(Unchecked{}, std::move(mean), std::move(sym));
}

GaussState GaussState::point(Vector x) {
    const std::size_t n = x.size();
    return assume_psd(std::move(x), Matrix(n, n));
}

GaussState GaussState::standard(std::size_t n) { return assume_psd(Vector(n), Matrix::identity(n)); }

GaussMap GaussState::as_map() const { return GaussMap::assume_psd(Matrix(dim(), 0), mean_, cov_); }

GaussState GaussState::from_map(const GaussMap& f) {
    if (f.dom() != 0) {
        throw ContractError("state: map has domain " + std::to_string(f.dom()) + ", expected 0");
    }
    return assume_psd(f.b(), f.sigma());
}

GaussMap compose(const GaussMap& g, const GaussMap& f) {
    if (g.dom() != f.cod()) {
        throw ContractError("compose: domain " + std::to_string(g.dom()) + " does not match codomain " +
                            std::to_string(f.cod()));
    }
    Matrix a = g.a() * f.a();
    Vector b = g.b() + g.a() * f.b();
    Matrix sigma = linalg::sandwich(g.a(), f.sigma()) + g.sigma();
    return GaussMap::assume_psd(std::move(a), std::move(b), std::move(sigma));
}

GaussState push(const GaussMap& f, const GaussState& s) { return GaussState::from_map(compose(f, s.as_map())); }

GaussMap tensor(const GaussMap& f, const GaussMap& g) {
    return GaussMap::assume_psd(linalg::block_diag(f.a(), g.a()), linalg::concat(f.b(), g.b()),
                                linalg::block_diag(f.sigma(), g.sigma()));
}

GaussState tensor(const GaussState& a, const GaussState& b) {
    return GaussState::assume_psd(linalg::concat(a.mean(), b.mean()), linalg::block_diag(a.cov(), b.cov()));
}

GaussState apply(const GaussMap& f, const Vector& x) {
    if (x.size() != f.dom()) {
        throw ContractError("apply: input dimension mismatch");
    }
    return GaussState::assume_psd(f.a() * x + f.b(), f.sigma());
}

GaussMap identity(std::size_t n) { return GaussMap::assume_psd(Matrix::identity(n), Vector(n), Matrix(n, n)); }

GaussMap copy(std::size_t n) {
    const Matrix id = Matrix::identity(n);
    return GaussMap::assume_psd(linalg::vstack(id, id), Vector(2 * n), Matrix(2 * n, 2 * n));
}

GaussMap discard(std::size_t n) { return GaussMap::assume_psd(Matrix(0, n), Vector(), Matrix()); }

GaussMap swap(std::size_t m, std::size_t n) {
    Matrix a(m + n, m + n);
    for (std::size_t i = 0; i < n; i++) {
        a(i, m + i) = 1.0;
    }
    for (std::size_t i = 0; i < m; i++) {
        a(n + i, i) = 1.0;
    }
    return GaussMap::assume_psd(std::move(a), Vector(m + n), Matrix(m + n, m + n));
}

GaussMap affine(Matrix a, Vector b) {
    const std::size_t n = b.size();
    return GaussMap::assume_psd(std::move(a), std::move(b), Matrix(n, n));
}

GaussMap projection(std::size_t n, const Indices& idx) {
    Matrix a(idx.size(), n);
    for (std::size_t i = 0; i < idx.size(); i++) {
        if (idx[i] >= n) {
            throw ContractError("projection: index out of range");
        }
        a(i, idx[i]) = 1.0;
    }
    return affine(std::move(a), Vector(idx.size()));
}

GaussState marginal(const GaussState& psi, const Indices& block) {
    check_block(block, psi.dim());
    return GaussState::assume_psd(linalg::select(psi.mean(), block), linalg::select(psi.cov(), block, block));
}

AffineSubspace support(const GaussState& psi) { return AffineSubspace::spanned(psi.mean(), psi.cov()); }

bool abs_cont(const GaussState& mu, const GaussState& nu) {
    if (mu.dim() != nu.dim()) {
        throw ContractError("abs_cont: dimensions differ");
    }
    return linalg::subspace_includes(support(nu), support(mu));
}

std::optional<GaussState> condition_dist(const GaussState& psi, const Indices& obs_block, const Vector& a) {
    check_block(obs_block, psi.dim());
    if (a.size() != obs_block.size()) {
        throw ContractError("condition_dist: observation has dimension " + std::to_string(a.size()) +
                            ", block has " + std::to_string(obs_block.size()));
    }
    const Indices rest = linalg::complement(obs_block, psi.dim());
    const Vector mu2 = linalg::select(psi.mean(), obs_block);
    const Matrix s22 = linalg::clean_psd(linalg::select(psi.cov(), obs_block, obs_block), linalg::max_abs(psi.cov()));
    if (!linalg::subspace_contains(AffineSubspace::spanned(mu2, s22), a)) {
        return std::nullopt;
    }
    const Vector mu1 = linalg::select(psi.mean(), rest);
    const Matrix s11 = linalg::select(psi.cov(), rest, rest);
    const Matrix s12 = linalg::select(psi.cov(), rest, obs_block);
    const Matrix gain = s12 * linalg::pinv(s22);
    Vector mean = mu1 + gain * (a - mu2);
    Matrix cov = linalg::clean_psd(s11 - gain * transpose(s12), linalg::max_abs(psi.cov()));
    return GaussState::assume_psd(std::move(mean), std::move(cov));
}

GaussMap parameterized_conditional(const GaussMap& f, const Indices& block) {
    check_block(block, f.cod());
    const Indices rest = linalg::complement(block, f.cod());
    const Indices all_in = linalg::range(0, f.dom());

    const Matrix ax = linalg::select(f.a(), block, all_in);
    const Matrix ay = linalg::select(f.a(), rest, all_in);
    const Vector bx = linalg::select(f.b(), block);
    const Vector by = linalg::select(f.b(), rest);
    const Matrix sxx = linalg::clean_psd(linalg::select(f.sigma(), block, block), linalg::max_abs(f.sigma()));
    const Matrix syx = linalg::select(f.sigma(), rest, block);
    const Matrix syy = linalg::select(f.sigma(), rest, rest);

    const Matrix gain = syx * linalg::pinv(sxx);
    Matrix a = linalg::hstack(gain, ay - gain * ax);
    Vector b = by - gain * bx;
    Matrix sigma = linalg::clean_psd(syy - gain * transpose(syx), linalg::max_abs(f.sigma()));
    return GaussMap::assume_psd(std::move(a), std::move(b), std::move(sigma));
}

GaussMap conditional_distribution(const GaussState& psi, const Indices& block) {
    return parameterized_conditional(psi.as_map(), block);
}

bool approx_equal(const GaussMap& f, const GaussMap& g, double tol) {
    return linalg::approx_equal(f.a(), g.a(), tol) && linalg::approx_equal(f.b(), g.b(), tol) &&
           linalg::approx_equal(f.sigma(), g.sigma(), tol);
}

bool approx_equal(const GaussState& a, const GaussState& b, double tol) {
    return linalg::approx_equal(a.mean(), b.mean(), tol) && linalg::approx_equal(a.cov(), b.cov(), tol);
}

}  // namespace exactcond::gauss
