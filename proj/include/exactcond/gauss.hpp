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

#ifndef EXACTCOND_GAUSS_HPP_
#define EXACTCOND_GAUSS_HPP_

#include <optional>

#include "exactcond/linalg.hpp"

/// The category of affine maps with additive Gaussian noise.
///
/// Objects are dimensions n (standing for R^n); a morphism m -> n is a triple
/// (A, b, Sigma) acting as x |-> A x + b + N(0, Sigma). States are morphisms
/// out of 0, i.e. multivariate normal distributions.
namespace exactcond::gauss {

using linalg::AffineSubspace;
using linalg::Indices;
using linalg::Matrix;
using linalg::Vector;

class GaussMap {
  public:
    /// Validates shapes and repairs Sigma (see linalg::repair_psd).
    GaussMap(Matrix a, Vector b, Matrix sigma);

    /// Shapes are still checked, Sigma is only symmetrized. For results of
    /// composition and conditioning, which are PSD up to rounding.
    static GaussMap assume_psd(Matrix a, Vector b, Matrix sigma);

    std::size_t dom() const { return a_.cols(); }
    std::size_t cod() const { return a_.rows(); }
    const Matrix& a() const { return a_; }
    const Vector& b() const { return b_; }
    const Matrix& sigma() const { return sigma_; }

    /// Sigma == 0, i.e. the map commutes with copying.
    bool deterministic() const;

  private:
    struct Unchecked {};
    GaussMap(Unchecked, Matrix a, Vector b, Matrix sigma);

    Matrix a_;
    Vector b_;
    Matrix sigma_;
};

/// N(mean, cov); the same data as a GaussMap out of dimension 0.
class GaussState {
  public:
    GaussState(Vector mean, Matrix cov);
    static GaussState assume_psd(Vector mean, Matrix cov);

    /// The unique state on R^0.
    static GaussState empty() { return assume_psd(Vector(), Matrix()); }
    static GaussState point(Vector x);
    static GaussState standard(std::size_t n);

    std::size_t dim() const { return mean_.size(); }
    const Vector& mean() const { return mean_; }
    const Matrix& cov() const { return cov_; }

    GaussMap as_map() const;
    static GaussState from_map(const GaussMap& f);

  private:
    struct Unchecked {};
    GaussState(Unchecked, Vector mean, Matrix cov);

    Vector mean_;
    Matrix cov_;
};

// Composition and tensor.

/// g after f: (AC, Ad + b, A Xi A^T + Sigma).
GaussMap compose(const GaussMap& g, const GaussMap& f);
/// Pushforward of a state.
GaussState push(const GaussMap& f, const GaussState& s);
/// Block-diagonal parallel composition.
GaussMap tensor(const GaussMap& f, const GaussMap& g);
GaussState tensor(const GaussState& a, const GaussState& b);

/// The distribution f(x) at a deterministic input.
GaussState apply(const GaussMap& f, const Vector& x);

// Structural morphisms (all deterministic).

GaussMap identity(std::size_t n);
/// x |-> (x, x)
GaussMap copy(std::size_t n);
/// x |-> ()
GaussMap discard(std::size_t n);
/// (x, y) |-> (y, x) for x in R^m, y in R^n
GaussMap swap(std::size_t m, std::size_t n);
GaussMap affine(Matrix a, Vector b);
/// x |-> (x[idx[0]], x[idx[1]], ...)
GaussMap projection(std::size_t n, const Indices& idx);

// Marginals, conditioning, supports.

GaussState marginal(const GaussState& psi, const Indices& block);

/// Conditional of psi's complement block given psi[obs_block] = a, by the
/// pseudoinverse formula. nullopt when a is off the support of the observed
/// marginal (the failed conditioning problem).
std::optional<GaussState> condition_dist(const GaussState& psi, const Indices& obs_block, const Vector& a);

/// mean + col(cov).
AffineSubspace support(const GaussState& psi);

/// mu << nu, i.e. support(mu) is contained in support(nu).
bool abs_cont(const GaussState& mu, const GaussState& nu);

/// For f : A -> n and a block X of its outputs (Y the rest, in order), a map
/// X (x) A -> Y whose recomposition with the X-marginal of f gives back f.
GaussMap parameterized_conditional(const GaussMap& f, const Indices& block);

/// Conditional distribution psi|_X : X -> Y of a state.
GaussMap conditional_distribution(const GaussState& psi, const Indices& block);

bool approx_equal(const GaussMap& f, const GaussMap& g, double tol);
bool approx_equal(const GaussState& a, const GaussState& b, double tol);

}  // namespace exactcond::gauss

#endif  // EXACTCOND_GAUSS_HPP_
