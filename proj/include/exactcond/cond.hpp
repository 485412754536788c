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

#ifndef EXACTCOND_COND_HPP_
#define EXACTCOND_COND_HPP_

#include <optional>

#include "exactcond/gauss.hpp"

/// Gaussian maps with attached exact observations, their composition, and the
/// decision procedure for observational equivalence.
namespace exactcond::cond {

using gauss::GaussMap;
using gauss::GaussState;
using linalg::AffineSubspace;
using linalg::Indices;
using linalg::Matrix;
using linalg::Vector;

/// An open conditioning program
///
///     x |- let (y, k) = f(x) in (k =:= o); y
///
/// f : dom -> cod + k lays out its outputs as (y, k); o is the deterministic
/// observation attached to the hidden condition wire.
class CondMorphism {
  public:
    CondMorphism(std::size_t cod, GaussMap f, Vector o);

    std::size_t dom() const { return f_.dom(); }
    std::size_t cod() const { return cod_; }
    std::size_t k() const { return o_.size(); }
    const GaussMap& f() const { return f_; }
    const Vector& o() const { return o_; }

    Indices output_block() const { return linalg::range(0, cod_); }
    Indices condition_block() const { return linalg::range(cod_, cod_ + k()); }

  private:
    std::size_t cod_;
    GaussMap f_;
    Vector o_;
};

/// The condition-free embedding J(f) = (0, f, !).
CondMorphism embed(const GaussMap& f);

/// The effect (=:= o) : k ~> 0.
CondMorphism condition_effect(const Vector& o);

/// g after f; observations are concatenated as (o_g, o_f).
CondMorphism obs_compose(const CondMorphism& g, const CondMorphism& f);

/// Parallel composition; condition wires are swapped past the right factor's
/// outputs so the layout is (y_f, y_g, k_f, k_g).
CondMorphism obs_tensor(const CondMorphism& f, const CondMorphism& g);

/// <f, g> = (f (x) g) . copy
CondMorphism pairing(const CondMorphism& f, const CondMorphism& g);

/// Posterior of a closed program, nullopt when the observation is off the
/// support of the condition-wire marginal.
std::optional<GaussState> state_normalize(const CondMorphism& s);

/// `A x =:= N(c, S)` with A in reduced row echelon form without zero rows,
/// or the failing effect.
struct EffectNormalForm {
    enum class Status { Bot, Constraint };
    Status status = Status::Bot;
    Matrix a;
    Vector c;
    Matrix s;

    bool is_bot() const { return status == Status::Bot; }
};

/// Normal form of the condition A x =:= N(c, S) (A is k x n, S is k x k).
/// Rows that do not involve x are resolved as closed conditions.
EffectNormalForm constraint_normal_form(const Matrix& a, const Vector& c, const Matrix& s);

/// Normal form of an effect (cod == 0).
EffectNormalForm effect_normal_form(const CondMorphism& e);

/// Success region {x : A x - c in col(S)} of a non-failing normal form.
AffineSubspace success_region(const EffectNormalForm& nf);

/// x |- posterior(x) on the success region W, stored as its action on W's
/// direction space (matrix * projector onto that space), its value at the
/// minimum-norm point of W, and its noise covariance.
struct CanonicalPosterior {
    Matrix a_on_w;
    Vector value_at_point;
    Matrix sigma;
};

struct CanonicalRecord {
    std::size_t dom = 0;
    std::size_t cod = 0;
    EffectNormalForm effect;
    std::optional<AffineSubspace> success;  // absent iff the effect is Bot
    std::optional<CanonicalPosterior> posterior;
};

CanonicalRecord canonicalize(const CondMorphism& m);

/// Tolerance for comparing canonical records.
inline constexpr double kEquivTolerance = 1e-8;

bool records_equal(const CanonicalRecord& a, const CanonicalRecord& b, double tol = kEquivTolerance);
bool equal(const EffectNormalForm& a, const EffectNormalForm& b, double tol = kEquivTolerance);

/// Observational equivalence of two morphisms with the same type.
bool equiv(const CondMorphism& m1, const CondMorphism& m2);

}  // namespace exactcond::cond

#endif  // EXACTCOND_COND_HPP_
