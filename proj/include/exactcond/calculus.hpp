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

#ifndef EXACTCOND_CALCULUS_HPP_
#define EXACTCOND_CALCULUS_HPP_

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "exactcond/cond.hpp"
#include "exactcond/lang.hpp"

/// The let-free core fragment
///
///     t ::= nu x. t | (s =:= s') t | r[s1, ..., sn] | bot
///
/// over affine expressions s, its axioms as individual rewrites, and the
/// normalizers for closed terms and for effects.
namespace exactcond::calculus {

using linalg::Matrix;
using linalg::Vector;

/// sum_i coeffs[i] * v_i + constant, where v_i is the variable of level i:
/// context variables first, then nu-binders in order. Missing trailing
/// coefficients are zero.
struct AffineExpr {
    std::vector<double> coeffs;
    double constant = 0.0;

    static AffineExpr variable(std::size_t level);
    static AffineExpr of_constant(double c);

    double coeff(std::size_t level) const { return level < coeffs.size() ? coeffs[level] : 0.0; }
    /// Highest level with a nonzero coefficient plus one.
    std::size_t support_end() const;
    bool is_constant() const { return support_end() == 0; }
};

AffineExpr operator+(const AffineExpr& a, const AffineExpr& b);
AffineExpr operator-(const AffineExpr& a, const AffineExpr& b);
AffineExpr operator*(double alpha, const AffineExpr& a);
/// Same affine function up to tol * (1 + max |entry|).
bool approx_equal(const AffineExpr& a, const AffineExpr& b, double tol = 1e-12);

struct Nu {
    std::string name;
};
struct CondStmt {
    AffineExpr lhs, rhs;
};
using Stmt = std::variant<Nu, CondStmt>;

/// A chain of statements ending in r[result] or bot. Expressions in a
/// statement may use the context and the binders before it.
struct CoreTerm {
    std::vector<std::string> context;
    std::vector<Stmt> stmts;
    bool bot = false;
    std::vector<AffineExpr> result;  // empty when bot
    std::size_t bot_arity = 0;       // result width of a bot term

    std::size_t context_size() const { return context.size(); }
    std::size_t binder_count() const;
    /// Number of variable levels in scope just before statement p.
    std::size_t scope_at(std::size_t p) const;
    std::size_t arity() const { return bot ? bot_arity : result.size(); }
};

/// Rendering in nu / r[] notation, e.g.  nu z1. nu z2. (z1 =:= z2) r[z1 + z2].
std::string print(const CoreTerm& t);
std::string print(const AffineExpr& e, const std::vector<std::string>& names);

/// Flattens a typed program (desugared first) into the fragment by symbolic
/// evaluation: lets are inlined, each normal() becomes a binder, each
/// condition a statement. Context variables must have type R. A program of
/// type R^n (any nesting of pairs) returns its n coordinates in order.
CoreTerm to_core(const lang::TypedTerm& e);

/// Back to the surface language over the context (all R); bot becomes
/// (0 =:= 1) followed by zeros.
lang::TermPtr from_core(const CoreTerm& t);
lang::Context core_context(const CoreTerm& t);

// ---------------------------------------------------------------------------
// Axioms

enum class Axiom { Disc, Orth, C1, C2, C3, Taut, Fail, Subs, Init, Cong };

std::string to_string(Axiom a);

/// One axiom instance, applied at statement `position`.
///
///   Disc   nu x. t -> t                    x unused in t
///   Orth   nu x1..xn. t -> nu x1..xn. t[Ux/x]   U orthogonal n x n
///   C1     swaps two adjacent conditions
///   C2     swaps a condition with an adjacent binder it does not mention
///   C3     (a =:= b) bot -> bot
///   Taut   (a =:= a) t -> t
///   Fail   (b1 =:= b2) t -> bot            constants b1 != b2
///   Subs   (a =:= b) t -> (a =:= b) t'     where the target-th expression e
///                                          after the condition becomes
///                                          e + lambda (b - a)
///   Init   nu x. (x =:= c) t -> t[c/x]     the condition is alpha x + beta
///                                          =:= gamma with constants, alpha != 0
///   Cong   (s =:= t) -> (alpha s + shift =:= alpha t + shift), alpha != 0
///
/// Expressions after a condition are numbered lhs, rhs of each later
/// condition in order, then the result components.
struct Rule {
    Axiom axiom = Axiom::Disc;
    Matrix u;                  // Orth
    std::size_t target = 0;    // Subs
    double scale = 1.0;        // Subs lambda, Cong alpha
    AffineExpr shift;          // Cong
};

/// Throws ContractError naming the pattern that failed to match.
CoreTerm rewrite_step(const CoreTerm& t, const Rule& rule, std::size_t position);

// ---------------------------------------------------------------------------
// Normal forms

/// bot, or nu z. r[A z + c] with A of size arity x (latent count).
struct ClosedNormalForm {
    bool bot = false;
    Matrix a;
    Vector c;

    /// N(c, A A^T); nullopt for bot.
    std::optional<gauss::GaussState> state() const;
};

/// Requires an empty context.
ClosedNormalForm normalize_closed(const CoreTerm& t);

/// The fragment term nu z. r[A z + c] (or bot).
CoreTerm as_core(const ClosedNormalForm& nf);

/// A x =:= B z + c with A in reduced row echelon form without zero rows,
/// reported as (A, c, B B^T); requires arity 0.
cond::EffectNormalForm normalize_effect(const CoreTerm& t);

}  // namespace exactcond::calculus

#endif  // EXACTCOND_CALCULUS_HPP_
