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

#ifndef EXACTCOND_LANG_HPP_
#define EXACTCOND_LANG_HPP_

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "exactcond/linalg.hpp"

/// The surface language: a first-order language over R with normal() and
/// exact conditions (=:=). Parsing, typing, desugaring and printing.
///
///     e ::= x | e + e | e - e | a * e | b | (e, e, ...) | ()
///         | let x = e in e | let (x, y) = e in e | e; e
///         | normal() | normal(e, v) | normal(e, [[...]]) | observe(e, e)
///         | [[...]] * e | e =:= e
///
/// `*` may also be written `·`, `=:=` may be written `≐`; `#` starts a
/// comment.
namespace exactcond::lang {

using linalg::Matrix;

struct SourceLoc {
    std::size_t line = 0;  // 1-based, 0 for synthesized nodes
    std::size_t col = 0;
};

std::string to_string(SourceLoc loc);

class SyntaxError : public std::runtime_error {
  public:
    SyntaxError(SourceLoc loc, const std::string& what);
    SourceLoc loc() const { return loc_; }

  private:
    SourceLoc loc_;
};

class TypeError : public std::runtime_error {
  public:
    TypeError(SourceLoc loc, std::string rule, const std::string& what);
    SourceLoc loc() const { return loc_; }
    const std::string& rule() const { return rule_; }

  private:
    SourceLoc loc_;
    std::string rule_;
};

// ---------------------------------------------------------------------------
// Types

class Type;
using TypePtr = std::shared_ptr<const Type>;

class Type {
  public:
    enum class Kind { Real, Unit, Pair };

    static TypePtr real();
    static TypePtr unit();
    static TypePtr pair(TypePtr first, TypePtr second);
    /// R^n as R * (R * (... * R)); R^0 is unit, R^1 is R.
    static TypePtr vector(std::size_t n);

    Kind kind() const { return kind_; }
    const TypePtr& first() const { return first_; }
    const TypePtr& second() const { return second_; }

    /// Number of real coordinates.
    std::size_t size() const { return size_; }

  private:
    Type(Kind kind, TypePtr first, TypePtr second);

    Kind kind_;
    TypePtr first_;
    TypePtr second_;
    std::size_t size_;
};

bool operator==(const Type& a, const Type& b);
std::string to_string(const Type& t);

// ---------------------------------------------------------------------------
// Terms

class Term;
using TermPtr = std::shared_ptr<const Term>;

namespace node {

struct Var {
    std::string name;
};
/// The i-th latent variable allocated by the interpreter, printed z{i+1}.
struct Latent {
    std::size_t index;
};
struct Add {
    TermPtr lhs, rhs;
};
struct Sub {
    TermPtr lhs, rhs;
};
struct Scale {
    double alpha;
    TermPtr body;
};
struct Const {
    double value;
};
struct Pair {
    TermPtr first, second;
};
struct Unit {};
struct Let {
    std::string name;
    TermPtr bound, body;
};
struct LetPair {
    std::string first, second;
    TermPtr bound, body;
};
struct Normal {};
/// normal(mean, cov); a 1x1 cov is the variance of a real mean.
struct NormalWith {
    TermPtr mean;
    Matrix cov;
    bool scalar_cov;  // written as a number rather than a matrix literal
};
struct Observe {
    TermPtr dist, target;
};
struct Cond {
    TermPtr lhs, rhs;
};
struct Seq {
    TermPtr first, second;
};
struct MatVec {
    Matrix matrix;
    TermPtr body;
};

}  // namespace node

using Node = std::variant<node::Var, node::Latent, node::Add, node::Sub, node::Scale, node::Const, node::Pair,
                          node::Unit, node::Let, node::LetPair, node::Normal, node::NormalWith, node::Observe,
                          node::Cond, node::Seq, node::MatVec>;

class Term {
  public:
    Term(Node node, SourceLoc loc) : node_(std::move(node)), loc_(loc) {}

    const Node& node() const { return node_; }
    SourceLoc loc() const { return loc_; }

    template <class T>
    const T* as() const {
        return std::get_if<T>(&node_);
    }
    template <class T>
    bool is() const {
        return std::holds_alternative<T>(node_);
    }

  private:
    Node node_;
    SourceLoc loc_;
};

// Constructors for building programs in code.
TermPtr var(std::string name, SourceLoc loc = {});
TermPtr latent(std::size_t index);
TermPtr add(TermPtr lhs, TermPtr rhs, SourceLoc loc = {});
TermPtr sub(TermPtr lhs, TermPtr rhs, SourceLoc loc = {});
TermPtr scale(double alpha, TermPtr body, SourceLoc loc = {});
TermPtr constant(double value, SourceLoc loc = {});
TermPtr pair(TermPtr first, TermPtr second, SourceLoc loc = {});
TermPtr unit(SourceLoc loc = {});
TermPtr let(std::string name, TermPtr bound, TermPtr body, SourceLoc loc = {});
TermPtr let_pair(std::string first, std::string second, TermPtr bound, TermPtr body, SourceLoc loc = {});
TermPtr normal(SourceLoc loc = {});
TermPtr normal_with(TermPtr mean, double variance, SourceLoc loc = {});
TermPtr normal_with(TermPtr mean, Matrix cov, SourceLoc loc = {});
TermPtr observe(TermPtr dist, TermPtr target, SourceLoc loc = {});
TermPtr cond(TermPtr lhs, TermPtr rhs, SourceLoc loc = {});
TermPtr seq(TermPtr first, TermPtr second, SourceLoc loc = {});
TermPtr mat_vec(Matrix matrix, TermPtr body, SourceLoc loc = {});

/// Right-nested tuple (), e, (e1, (e2, ...)).
TermPtr tuple(const std::vector<TermPtr>& items);

/// Structural equality, ignoring source locations.
bool equal(const Term& a, const Term& b);

/// True when only the constructs of the core calculus occur (no Sub, Seq,
/// NormalWith, Observe, MatVec).
bool is_core(const Term& t);

/// Number of nodes.
std::size_t term_size(const Term& t);

// ---------------------------------------------------------------------------
// Parsing and printing

TermPtr parse(std::string_view source);

/// Prints in the concrete syntax; parse(print(t)) is equal to t for parsed
/// terms. Latents print as z1, z2, ...
std::string print(const Term& t);

// ---------------------------------------------------------------------------
// Typing

struct Binding {
    std::string name;
    TypePtr type;
};
using Context = std::vector<Binding>;

/// `x:R, y:R*R` style context, as used by the command line.
Context parse_context(std::string_view text);

class TypedTerm {
  public:
    TypedTerm(TermPtr term, Context context, std::unordered_map<const Term*, TypePtr> types);

    const TermPtr& term() const { return term_; }
    const Context& context() const { return context_; }
    const TypePtr& type() const { return type_of(*term_); }
    /// Type of any subterm of term().
    const TypePtr& type_of(const Term& sub) const;

  private:
    TermPtr term_;
    Context context_;
    std::unordered_map<const Term*, TypePtr> types_;
};

/// Latent variables are typed R. Throws TypeError.
TypedTerm typecheck(const TermPtr& t, const Context& ctx = {});

/// Rewrites the sugar into core constructs and re-typechecks. Fresh binders
/// start with '#', which the lexer never produces. Throws ContractError for
/// covariances that are not PSD.
TypedTerm desugar(const TypedTerm& t);

/// parse, typecheck, desugar.
TypedTerm compile(std::string_view source, const Context& ctx = {});

}  // namespace exactcond::lang

#endif  // EXACTCOND_LANG_HPP_
