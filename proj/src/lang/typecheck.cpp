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

#include <cmath>

#include "exactcond/lang.hpp"
#include "lang/visit.hpp"

namespace exactcond::lang {

TypedTerm::TypedTerm(TermPtr term, Context context, std::unordered_map<const Term*, TypePtr> types)
    : term_(std::move(term)), context_(std::move(context)), types_(std::move(types)) {}

const TypePtr& TypedTerm::type_of(const Term& sub) const {
    const auto it = types_.find(&sub);
    if (it == types_.end()) {
        throw ContractError("type_of: term is not a subterm of the checked program");
    }
    return it->second;
}

namespace {

class Checker {
  public:
    explicit Checker(Context ctx) : env_(std::move(ctx)) {}

    TypePtr check(const Term& t) {
        TypePtr ty = infer(t);
        types_[&t] = ty;
        return ty;
    }

    std::unordered_map<const Term*, TypePtr> take() { return std::move(types_); }

  private:
    static void need_real(const TypePtr& t, const Term& at, const char* rule, const char* what) {
        if (t->kind() != Type::Kind::Real) {
            throw TypeError(at.loc(), rule, std::string(what) + " has type " + to_string(*t) + ", expected R");
        }
    }

    static std::size_t need_vector(const TypePtr& t, std::size_t n, const Term& at, const char* rule,
                                   const char* what) {
        if (!(*t == *Type::vector(n))) {
            throw TypeError(at.loc(), rule,
                            std::string(what) + " has type " + to_string(*t) + ", expected " +
                                to_string(*Type::vector(n)));
        }
        return n;
    }

    TypePtr lookup(const node::Var& v, const Term& at) const {
        for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
            if (it->name == v.name) {
                return it->type;
            }
        }
        throw TypeError(at.loc(), "var", "unbound variable '" + v.name + "'");
    }

    TypePtr infer(const Term& t) {
        return std::visit(
            overloaded{
                [&](const node::Var& x) { return lookup(x, t); },
                [&](const node::Latent&) { return Type::real(); },
                [&](const node::Add& x) {
                    need_real(check(*x.lhs), *x.lhs, "add", "left operand of '+'");
                    need_real(check(*x.rhs), *x.rhs, "add", "right operand of '+'");
                    return Type::real();
                },
                [&](const node::Sub& x) {
                    need_real(check(*x.lhs), *x.lhs, "sub", "left operand of '-'");
                    need_real(check(*x.rhs), *x.rhs, "sub", "right operand of '-'");
                    return Type::real();
                },
                [&](const node::Scale& x) {
                    if (!std::isfinite(x.alpha)) {
                        throw TypeError(t.loc(), "scale", "scalar is not finite");
                    }
                    need_real(check(*x.body), *x.body, "scale", "scaled expression");
                    return Type::real();
                },
                [&](const node::Const& x) {
                    if (!std::isfinite(x.value)) {
                        throw TypeError(t.loc(), "const", "constant is not finite");
                    }
                    return Type::real();
                },
                [&](const node::Pair& x) {
                    TypePtr a = check(*x.first);
                    TypePtr b = check(*x.second);
                    return Type::pair(std::move(a), std::move(b));
                },
                [&](const node::Unit&) { return Type::unit(); },
                [&](const node::Let& x) {
                    TypePtr bound = check(*x.bound);
                    env_.push_back({x.name, std::move(bound)});
                    TypePtr body = check(*x.body);
                    env_.pop_back();
                    return body;
                },
                [&](const node::LetPair& x) {
                    TypePtr bound = check(*x.bound);
                    if (bound->kind() != Type::Kind::Pair) {
                        throw TypeError(x.bound->loc(), "let-pair",
                                        "bound expression has type " + to_string(*bound) + ", expected a pair");
                    }
                    env_.push_back({x.first, bound->first()});
                    env_.push_back({x.second, bound->second()});
                    TypePtr body = check(*x.body);
                    env_.pop_back();
                    env_.pop_back();
                    return body;
                },
                [&](const node::Normal&) { return Type::real(); },
                [&](const node::NormalWith& x) {
                    TypePtr mean = check(*x.mean);
                    if (!linalg::all_finite(x.cov)) {
                        throw TypeError(t.loc(), "normal", "covariance is not finite");
                    }
                    if (x.scalar_cov) {
                        need_real(mean, *x.mean, "normal", "mean");
                        return Type::real();
                    }
                    if (x.cov.rows() != x.cov.cols()) {
                        throw TypeError(t.loc(), "normal", "covariance matrix is not square");
                    }
                    const std::size_t n = need_vector(mean, x.cov.rows(), *x.mean, "normal", "mean");
                    return Type::vector(n);
                },
                [&](const node::Observe& x) {
                    TypePtr d = check(*x.dist);
                    TypePtr v = check(*x.target);
                    if (!(*d == *v)) {
                        throw TypeError(t.loc(), "observe",
                                        "distribution has type " + to_string(*d) + " but the observed value has type " +
                                            to_string(*v));
                    }
                    return Type::unit();
                },
                [&](const node::Cond& x) {
                    need_real(check(*x.lhs), *x.lhs, "cond", "left side of '=:='");
                    need_real(check(*x.rhs), *x.rhs, "cond", "right side of '=:='");
                    return Type::unit();
                },
                [&](const node::Seq& x) {
                    check(*x.first);
                    return check(*x.second);
                },
                [&](const node::MatVec& x) {
                    if (!linalg::all_finite(x.matrix)) {
                        throw TypeError(t.loc(), "matvec", "matrix is not finite");
                    }
                    need_vector(check(*x.body), x.matrix.cols(), *x.body, "matvec", "vector operand");
                    return Type::vector(x.matrix.rows());
                },
            },
            t.node());
    }

    Context env_;
    std::unordered_map<const Term*, TypePtr> types_;
};

}  // namespace

TypedTerm typecheck(const TermPtr& t, const Context& ctx) {
    Checker c(ctx);
    c.check(*t);
    return TypedTerm(t, ctx, c.take());
}

}  // namespace exactcond::lang
