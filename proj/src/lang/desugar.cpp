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
#include <functional>

#include "exactcond/lang.hpp"
#include "lang/visit.hpp"

namespace exactcond::lang {

namespace {

using Leaves = std::vector<TermPtr>;
using Continuation = std::function<TermPtr(Leaves)>;

bool duplicable(const Term& t) { return t.is<node::Var>() || t.is<node::Latent>() || t.is<node::Const>(); }

class Desugarer {
  public:
    explicit Desugarer(const TypedTerm& typed) : typed_(typed) {}

    TermPtr run(const TermPtr& t) {
        return std::visit(
            overloaded{
                [&](const node::Var&) { return t; },
                [&](const node::Latent&) { return t; },
                [&](const node::Const&) { return t; },
                [&](const node::Unit&) { return t; },
                [&](const node::Normal&) { return t; },
                [&](const node::Add& x) { return add(run(x.lhs), run(x.rhs), t->loc()); },
                [&](const node::Sub& x) { return add(run(x.lhs), scale(-1.0, run(x.rhs)), t->loc()); },
                [&](const node::Scale& x) { return scale(x.alpha, run(x.body), t->loc()); },
                [&](const node::Pair& x) { return pair(run(x.first), run(x.second), t->loc()); },
                [&](const node::Let& x) { return let(x.name, run(x.bound), run(x.body), t->loc()); },
                [&](const node::LetPair& x) {
                    return let_pair(x.first, x.second, run(x.bound), run(x.body), t->loc());
                },
                [&](const node::Cond& x) { return cond(run(x.lhs), run(x.rhs), t->loc()); },
                [&](const node::Seq& x) { return let(fresh("s"), run(x.first), run(x.second), t->loc()); },
                [&](const node::NormalWith& x) { return normal_with(x, t->loc()); },
                [&](const node::Observe& x) { return observe_with(x, t->loc()); },
                [&](const node::MatVec& x) {
                    const TypePtr& arg = typed_.type_of(*x.body);
                    return destructure(run(x.body), arg, [&](Leaves v) { return apply_matrix(x.matrix, v); });
                },
            },
            t->node());
    }

  private:
    std::string fresh(const char* stem) { return "#" + std::string(stem) + std::to_string(counter_++); }

    /// Evaluates t once, left to right, and hands its real coordinates to k.
    TermPtr destructure(const TermPtr& t, const TypePtr& type, const Continuation& k) {
        switch (type->kind()) {
            case Type::Kind::Real: {
                if (duplicable(*t)) {
                    return k({t});
                }
                const std::string name = fresh("a");
                return let(name, t, k({var(name)}));
            }
            case Type::Kind::Unit: {
                if (t->is<node::Unit>()) {
                    return k({});
                }
                return let(fresh("u"), t, k({}));
            }
            case Type::Kind::Pair:
                break;
        }
        if (const auto* p = t->as<node::Pair>()) {
            return destructure(p->first, type->first(), [&, p](Leaves a) {
                return destructure(p->second, type->second(), [&, a](Leaves b) {
                    Leaves all = a;
                    all.insert(all.end(), b.begin(), b.end());
                    return k(std::move(all));
                });
            });
        }
        const std::string x = fresh("p");
        const std::string y = fresh("p");
        TermPtr body = destructure(var(x), type->first(), [&](Leaves a) {
            return destructure(var(y), type->second(), [&, a](Leaves b) {
                Leaves all = a;
                all.insert(all.end(), b.begin(), b.end());
                return k(std::move(all));
            });
        });
        return let_pair(x, y, t, std::move(body));
    }

    static TermPtr apply_matrix(const Matrix& m, const Leaves& v) {
        Leaves rows;
        for (std::size_t i = 0; i < m.rows(); i++) {
            TermPtr row;
            for (std::size_t j = 0; j < m.cols(); j++) {
                if (m(i, j) == 0.0) {
                    continue;
                }
                TermPtr term = m(i, j) == 1.0 ? v[j] : scale(m(i, j), v[j]);
                row = row ? add(row, term) : term;
            }
            rows.push_back(row ? row : constant(0.0));
        }
        return tuple(rows);
    }

    TermPtr normal_with(const node::NormalWith& x, SourceLoc loc) {
        TermPtr mean = run(x.mean);
        if (x.scalar_cov) {
            const double v = x.cov(0, 0);
            if (v < 0.0) {
                throw ContractError("normal at " + to_string(loc) + ": negative variance " + std::to_string(v));
            }
            return add(mean, scale(std::sqrt(v), normal(loc)), loc);
        }
        const std::size_t n = x.cov.rows();
        const Matrix root = linalg::psd_root(x.cov);
        Leaves noise;
        for (std::size_t i = 0; i < n; i++) {
            noise.push_back(normal(loc));
        }
        const TypePtr type = Type::vector(n);
        return destructure(mean, type, [&](Leaves mu) {
            return destructure(tuple(noise), type, [&, mu](Leaves z) {
                const TermPtr shaped = apply_matrix(root, z);
                return destructure(shaped, type, [&, mu](Leaves w) {
                    Leaves sum;
                    for (std::size_t i = 0; i < n; i++) {
                        sum.push_back(add(mu[i], w[i]));
                    }
                    return tuple(sum);
                });
            });
        });
    }

    TermPtr observe_with(const node::Observe& x, SourceLoc loc) {
        const TypePtr& type = typed_.type_of(*x.dist);
        const std::string y = fresh("y");
        TermPtr target = run(x.target);
        if (type->kind() == Type::Kind::Real) {
            return let(y, run(x.dist), cond(target, var(y), loc), loc);
        }
        TermPtr body = destructure(var(y), type, [&](Leaves ys) {
            return destructure(target, type, [&, ys](Leaves xs) {
                if (xs.empty()) {
                    return unit();
                }
                TermPtr out = cond(xs.back(), ys.back(), loc);
                for (std::size_t i = xs.size() - 1; i-- > 0;) {
                    out = let(fresh("s"), cond(xs[i], ys[i], loc), out);
                }
                return out;
            });
        });
        return let(y, run(x.dist), std::move(body), loc);
    }

    const TypedTerm& typed_;
    std::size_t counter_ = 0;
};

}  // namespace

TypedTerm desugar(const TypedTerm& t) {
    if (is_core(*t.term())) {
        return t;
    }
    Desugarer d(t);
    return typecheck(d.run(t.term()), t.context());
}

TypedTerm compile(std::string_view source, const Context& ctx) { return desugar(typecheck(parse(source), ctx)); }

}  // namespace exactcond::lang
