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

#include "exactcond/denot.hpp"

#include "exactcond/opsem.hpp"
#include "lang/visit.hpp"

namespace exactcond::denot {

namespace node = lang::node;
using gauss::GaussMap;
using lang::overloaded;
using lang::Term;
using lang::TypePtr;
using linalg::Matrix;
using linalg::Vector;

std::size_t flat_size(const lang::Context& ctx) {
    std::size_t n = 0;
    for (const auto& b : ctx) {
        n += b.type->size();
    }
    return n;
}

namespace {

struct Slot {
    std::string name;
    std::size_t offset;
    std::size_t size;
};

class Denoter {
  public:
    Denoter(const lang::TypedTerm& typed) : typed_(typed) {
        for (const auto& b : typed.context()) {
            push(b.name, b.type->size());
        }
    }

    CondMorphism run(const Term& t) {
        const std::size_t n = width_;
        return std::visit(
            overloaded{
                [&](const node::Var& x) {
                    for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
                        if (it->name == x.name) {
                            return cond::embed(gauss::projection(n, linalg::range(it->offset, it->offset + it->size)));
                        }
                    }
                    throw ContractError("denote: unbound variable '" + x.name + "'");
                },
                [&](const node::Unit&) { return cond::embed(gauss::discard(n)); },
                [&](const node::Const& x) { return cond::embed(gauss::affine(Matrix(1, n), Vector{x.value})); },
                [&](const node::Add& x) {
                    return cond::obs_compose(cond::embed(gauss::affine(Matrix{{1, 1}}, Vector(1))),
                                             cond::pairing(run(*x.lhs), run(*x.rhs)));
                },
                [&](const node::Scale& x) {
                    return cond::obs_compose(cond::embed(gauss::affine(Matrix{{x.alpha}}, Vector(1))), run(*x.body));
                },
                [&](const node::Pair& x) { return cond::pairing(run(*x.first), run(*x.second)); },
                [&](const node::Normal&) {
                    return cond::embed(GaussMap(Matrix(1, n), Vector(1), Matrix::identity(1)));
                },
                [&](const node::Cond& x) {
                    const CondMorphism diff = cond::obs_compose(cond::embed(gauss::affine(Matrix{{1, -1}}, Vector(1))),
                                                                cond::pairing(run(*x.lhs), run(*x.rhs)));
                    return cond::obs_compose(cond::condition_effect(Vector{0.0}), diff);
                },
                [&](const node::Let& x) {
                    const CondMorphism bound = run(*x.bound);
                    push(x.name, bound.cod());
                    const CondMorphism body = run(*x.body);
                    pop(1);
                    return bind(body, bound);
                },
                [&](const node::LetPair& x) {
                    const CondMorphism bound = run(*x.bound);
                    const TypePtr& type = typed_.type_of(*x.bound);
                    push(x.first, type->first()->size());
                    push(x.second, type->second()->size());
                    const CondMorphism body = run(*x.body);
                    pop(2);
                    return bind(body, bound);
                },
                [](const node::Latent&) -> CondMorphism {
                    throw ContractError("denote: latent variables have no denotation");
                },
                [](const auto&) -> CondMorphism { throw ContractError("denote: unexpected sugar"); },
            },
            t.node());
    }

  private:
    // body after <id, bound>
    CondMorphism bind(const CondMorphism& body, const CondMorphism& bound) const {
        return cond::obs_compose(body, cond::pairing(cond::embed(gauss::identity(width_)), bound));
    }

    void push(const std::string& name, std::size_t size) {
        env_.push_back({name, width_, size});
        width_ += size;
    }

    void pop(std::size_t count) {
        for (std::size_t i = 0; i < count; i++) {
            width_ -= env_.back().size;
            env_.pop_back();
        }
    }

    const lang::TypedTerm& typed_;
    std::vector<Slot> env_;
    std::size_t width_ = 0;
};

}  // namespace

CondMorphism denote(const lang::TypedTerm& e) {
    const lang::TypedTerm core = lang::desugar(e);
    Denoter d(core);
    return d.run(*core.term());
}

Agreement compare_semantics(const lang::TypedTerm& e) {
    if (!e.context().empty()) {
        throw ContractError("compare_semantics: program has free variables");
    }
    const lang::TypedTerm core = lang::desugar(e);
    Agreement out;
    out.denotational = cond::state_normalize(denote(core));
    out.operational = opsem::observable(opsem::run(core));
    if (!out.denotational || !out.operational) {
        out.agree = !out.denotational && !out.operational;
    } else {
        out.agree = gauss::approx_equal(*out.denotational, *out.operational, 1e-8);
    }
    return out;
}

bool check_agreement(const lang::TypedTerm& e) { return compare_semantics(e).agree; }

}  // namespace exactcond::denot
