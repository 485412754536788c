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

#include "exactcond/opsem.hpp"

#include "lang/visit.hpp"

namespace exactcond::opsem {

namespace node = lang::node;
using lang::overloaded;
using lang::Term;

Configuration Configuration::running(TermPtr term, GaussState prior) {
    if (!term) {
        throw ContractError("configuration: null term");
    }
    return Configuration(std::move(term), std::move(prior));
}

Configuration Configuration::bot() { return Configuration(nullptr, GaussState::empty()); }

const TermPtr& Configuration::term() const {
    if (is_bot()) {
        throw ContractError("configuration: failure has no term");
    }
    return term_;
}

const GaussState& Configuration::prior() const {
    if (is_bot()) {
        throw ContractError("configuration: failure has no prior");
    }
    return prior_;
}

// ---------------------------------------------------------------------------
// Values and reduction contexts

bool is_value(const Term& t) {
    return std::visit(overloaded{
                          [](const node::Var&) { return true; },
                          [](const node::Latent&) { return true; },
                          [](const node::Const&) { return true; },
                          [](const node::Unit&) { return true; },
                          [](const node::Add& x) { return is_value(*x.lhs) && is_value(*x.rhs); },
                          [](const node::Scale& x) { return is_value(*x.body); },
                          [](const node::Pair& x) { return is_value(*x.first) && is_value(*x.second); },
                          [](const auto&) { return false; },
                      },
                      t.node());
}

namespace {

// Leftmost-innermost search; returns false when t is a value.
bool find_redex(const TermPtr& t, std::vector<Frame>& frames, TermPtr& redex) {
    auto in = [&](Frame f, const TermPtr& sub) {
        frames.push_back(std::move(f));
        if (find_redex(sub, frames, redex)) {
            return true;
        }
        frames.pop_back();
        return false;
    };
    return std::visit(
        overloaded{
            [&](const node::Add& x) { return in(frame::AddL{x.rhs}, x.lhs) || in(frame::AddR{x.lhs}, x.rhs); },
            [&](const node::Scale& x) { return in(frame::Scale{x.alpha}, x.body); },
            [&](const node::Pair& x) {
                return in(frame::PairL{x.second}, x.first) || in(frame::PairR{x.first}, x.second);
            },
            [&](const node::Cond& x) {
                if (in(frame::CondL{x.rhs}, x.lhs) || in(frame::CondR{x.lhs}, x.rhs)) {
                    return true;
                }
                redex = t;
                return true;
            },
            [&](const node::Let& x) {
                if (in(frame::Let{x.name, x.body}, x.bound)) {
                    return true;
                }
                redex = t;
                return true;
            },
            [&](const node::LetPair& x) {
                if (in(frame::LetPair{x.first, x.second, x.body}, x.bound)) {
                    return true;
                }
                redex = t;
                return true;
            },
            [&](const node::Normal&) {
                redex = t;
                return true;
            },
            [](const node::Var&) { return false; },
            [](const node::Latent&) { return false; },
            [](const node::Const&) { return false; },
            [](const node::Unit&) { return false; },
            [](const auto&) -> bool { throw ContractError("interpreter: program contains sugar; desugar it first"); },
        },
        t->node());
}

}  // namespace

std::optional<Decomposition> decompose(const TermPtr& t) {
    Decomposition d;
    if (!find_redex(t, d.context, d.redex)) {
        return std::nullopt;
    }
    return d;
}

TermPtr plug(const std::vector<Frame>& context, TermPtr t) {
    for (auto it = context.rbegin(); it != context.rend(); ++it) {
        t = std::visit(overloaded{
                           [&](const frame::AddL& f) { return lang::add(t, f.rhs); },
                           [&](const frame::AddR& f) { return lang::add(f.lhs, t); },
                           [&](const frame::Scale& f) { return lang::scale(f.alpha, t); },
                           [&](const frame::PairL& f) { return lang::pair(t, f.second); },
                           [&](const frame::PairR& f) { return lang::pair(f.first, t); },
                           [&](const frame::CondL& f) { return lang::cond(t, f.rhs); },
                           [&](const frame::CondR& f) { return lang::cond(f.lhs, t); },
                           [&](const frame::Let& f) { return lang::let(f.name, t, f.body); },
                           [&](const frame::LetPair& f) { return lang::let_pair(f.first, f.second, t, f.body); },
                       },
                       *it);
    }
    return t;
}

TermPtr substitute(const TermPtr& t, const std::string& x, const TermPtr& v) {
    auto sub = [&](const TermPtr& s) { return substitute(s, x, v); };
    return std::visit(
        overloaded{
            [&](const node::Var& y) { return y.name == x ? v : t; },
            [&](const node::Add& n) { return lang::add(sub(n.lhs), sub(n.rhs), t->loc()); },
            [&](const node::Sub& n) { return lang::sub(sub(n.lhs), sub(n.rhs), t->loc()); },
            [&](const node::Scale& n) { return lang::scale(n.alpha, sub(n.body), t->loc()); },
            [&](const node::Pair& n) { return lang::pair(sub(n.first), sub(n.second), t->loc()); },
            [&](const node::Let& n) {
                return lang::let(n.name, sub(n.bound), n.name == x ? n.body : sub(n.body), t->loc());
            },
            [&](const node::LetPair& n) {
                const bool shadowed = n.first == x || n.second == x;
                return lang::let_pair(n.first, n.second, sub(n.bound), shadowed ? n.body : sub(n.body), t->loc());
            },
            [&](const node::NormalWith& n) {
                return n.scalar_cov ? lang::normal_with(sub(n.mean), n.cov(0, 0), t->loc())
                                    : lang::normal_with(sub(n.mean), n.cov, t->loc());
            },
            [&](const node::Observe& n) { return lang::observe(sub(n.dist), sub(n.target), t->loc()); },
            [&](const node::Cond& n) { return lang::cond(sub(n.lhs), sub(n.rhs), t->loc()); },
            [&](const node::Seq& n) { return lang::seq(sub(n.first), sub(n.second), t->loc()); },
            [&](const node::MatVec& n) { return lang::mat_vec(n.matrix, sub(n.body), t->loc()); },
            [&](const auto&) { return t; },
        },
        t->node());
}

// ---------------------------------------------------------------------------
// Values as affine maps

namespace {

struct Row {
    Vector coeffs;
    double offset = 0.0;
};

std::vector<Row> rows_of(const Term& t, std::size_t r) {
    return std::visit(
        overloaded{
            [&](const node::Latent& x) {
                if (x.index >= r) {
                    throw ContractError("value: latent z" + std::to_string(x.index + 1) + " is not allocated");
                }
                Row row{Vector(r), 0.0};
                row.coeffs[x.index] = 1.0;
                return std::vector<Row>{row};
            },
            [&](const node::Const& x) { return std::vector<Row>{Row{Vector(r), x.value}}; },
            [&](const node::Unit&) { return std::vector<Row>{}; },
            [&](const node::Add& x) {
                std::vector<Row> a = rows_of(*x.lhs, r);
                const std::vector<Row> b = rows_of(*x.rhs, r);
                a[0].coeffs = a[0].coeffs + b[0].coeffs;
                a[0].offset += b[0].offset;
                return a;
            },
            [&](const node::Scale& x) {
                std::vector<Row> a = rows_of(*x.body, r);
                a[0].coeffs = x.alpha * a[0].coeffs;
                a[0].offset *= x.alpha;
                return a;
            },
            [&](const node::Pair& x) {
                std::vector<Row> a = rows_of(*x.first, r);
                std::vector<Row> b = rows_of(*x.second, r);
                a.insert(a.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end()));
                return a;
            },
            [&](const node::Var& x) -> std::vector<Row> {
                throw ContractError("value: free variable '" + x.name + "'");
            },
            [&](const auto&) -> std::vector<Row> { throw ContractError("value: term is not a value"); },
        },
        t.node());
}

}  // namespace

ValueExpr value_expr(const Term& value, std::size_t latents) {
    const std::vector<Row> rows = rows_of(value, latents);
    ValueExpr out{Matrix(rows.size(), latents), Vector(rows.size())};
    for (std::size_t i = 0; i < rows.size(); i++) {
        for (std::size_t j = 0; j < latents; j++) {
            out.v(i, j) = rows[i].coeffs[j];
        }
        out.w[i] = rows[i].offset;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reduction

Configuration step(const Configuration& c) {
    const GaussState& prior = c.prior();
    const std::optional<Decomposition> d = decompose(c.term());
    if (!d) {
        throw ContractError("step: configuration is already a value");
    }
    const Term& redex = *d->redex;
    const std::size_t r = prior.dim();

    if (redex.is<node::Normal>()) {
        return Configuration::running(plug(d->context, lang::latent(r)),
                                      gauss::tensor(prior, GaussState::standard(1)));
    }
    if (const auto* x = redex.as<node::Cond>()) {
        const ValueExpr lhs = value_expr(*x->lhs, r);
        const ValueExpr rhs = value_expr(*x->rhs, r);
        // X ~ prior, Z = v(X) - w(X); condition Z = 0.
        const Matrix joint_a = linalg::vstack(Matrix::identity(r), lhs.v - rhs.v);
        const Vector joint_b = linalg::concat(Vector(r), lhs.w - rhs.w);
        const GaussState joint = gauss::push(gauss::affine(joint_a, joint_b), prior);
        std::optional<GaussState> post = gauss::condition_dist(joint, {r}, Vector{0.0});
        if (!post) {
            return Configuration::bot();
        }
        return Configuration::running(plug(d->context, lang::unit()), std::move(*post));
    }
    if (const auto* x = redex.as<node::Let>()) {
        return Configuration::running(plug(d->context, substitute(x->body, x->name, x->bound)), prior);
    }
    if (const auto* x = redex.as<node::LetPair>()) {
        const auto* p = x->bound->as<node::Pair>();
        if (!p) {
            throw ContractError("step: let-pair bound to a value that is not a pair");
        }
        TermPtr body = substitute(x->body, x->second, p->second);
        body = substitute(body, x->first, p->first);
        return Configuration::running(plug(d->context, body), prior);
    }
    throw ContractError("step: unexpected redex " + lang::print(redex));
}

RunResult run(const lang::TypedTerm& program, bool trace) {
    if (!program.context().empty()) {
        throw ContractError("run: program has free variables");
    }
    if (!lang::is_core(*program.term())) {
        throw ContractError("run: program contains sugar; desugar it first");
    }
    RunResult out{Configuration::running(program.term(), GaussState::empty()), 0, {}};
    auto record = [&] {
        if (!trace) {
            return;
        }
        if (out.final.is_bot()) {
            out.trace.push_back({"", std::nullopt});
        } else {
            out.trace.push_back({lang::print(*out.final.term()), out.final.prior()});
        }
    };
    record();
    while (!out.final.is_bot() && !is_value(*out.final.term())) {
        out.final = step(out.final);
        out.steps++;
        record();
    }
    return out;
}

std::optional<GaussState> observable(const Configuration& c) {
    if (c.is_bot()) {
        return std::nullopt;
    }
    const GaussState& prior = c.prior();
    const ValueExpr v = value_expr(*c.term(), prior.dim());
    return gauss::push(gauss::affine(v.v, v.w), prior);
}

std::optional<GaussState> observable(const RunResult& r) { return observable(r.final); }

}  // namespace exactcond::opsem
