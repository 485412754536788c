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

#include <map>

#include "doctest.h"
#include "exactcond/opsem.hpp"
#include "support/programs.hpp"

using exactcond::ContractError;
using namespace exactcond::opsem;
namespace lang = exactcond::lang;
namespace linalg = exactcond::linalg;
namespace node = exactcond::lang::node;

namespace {

constexpr double kTol = 1e-8;

RunResult run_source(std::string_view src, bool trace = false) { return run(lang::compile(src), trace); }

std::string show(const Configuration& c) { return c.is_bot() ? "bot" : lang::print(*c.term()); }

// Reference decomposition: walk children in evaluation order, descend into the
// first non-value one; if none, the node itself is the redex. Returns the term
// with the redex replaced by the variable "HOLE", and the redex.
std::optional<std::pair<TermPtr, TermPtr>> oracle_decompose(const TermPtr& t) {
    using R = std::optional<std::pair<TermPtr, TermPtr>>;
    auto inner = [](const TermPtr& child, auto rebuild) -> R {
        if (is_value(*child)) {
            return std::nullopt;
        }
        R r = oracle_decompose(child);
        return std::make_pair(rebuild(r->first), r->second);
    };
    if (t->is<node::Normal>()) {
        return std::make_pair(lang::var("HOLE"), t);
    }
    if (const auto* x = t->as<node::Add>()) {
        if (R r = inner(x->lhs, [&](TermPtr h) { return lang::add(h, x->rhs); })) return r;
        if (R r = inner(x->rhs, [&](TermPtr h) { return lang::add(x->lhs, h); })) return r;
        return std::nullopt;
    }
    if (const auto* x = t->as<node::Scale>()) {
        return inner(x->body, [&](TermPtr h) { return lang::scale(x->alpha, h); });
    }
    if (const auto* x = t->as<node::Pair>()) {
        if (R r = inner(x->first, [&](TermPtr h) { return lang::pair(h, x->second); })) return r;
        return inner(x->second, [&](TermPtr h) { return lang::pair(x->first, h); });
    }
    if (const auto* x = t->as<node::Cond>()) {
        if (R r = inner(x->lhs, [&](TermPtr h) { return lang::cond(h, x->rhs); })) return r;
        if (R r = inner(x->rhs, [&](TermPtr h) { return lang::cond(x->lhs, h); })) return r;
        return std::make_pair(lang::var("HOLE"), t);
    }
    if (const auto* x = t->as<node::Let>()) {
        if (R r = inner(x->bound, [&](TermPtr h) { return lang::let(x->name, h, x->body); })) return r;
        return std::make_pair(lang::var("HOLE"), t);
    }
    if (const auto* x = t->as<node::LetPair>()) {
        if (R r = inner(x->bound, [&](TermPtr h) { return lang::let_pair(x->first, x->second, h, x->body); })) {
            return r;
        }
        return std::make_pair(lang::var("HOLE"), t);
    }
    return std::nullopt;
}

// Renames latent i to perm[i] in a value.
TermPtr permute_latents(const TermPtr& t, const linalg::Indices& perm) {
    if (const auto* x = t->as<node::Latent>()) return lang::latent(perm[x->index]);
    if (const auto* x = t->as<node::Add>()) return lang::add(permute_latents(x->lhs, perm), permute_latents(x->rhs, perm));
    if (const auto* x = t->as<node::Scale>()) return lang::scale(x->alpha, permute_latents(x->body, perm));
    if (const auto* x = t->as<node::Pair>()) {
        return lang::pair(permute_latents(x->first, perm), permute_latents(x->second, perm));
    }
    return t;
}

bool same_observable(const std::optional<GaussState>& a, const std::optional<GaussState>& b, double tol) {
    if (!a || !b) {
        return !a && !b;
    }
    return exactcond::gauss::approx_equal(*a, *b, tol);
}

}  // namespace

TEST_CASE("decompose: reference cases") {
    const TermPtr t = lang::parse("normal() + 1");
    const auto d = decompose(t);
    REQUIRE(d);
    REQUIRE(d->context.size() == 1);
    CHECK(std::holds_alternative<frame::AddL>(d->context[0]));
    CHECK(d->redex->is<node::Normal>());
    CHECK(lang::print(*plug(d->context, lang::var("HOLE"))) == "HOLE + 1");

    CHECK_FALSE(decompose(lang::tuple({lang::latent(0), lang::unit(), lang::scale(2, lang::constant(1))})));

    const auto e = decompose(lang::parse("let x = (0 =:= 1) in x"));
    REQUIRE(e);
    CHECK(lang::print(*plug(e->context, lang::var("HOLE"))) == "let x = HOLE in x");
    CHECK(lang::print(*e->redex) == "0 =:= 1");

    const auto f = decompose(lang::pair(lang::latent(0), lang::add(lang::constant(1), lang::normal())));
    REQUIRE(f);
    CHECK(f->context.size() == 2);
    CHECK(lang::print(*plug(f->context, lang::var("HOLE"))) == "(z1, 1 + HOLE)");
}

TEST_CASE("decompose: agrees with the reference on random programs") {
    testing::Rng rng(21);
    testing::ProgramGen gen(rng);
    for (int i = 0; i < 200; i++) {
        TermPtr t = gen.program(rng.index(1, 3));
        Configuration c = Configuration::running(t, GaussState::empty());
        // Walk the whole reduction, checking every intermediate term.
        while (!c.is_bot()) {
            const auto d = decompose(c.term());
            const auto o = oracle_decompose(c.term());
            REQUIRE(d.has_value() == o.has_value());
            if (!d) {
                break;
            }
            CHECK(lang::equal(*plug(d->context, lang::var("HOLE")), *o->first));
            CHECK(d->redex == o->second);
            CHECK(lang::equal(*plug(d->context, d->redex), *c.term()));
            c = step(c);
        }
    }
}

TEST_CASE("step: the four rules") {
    const GaussState psi(Vector{1.0}, linalg::Matrix{{2.0}});
    const Configuration a = step(Configuration::running(lang::normal(), psi));
    CHECK(show(a) == "z2");
    CHECK(exactcond::gauss::approx_equal(a.prior(), GaussState(Vector{1, 0}, linalg::Matrix{{2, 0}, {0, 1}}), 0));

    const Configuration b =
        step(Configuration::running(lang::cond(lang::latent(0), lang::latent(1)), GaussState::standard(2)));
    CHECK(show(b) == "()");
    CHECK(exactcond::gauss::approx_equal(b.prior(), GaussState(Vector{0, 0}, linalg::Matrix{{.5, .5}, {.5, .5}}),
                                         kTol));

    const Configuration c = step(Configuration::running(lang::parse("0.0 =:= 1.0"), GaussState::empty()));
    CHECK(c.is_bot());
    CHECK_THROWS_AS(c.term(), ContractError);

    const Configuration d = step(Configuration::running(lang::parse("0 =:= 0"), GaussState::empty()));
    CHECK(show(d) == "()");

    const Configuration e = step(Configuration::running(lang::parse("let (x, y) = (1, 2) in (y, x)"), psi));
    CHECK(show(e) == "(2, 1)");
    const Configuration f = step(Configuration::running(lang::parse("let x = 1 in (x, let x = 2 in x)"), psi));
    CHECK(show(f) == "(1, let x = 2 in x)");

    CHECK_THROWS_AS(step(Configuration::running(lang::latent(0), psi)), ContractError);
    CHECK_THROWS_AS(step(Configuration::bot()), ContractError);
}

TEST_CASE("step: conditions on degenerate priors") {
    // z1 = z2 already holds with probability one: conditioning again is a no-op.
    const GaussState tied(Vector{0, 0}, linalg::Matrix{{1, 1}, {1, 1}});
    const Configuration a = step(Configuration::running(lang::cond(lang::latent(0), lang::latent(1)), tied));
    REQUIRE_FALSE(a.is_bot());
    CHECK(exactcond::gauss::approx_equal(a.prior(), tied, kTol));
    // ... while z1 = z2 + 1 is impossible.
    const Configuration b = step(Configuration::running(
        lang::cond(lang::latent(0), lang::add(lang::latent(1), lang::constant(1))), tied));
    CHECK(b.is_bot());
}

TEST_CASE("run: conditions contradicted up to rounding fail") {
    CHECK(run_source("let x = normal() in let y = normal() in let z = normal() in "
                     "x + 0.1*z =:= 3*y; 0.3*x + 0.03*z - 0.9*y =:= 1e-3; x")
              .final.is_bot());
    CHECK(run_source("let (a, b) = normal((0, 0), [[2, 1.4142135623730951], [1.4142135623730951, 1]]) in "
                     "a - 1.4142135623730951*b =:= 1; a")
              .final.is_bot());
    CHECK_FALSE(run_source("let x = normal() in let y = normal() in let z = normal() in "
                           "x + 0.1*z =:= 3*y; 0.3*x + 0.03*z - 0.9*y =:= 0; x")
                    .final.is_bot());
}

TEST_CASE("run: reference programs") {
    const RunResult r = run_source("let (x,y) = (normal(), normal()) in x =:= y; x + y");
    REQUIRE_FALSE(r.final.is_bot());
    CHECK(show(r.final) == "z1 + z2");
    CHECK(exactcond::gauss::approx_equal(r.final.prior(),
                                         GaussState(Vector{0, 0}, linalg::Matrix{{.5, .5}, {.5, .5}}), kTol));
    const auto obs = observable(r);
    REQUIRE(obs);
    CHECK(exactcond::gauss::approx_equal(*obs, GaussState(Vector{0}, linalg::Matrix{{2}}), kTol));

    const RunResult pair_result = run_source("let (x,y) = (normal(), normal()) in x =:= y; (x, y)");
    CHECK(show(pair_result.final) == "(z1, z2)");

    const RunResult n = run_source("normal()");
    CHECK(show(n.final) == "z1");
    CHECK(exactcond::gauss::approx_equal(n.final.prior(), GaussState::standard(1), 0));

    CHECK(run_source("(0.0 =:= 1.0)").final.is_bot());
    CHECK(run_source("let x = (0 =:= 1) in normal()").final.is_bot());
    CHECK_FALSE(observable(run_source("0 =:= 1; 2")));

    const auto point = observable(run_source("(1.5, -2)"));
    REQUIRE(point);
    CHECK(point->mean() == Vector{1.5, -2});
    CHECK(point->cov() == linalg::Matrix(2, 2));

    CHECK_THROWS_AS(run(lang::typecheck(lang::parse("x"), lang::parse_context("x:R"))), ContractError);
    CHECK_THROWS_AS(run(lang::typecheck(lang::parse("1 - 2"))), ContractError);
}

TEST_CASE("run: random-walk kriging hits its observations") {
    // x_0 ~ N(0,1), x_{i+1} = x_i + N(0,1); observe x_2 = 1.5 and x_7 = -0.5.
    const std::size_t n = 10;
    const std::map<std::size_t, double> data{{2, 1.5}, {7, -0.5}};
    std::vector<TermPtr> xs;
    for (std::size_t i = 0; i < n; i++) {
        xs.push_back(lang::var("x" + std::to_string(i)));
    }
    TermPtr body = lang::tuple(xs);
    for (auto it = data.rbegin(); it != data.rend(); ++it) {
        body = lang::seq(lang::cond(xs[it->first], lang::constant(it->second)), body);
    }
    for (std::size_t i = n; i-- > 0;) {
        TermPtr bound = i == 0 ? lang::normal() : lang::add(xs[i - 1], lang::normal());
        body = lang::let("x" + std::to_string(i), bound, body);
    }
    const RunResult r = run(lang::desugar(lang::typecheck(body)));
    const auto post = observable(r);
    REQUIRE(post);
    for (const auto& [i, y] : data) {
        CHECK(post->mean()[i] == doctest::Approx(y).epsilon(1e-10));
        CHECK(std::abs(post->cov()(i, i)) < 1e-10);
    }
    // Between observations the variance is a Brownian bridge: (t - a)(b - t) / (b - a).
    for (std::size_t i = 3; i < 7; i++) {
        const double expect = double(i - 2) * double(7 - i) / 5.0;
        CHECK(post->cov()(i, i) == doctest::Approx(expect).epsilon(1e-9));
        const double mean = 1.5 + (-0.5 - 1.5) * double(i - 2) / 5.0;
        CHECK(post->mean()[i] == doctest::Approx(mean).epsilon(1e-9));
    }
}

TEST_CASE("run: trace records every configuration") {
    const RunResult r = run_source("let (x,y) = (normal(), normal()) in x =:= y; x + y", true);
    REQUIRE(r.trace.size() == r.steps + 1);
    CHECK(r.trace.front().term == "let (x, y) = (normal(), normal()) in let #s0 = x =:= y in x + y");
    CHECK(r.trace.front().prior->dim() == 0);
    CHECK(r.trace.back().term == "z1 + z2");
    CHECK(run_source("1").trace.empty());

    const RunResult b = run_source("normal(); 0 =:= 1", true);
    REQUIRE(b.final.is_bot());
    CHECK(b.trace.back().term.empty());
    CHECK_FALSE(b.trace.back().prior);
}

TEST_CASE("run: deterministic and bounded by term size") {
    testing::Rng rng(8);
    testing::ProgramGen gen(rng);
    for (int i = 0; i < 200; i++) {
        const TermPtr t = gen.program(rng.index(0, 3));
        const auto typed = lang::typecheck(t);
        const RunResult a = run(typed);
        const RunResult b = run(typed);
        CHECK(a.steps <= lang::term_size(*t));
        REQUIRE(a.final.is_bot() == b.final.is_bot());
        if (!a.final.is_bot()) {
            CHECK(lang::equal(*a.final.term(), *b.final.term()));
            CHECK(a.final.prior().mean() == b.final.prior().mean());
            CHECK(a.final.prior().cov() == b.final.prior().cov());
            CHECK(is_value(*a.final.term()));
        }
    }
}

TEST_CASE("observable: invariant under latent permutation") {
    testing::Rng rng(13);
    testing::ProgramGen gen(rng);
    int checked = 0;
    for (int i = 0; i < 100; i++) {
        const RunResult r = run(lang::typecheck(gen.program(rng.index(1, 3))));
        if (r.final.is_bot() || r.final.prior().dim() < 2) {
            continue;
        }
        const GaussState& psi = r.final.prior();
        const std::size_t k = psi.dim();
        const linalg::Indices perm = rng.permutation(k);
        // z_i becomes z_perm[i]; the prior is reindexed to match.
        linalg::Matrix p(k, k);
        for (std::size_t j = 0; j < k; j++) {
            p(perm[j], j) = 1.0;
        }
        const GaussState moved = exactcond::gauss::push(exactcond::gauss::affine(p, Vector(k)), psi);
        const Configuration c = Configuration::running(permute_latents(r.final.term(), perm), moved);
        CHECK(same_observable(observable(c), observable(r), 1e-12));
        checked++;
    }
    CHECK(checked > 20);
}

TEST_CASE("run: dataflow-respecting reorderings agree") {
    testing::Rng rng(17);
    testing::ProgramGen gen(rng);
    for (int i = 0; i < 200; i++) {
        const TermPtr t1 = gen.program(rng.index(1, 2));
        const TermPtr t2 = gen.program(rng.index(1, 2));
        const TermPtr c = gen.condition(3);
        const TermPtr v = lang::tuple({lang::var("a"), lang::var("b")});
        const TermPtr ab = lang::let("a", t1, lang::let("b", t2, lang::let("u", c, v)));
        const TermPtr ba = lang::let("u", c, lang::let("b", t2, lang::let("a", t1, v)));
        const auto x = observable(run(lang::typecheck(ab)));
        const auto y = observable(run(lang::typecheck(ba)));
        INFO(lang::print(*ab));
        CHECK(same_observable(x, y, kTol));
    }
}
