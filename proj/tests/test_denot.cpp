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

#include "doctest.h"
#include "exactcond/denot.hpp"
#include "exactcond/opsem.hpp"
#include "support/programs.hpp"

using exactcond::ContractError;
using exactcond::cond::CondMorphism;
using exactcond::gauss::GaussState;
using exactcond::linalg::Matrix;
using exactcond::linalg::Vector;
using namespace exactcond::denot;
namespace cond = exactcond::cond;
namespace gauss = exactcond::gauss;
namespace lang = exactcond::lang;
namespace node = exactcond::lang::node;
using lang::TermPtr;

namespace {

CondMorphism den(std::string_view src, std::string_view ctx = "") {
    return denote(lang::typecheck(lang::parse(src), lang::parse_context(ctx)));
}

CondMorphism den(const TermPtr& t, const lang::Context& ctx = {}) { return denote(lang::typecheck(t, ctx)); }

// Replaces the leaf (Normal or Const) with preorder index `target` by `with`.
TermPtr replace_leaf(const TermPtr& t, std::size_t& target, const TermPtr& with) {
    if (t->is<node::Normal>() || t->is<node::Const>()) {
        return target-- == 0 ? with : t;
    }
    if (const auto* x = t->as<node::Add>()) {
        TermPtr l = replace_leaf(x->lhs, target, with);
        return lang::add(l, replace_leaf(x->rhs, target, with));
    }
    if (const auto* x = t->as<node::Scale>()) return lang::scale(x->alpha, replace_leaf(x->body, target, with));
    if (const auto* x = t->as<node::Pair>()) {
        TermPtr a = replace_leaf(x->first, target, with);
        return lang::pair(a, replace_leaf(x->second, target, with));
    }
    if (const auto* x = t->as<node::Cond>()) {
        TermPtr a = replace_leaf(x->lhs, target, with);
        return lang::cond(a, replace_leaf(x->rhs, target, with));
    }
    if (const auto* x = t->as<node::Let>()) {
        TermPtr a = replace_leaf(x->bound, target, with);
        return lang::let(x->name, a, replace_leaf(x->body, target, with));
    }
    if (const auto* x = t->as<node::LetPair>()) {
        TermPtr a = replace_leaf(x->bound, target, with);
        return lang::let_pair(x->first, x->second, a, replace_leaf(x->body, target, with));
    }
    return t;
}

std::size_t count_leaves(const TermPtr& t) {
    std::size_t big = 1'000'000;
    const std::size_t before = big;
    replace_leaf(t, big, t);
    return before - big;
}

// Random affine value over the given variables.
TermPtr affine_value(testing::Rng& rng, const std::vector<std::string>& vars) {
    TermPtr out = lang::constant(std::round(rng.uniform(-3, 3)));
    for (const auto& v : vars) {
        if (rng.coin(0.7)) {
            out = lang::add(lang::scale(std::round(rng.uniform(-3, 3) * 2) / 2 + 0.25, lang::var(v)), out);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("denote: reference programs") {
    CHECK(cond::equiv(den("normal()"), cond::embed(GaussState::standard(1).as_map())));

    const auto s = cond::state_normalize(den("let (x,y) = (normal(), normal()) in x =:= y; x + y"));
    REQUIRE(s);
    CHECK(gauss::approx_equal(*s, GaussState(Vector{0}, Matrix{{2}}), 1e-8));

    const auto pair = cond::state_normalize(den("let (x,y) = (normal(), normal()) in x =:= y; (x, y)"));
    REQUIRE(pair);
    CHECK(gauss::approx_equal(*pair, GaussState(Vector{0, 0}, Matrix{{.5, .5}, {.5, .5}}), 1e-8));

    // Enforcing conditions: once x = 0 is imposed, x may be replaced by 0.
    CHECK(cond::equiv(den("x =:= 0; x", "x:R"), den("x =:= 0; 0", "x:R")));
    CHECK_FALSE(cond::equiv(den("x", "x:R"), den("0", "x:R")));
    CHECK_FALSE(cond::equiv(den("x =:= 0; x", "x:R"), den("0", "x:R")));

    CHECK_FALSE(cond::state_normalize(den("0 =:= 1")));
    CHECK(cond::equiv(den("0 =:= 1; normal()"), den("0 =:= 1; 5")));
}

TEST_CASE("denote: context layout") {
    const CondMorphism m = den("(x, p)", "u:unit, p:R*R, x:R");
    CHECK(m.dom() == 3);
    CHECK(m.cod() == 3);
    CHECK(m.k() == 0);
    CHECK(m.f().a() == Matrix{{0, 0, 1}, {1, 0, 0}, {0, 1, 0}});

    CHECK(cond::equiv(den("let (p, q) = ((1, 2), 3) in (q, p)"), den("(3, (1, 2))")));
    CHECK(cond::equiv(den("let x = y in let y = 2 in (x, y)", "y:R"), den("(y, 2)", "y:R")));
    CHECK(cond::equiv(den("let (a, b) = (b, a) in a - b", "a:R, b:R"), den("b - a", "a:R, b:R")));
    CHECK(flat_size(lang::parse_context("u:unit, p:R*R, x:R")) == 3);
    CHECK_THROWS_AS(denote(lang::typecheck(lang::latent(0))), ContractError);
}

TEST_CASE("denote: sugar is desugared") {
    CHECK(cond::equiv(den("normal(1, 4)"), den("1 + 2 * normal()")));
    CHECK(cond::equiv(den("observe(normal(), x)", "x:R"), den("let y = normal() in x =:= y", "x:R")));
    CHECK(cond::equiv(den("normal((0, 0), [[1, 1], [1, 1]])"), den("let z = normal() in (z, z)")));
    CHECK(cond::equiv(den("[[1, 2], [0, 1]] * v", "v:R*R"), den("let (a, b) = v in (a + 2 * b, b)", "v:R*R")));
}

TEST_CASE("check_agreement: reference programs") {
    CHECK(check_agreement(lang::compile("let (x,y) = (normal(), normal()) in x =:= y; x + y")));
    const Agreement bot = compare_semantics(lang::compile("(0 =:= 1)"));
    CHECK(bot.agree);
    CHECK_FALSE(bot.denotational);
    CHECK_FALSE(bot.operational);
    CHECK(check_agreement(lang::compile("let x = normal() in x + 3 =:= 4; x + 3")));
    CHECK(check_agreement(lang::compile("()")));
    CHECK_THROWS_AS(compare_semantics(lang::compile("x", lang::parse_context("x:R"))), ContractError);
}

TEST_CASE("check_agreement: random programs") {
    testing::Rng rng(101);
    testing::ProgramOptions opts;
    opts.depth = 5;
    testing::ProgramGen gen(rng, opts);
    int bots = 0;
    for (int i = 0; i < 400; i++) {
        const TermPtr t = gen.program(rng.index(0, 4));
        const Agreement a = compare_semantics(lang::typecheck(t));
        INFO(lang::print(*t));
        CHECK(a.agree);
        bots += a.operational ? 0 : 1;
    }
    CHECK(bots > 10);
    CHECK(bots < 300);
}

TEST_CASE("compositionality over one-hole contexts") {
    testing::Rng rng(102);
    testing::ProgramGen gen(rng);
    for (int i = 0; i < 150; i++) {
        const TermPtr k = gen.program(rng.index(1, 2));
        const std::size_t leaves = count_leaves(k);
        if (leaves == 0) {
            continue;
        }
        const TermPtr e = gen.program(1);
        std::size_t at = rng.index(0, leaves - 1);
        std::size_t at2 = at;
        const TermPtr plugged = replace_leaf(k, at, e);
        const TermPtr hole = replace_leaf(k, at2, lang::var("hole"));
        const CondMorphism outer = den(hole, lang::parse_context("hole:R"));
        INFO(lang::print(*plugged));
        CHECK(cond::equiv(den(plugged), cond::obs_compose(outer, den(e))));
    }
}

TEST_CASE("let commutes with independent lets") {
    testing::Rng rng(103);
    testing::ProgramGen gen(rng);
    const lang::Context ctx = lang::parse_context("a:R, b:R");
    for (int i = 0; i < 150; i++) {
        const TermPtr t = gen.open_program(1, {"a", "b"});
        const TermPtr u = gen.open_program(1, {"a", "b"});
        const TermPtr v = gen.open_program(rng.index(0, 2), {"a", "b", "x", "y"});
        const TermPtr xy = lang::let("x", t, lang::let("y", u, v));
        const TermPtr yx = lang::let("y", u, lang::let("x", t, v));
        INFO(lang::print(*xy));
        CHECK(cond::equiv(den(xy, ctx), den(yx, ctx)));
    }
}

TEST_CASE("substitutivity under a condition") {
    testing::Rng rng(104);
    testing::ProgramGen gen(rng);
    const std::vector<std::string> vars{"a", "b", "c"};
    const lang::Context ctx = lang::parse_context("a:R, b:R, c:R");
    for (int i = 0; i < 150; i++) {
        const TermPtr t = affine_value(rng, vars);
        const TermPtr u = affine_value(rng, vars);
        const TermPtr v = gen.open_program(rng.index(1, 2), {"a", "b", "c", "x"});
        const TermPtr c = lang::cond(t, u);
        const TermPtr with_t = lang::let("#", c, exactcond::opsem::substitute(v, "x", t));
        const TermPtr with_u = lang::let("#", c, exactcond::opsem::substitute(v, "x", u));
        INFO(lang::print(*with_t));
        CHECK(cond::equiv(den(with_t, ctx), den(with_u, ctx)));
        // Without the condition the two differ unless t and u coincide.
        if (!lang::equal(*t, *u) && rng.coin(0.2)) {
            const TermPtr bare_t = lang::tuple({t, lang::normal()});
            const TermPtr bare_u = lang::tuple({u, lang::normal()});
            CHECK_FALSE(cond::equiv(den(bare_t, ctx), den(bare_u, ctx)));
        }
    }
}
