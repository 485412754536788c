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

#include "doctest.h"
#include "exactcond/calculus.hpp"
#include "exactcond/opsem.hpp"
#include "support/core_terms.hpp"
#include "support/programs.hpp"

using exactcond::ContractError;
using namespace exactcond::calculus;
using exactcond::linalg::Matrix;
using exactcond::linalg::Vector;
namespace cond = exactcond::cond;
namespace gauss = exactcond::gauss;
namespace lang = exactcond::lang;
namespace linalg = exactcond::linalg;

namespace {

constexpr double kTol = 1e-8;

CoreTerm core(std::string_view src, std::string_view ctx = "") {
    return to_core(lang::typecheck(lang::parse(src), lang::parse_context(ctx)));
}

cond::CondMorphism den(std::string_view src, std::string_view ctx = "") {
    return exactcond::denot::denote(lang::typecheck(lang::parse(src), lang::parse_context(ctx)));
}

Rule rule(Axiom a) {
    Rule r;
    r.axiom = a;
    return r;
}

using testing::effect_term;

bool same_nf(const cond::EffectNormalForm& x, const cond::EffectNormalForm& y) { return cond::equal(x, y, kTol); }

}  // namespace

TEST_CASE("to_core: reference programs") {
    CHECK(print(core("let x = normal() in x + 3 =:= 4; x + 3")) == "ν z1. (z1 + 3 =:= 4) r[z1 + 3]");
    CHECK(print(core("()")) == "r[]");
    CHECK(print(core("let (x,y) = (normal(), normal()) in x =:= y; x + y")) == "ν z1. ν z2. (z1 =:= z2) r[z1 + z2]");
    CHECK(print(core("(2 * x - y, 1)", "x:R, y:R")) == "r[2*x - y, 1]");
    CHECK(print(core("normal(1, 4)")) == "ν z1. r[2*z1 + 1]");
    CHECK(print(core("let z1 = normal() in z1", "z1:R")) == "ν z2. r[z2]");
    CHECK(core("((1, 2), 3)").arity() == 3);
    CHECK_THROWS_AS(core("p", "p:R*R"), ContractError);
}

TEST_CASE("to_core and from_core preserve the denotation") {
    testing::Rng rng(31);
    testing::ProgramGen gen(rng);
    for (int i = 0; i < 150; i++) {
        const bool open = rng.coin();
        const lang::Context ctx = open ? lang::parse_context("a:R, b:R") : lang::Context{};
        const lang::TermPtr t = open ? gen.open_program(rng.index(0, 3), {"a", "b"}) : gen.program(rng.index(0, 3));
        const lang::TypedTerm typed = lang::typecheck(t, ctx);
        const CoreTerm c = to_core(typed);
        INFO(lang::print(*t));
        INFO(print(c));
        CHECK(cond::equiv(exactcond::denot::denote(typed), testing::denote_core(c)));
    }
}

TEST_CASE("print: bot and names") {
    CoreTerm t;
    t.context = {"x"};
    t.stmts = {Nu{"x"}, CondStmt{AffineExpr::variable(1), AffineExpr::of_constant(-2.5)}};
    t.bot = true;
    CHECK(print(t) == "ν x_1. (x_1 =:= -2.5) ⊥");
    t.bot_arity = 2;
    CHECK(lang::print(*from_core(t)) == "let x_1 = normal() in x_1 =:= -2.5; 0 =:= 1; (0, 0)");
}

TEST_CASE("rewrite_step: reference instances") {
    // DISC: nu x. r[] -> r[]
    const CoreTerm disc = rewrite_step(core("let x = normal() in ()"), rule(Axiom::Disc), 0);
    CHECK(print(disc) == "r[]");

    // INIT: nu x. (x =:= c) r[x] -> r[c]
    const CoreTerm init = rewrite_step(core("let x = normal() in x =:= 1.5; x"), rule(Axiom::Init), 0);
    CHECK(print(init) == "r[1.5]");

    // ORTH with U = [[s, s], [-s, s]] on nu x. nu y. r[x + y] gives r[sqrt(2) y].
    const double s = 1.0 / std::sqrt(2.0);
    Rule orth = rule(Axiom::Orth);
    orth.u = Matrix{{s, s}, {-s, s}};
    const CoreTerm o = rewrite_step(core("normal() + normal()"), orth, 0);
    REQUIRE(o.result.size() == 1);
    CHECK(std::abs(o.result[0].coeff(0)) < 1e-15);
    CHECK(o.result[0].coeff(1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    const CoreTerm o2 = rewrite_step(o, rule(Axiom::Disc), 0);
    CHECK(print(o2).rfind("ν z2. r[1.414", 0) == 0);

    CHECK(print(rewrite_step(core("1 =:= 1; 2"), rule(Axiom::Taut), 0)) == "r[2]");
    CHECK(print(rewrite_step(core("0 =:= 1; 2"), rule(Axiom::Fail), 0)) == "⊥");
    CHECK(rewrite_step(core("0 =:= 1; (2, 3)"), rule(Axiom::Fail), 0).arity() == 2);
    CHECK(print(rewrite_step(core("x =:= 1; y =:= 2; ()", "x:R, y:R"), rule(Axiom::C1), 0)) ==
          "(y =:= 2) (x =:= 1) r[]");
    CHECK(print(rewrite_step(core("x =:= 1; normal()", "x:R"), rule(Axiom::C2), 0)) == "ν z1. (x =:= 1) r[z1]");

    // SUBS: (a =:= b) r[a] -> (a =:= b) r[b]
    Rule subs = rule(Axiom::Subs);
    subs.target = 0;
    CHECK(print(rewrite_step(core("x =:= y; x", "x:R, y:R"), subs, 0)) == "(x =:= y) r[y]");

    Rule cong = rule(Axiom::Cong);
    cong.scale = 2.0;
    cong.shift = AffineExpr::of_constant(1.0);
    CHECK(print(rewrite_step(core("x =:= 3; ()", "x:R"), cong, 0)) == "(2*x + 1 =:= 7) r[]");

    CoreTerm failing = rewrite_step(core("0 =:= 1; ()"), rule(Axiom::Fail), 0);
    failing.stmts.push_back(CondStmt{AffineExpr::of_constant(1), AffineExpr::of_constant(2)});
    CHECK(print(rewrite_step(failing, rule(Axiom::C3), 0)) == "⊥");
}

TEST_CASE("rewrite_step: inapplicable axioms are rejected") {
    const CoreTerm t = core("let x = normal() in x =:= y; (x, y)", "y:R");
    CHECK_THROWS_WITH_AS(rewrite_step(t, rule(Axiom::Disc), 0), doctest::Contains("DISC"), ContractError);
    CHECK_THROWS_AS(rewrite_step(t, rule(Axiom::Disc), 1), ContractError);
    CHECK_THROWS_AS(rewrite_step(t, rule(Axiom::C1), 0), ContractError);
    CHECK_THROWS_AS(rewrite_step(t, rule(Axiom::C2), 0), ContractError);  // condition mentions x
    CHECK_THROWS_AS(rewrite_step(t, rule(Axiom::C3), 1), ContractError);
    CHECK_THROWS_AS(rewrite_step(t, rule(Axiom::Taut), 1), ContractError);
    CHECK_THROWS_AS(rewrite_step(t, rule(Axiom::Fail), 1), ContractError);
    CHECK_THROWS_WITH_AS(rewrite_step(t, rule(Axiom::Init), 0), doctest::Contains("other variables"), ContractError);
    CHECK_THROWS_AS(rewrite_step(core("1 =:= 1; ()"), rule(Axiom::Fail), 0), ContractError);
    Rule orth = rule(Axiom::Orth);
    orth.u = Matrix{{1, 1}, {0, 1}};
    CHECK_THROWS_WITH_AS(rewrite_step(core("(normal(), normal())"), orth, 0), doctest::Contains("orthogonal"),
                         ContractError);
    orth.u = Matrix::identity(3);
    CHECK_THROWS_AS(rewrite_step(core("(normal(), normal())"), orth, 0), ContractError);
    Rule subs = rule(Axiom::Subs);
    subs.target = 5;
    CHECK_THROWS_AS(rewrite_step(t, subs, 1), ContractError);
    Rule cong = rule(Axiom::Cong);
    cong.scale = 0.0;
    CHECK_THROWS_AS(rewrite_step(t, cong, 1), ContractError);
    cong.scale = 1.0;
    cong.shift = AffineExpr::variable(4);
    CHECK_THROWS_AS(rewrite_step(t, cong, 1), ContractError);
}

TEST_CASE("rewrite_step: every axiom preserves the denotation") {
    testing::Rng rng(41);
    testing::CoreGen gen(rng);
    const Axiom all[] = {Axiom::Disc, Axiom::Orth, Axiom::C1,   Axiom::C2,   Axiom::C3,
                         Axiom::Taut, Axiom::Fail, Axiom::Subs, Axiom::Init, Axiom::Cong};
    for (Axiom ax : all) {
        for (int i = 0; i < 60; i++) {
            const auto [lhs, applied] = gen.instance(ax);
            const CoreTerm rhs = rewrite_step(lhs, applied.first, applied.second);
            INFO(to_string(ax));
            INFO(print(lhs));
            INFO(print(rhs));
            CHECK(cond::equiv(testing::denote_core(lhs), testing::denote_core(rhs)));
        }
    }
}

TEST_CASE("normalize_closed: reference terms") {
    const ClosedNormalForm a = normalize_closed(core("normal() + normal()"));
    REQUIRE_FALSE(a.bot);
    CHECK(linalg::approx_equal(linalg::gram(a.a), Matrix{{2}}, 1e-12));

    const ClosedNormalForm b = normalize_closed(core("let (x,y) = (normal(), normal()) in x =:= y; (x, y)"));
    REQUIRE_FALSE(b.bot);
    CHECK(linalg::approx_equal(linalg::gram(b.a), Matrix{{.5, .5}, {.5, .5}}, 1e-12));
    CHECK(b.a.cols() == 1);
    CHECK(linalg::approx_equal(b.c, Vector{0, 0}, 1e-12));

    CHECK(normalize_closed(core("0 =:= 1; ()")).bot);
    CHECK_FALSE(normalize_closed(core("0 =:= 1; ()")).state());

    const ClosedNormalForm c = normalize_closed(core("let x = normal() in x + 3 =:= 4; x + 3"));
    REQUIRE_FALSE(c.bot);
    CHECK(c.a.cols() == 0);
    CHECK(c.c[0] == doctest::Approx(4.0).epsilon(1e-12));

    CHECK(print(as_core(normalize_closed(core("2 * normal() + 1")))) == "ν z1. r[2*z1 + 1]");
    CHECK_THROWS_AS(normalize_closed(core("x", "x:R")), ContractError);
}

TEST_CASE("normalize_closed agrees with the interpreter") {
    testing::Rng rng(51);
    testing::ProgramGen gen(rng);
    int bots = 0;
    for (int i = 0; i < 200; i++) {
        const lang::TypedTerm t = lang::typecheck(gen.program(rng.index(0, 3)));
        const auto nf = normalize_closed(to_core(t)).state();
        const auto obs = exactcond::opsem::observable(exactcond::opsem::run(t));
        INFO(lang::print(*t.term()));
        REQUIRE(nf.has_value() == obs.has_value());
        bots += nf ? 0 : 1;
        if (nf) {
            CHECK(gauss::approx_equal(*nf, *obs, kTol));
        }
    }
    CHECK(bots > 0);
}

TEST_CASE("normalize_effect: reference effects") {
    const auto a = normalize_effect(core("x =:= normal()", "x:R"));
    REQUIRE_FALSE(a.is_bot());
    CHECK(a.a == Matrix{{1}});
    CHECK(linalg::approx_equal(a.c, Vector{0}, 1e-12));
    CHECK(linalg::approx_equal(a.s, Matrix{{1}}, 1e-12));

    const auto b = normalize_effect(core("2 * x =:= 6", "x:R"));
    REQUIRE_FALSE(b.is_bot());
    CHECK(linalg::approx_equal(b.a, Matrix{{1}}, 1e-12));
    CHECK(linalg::approx_equal(b.c, Vector{3}, 1e-12));
    CHECK(linalg::approx_equal(b.s, Matrix{{0}}, 1e-12));

    const auto c1 = normalize_effect(core("x =:= y; x + y =:= normal()", "x:R, y:R"));
    const auto c2 = normalize_effect(core("x + y =:= normal(); x =:= y", "x:R, y:R"));
    CHECK(same_nf(c1, c2));
    CHECK(same_nf(c1, cond::effect_normal_form(den("x =:= y; x + y =:= normal()", "x:R, y:R"))));
    CHECK(same_nf(c2, cond::effect_normal_form(den("x + y =:= normal(); x =:= y", "x:R, y:R"))));

    CHECK(normalize_effect(core("x =:= 1; x =:= 2", "x:R")).is_bot());
    CHECK(normalize_effect(core("0 =:= 1", "x:R")).is_bot());
    const auto empty = normalize_effect(core("0 =:= normal()", "x:R"));
    REQUIRE_FALSE(empty.is_bot());
    CHECK(empty.a.rows() == 0);
    CHECK_THROWS_AS(normalize_effect(core("x", "x:R")), ContractError);
}

TEST_CASE("normalize_effect matches the semantic normal form") {
    testing::Rng rng(61);
    testing::CoreGen gen(rng);
    for (int i = 0; i < 200; i++) {
        const CoreTerm t = gen.term(rng.index(0, 3), rng.index(1, 7), 0, 0.5);
        INFO(print(t));
        CHECK(same_nf(normalize_effect(t), cond::effect_normal_form(testing::denote_core(t))));
    }
}

TEST_CASE("normalize_effect is invariant under re-presentation") {
    testing::Rng rng(71);
    for (int i = 0; i < 100; i++) {
        const std::size_t n = rng.index(1, 4);
        const std::size_t m = rng.index(1, 4);
        const std::size_t k = rng.index(0, 3);
        // Rank-deficient A half of the time.
        Matrix a = rng.matrix(m, n);
        if (m > 1 && rng.coin()) {
            for (std::size_t j = 0; j < n; j++) {
                a(m - 1, j) = 2 * a(0, j);
            }
        }
        Matrix b = rng.matrix(m, k);
        Vector c = rng.vector(m);
        const auto base = normalize_effect(effect_term(a, b, c));

        const linalg::Indices perm = rng.permutation(m);
        const auto permuted = normalize_effect(effect_term(linalg::select_rows(a, perm), linalg::select_rows(b, perm),
                                                           linalg::select(c, perm)));
        const Matrix s = rng.invertible(m);
        const auto recombined = normalize_effect(effect_term(s * a, s * b, s * c));
        const auto rotated = normalize_effect(effect_term(a, k ? b * rng.orthogonal(k) : b, c));
        CHECK(same_nf(base, permuted));
        CHECK(same_nf(base, recombined));
        CHECK(same_nf(base, rotated));
    }
}
