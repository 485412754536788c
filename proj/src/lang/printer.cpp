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

#include <charconv>
#include <cmath>

#include "exactcond/lang.hpp"
#include "lang/visit.hpp"

namespace exactcond::lang {

namespace {

enum Level { kExpr = 0, kCond = 1, kSum = 2, kProd = 3, kAtom = 4 };

std::string number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string matrix(const Matrix& m) {
    std::string out = "[";
    for (std::size_t i = 0; i < m.rows(); i++) {
        out += i ? ", [" : "[";
        for (std::size_t j = 0; j < m.cols(); j++) {
            out += (j ? ", " : "") + number(m(i, j));
        }
        out += "]";
    }
    return out + "]";
}

Level level_of(const Term& t) {
    return std::visit(overloaded{
                          [](const node::Let&) { return kExpr; },
                          [](const node::LetPair&) { return kExpr; },
                          [](const node::Seq&) { return kExpr; },
                          [](const node::Cond&) { return kCond; },
                          [](const node::Add&) { return kSum; },
                          [](const node::Sub&) { return kSum; },
                          [](const node::Scale&) { return kProd; },
                          [](const node::MatVec&) { return kProd; },
                          [](const node::Const& c) { return std::signbit(c.value) ? kProd : kAtom; },
                          [](const auto&) { return kAtom; },
                      },
                      t.node());
}

std::string print_at(const Term& t, Level need);

std::string print_node(const Term& t) {
    return std::visit(
        overloaded{
            [](const node::Var& x) { return x.name; },
            [](const node::Latent& x) { return "z" + std::to_string(x.index + 1); },
            [](const node::Add& x) { return print_at(*x.lhs, kSum) + " + " + print_at(*x.rhs, kProd); },
            [](const node::Sub& x) { return print_at(*x.lhs, kSum) + " - " + print_at(*x.rhs, kProd); },
            [](const node::Scale& x) { return number(x.alpha) + " * " + print_at(*x.body, kProd); },
            [](const node::Const& x) { return number(x.value); },
            [](const node::Pair& x) {
                return "(" + print_at(*x.first, kExpr) + ", " + print_at(*x.second, kExpr) + ")";
            },
            [](const node::Unit&) { return std::string("()"); },
            [](const node::Let& x) {
                return "let " + x.name + " = " + print_at(*x.bound, kExpr) + " in " + print_at(*x.body, kExpr);
            },
            [](const node::LetPair& x) {
                return "let (" + x.first + ", " + x.second + ") = " + print_at(*x.bound, kExpr) + " in " +
                       print_at(*x.body, kExpr);
            },
            [](const node::Normal&) { return std::string("normal()"); },
            [](const node::NormalWith& x) {
                const std::string cov = x.scalar_cov ? number(x.cov(0, 0)) : matrix(x.cov);
                return "normal(" + print_at(*x.mean, kExpr) + ", " + cov + ")";
            },
            [](const node::Observe& x) {
                return "observe(" + print_at(*x.dist, kExpr) + ", " + print_at(*x.target, kExpr) + ")";
            },
            [](const node::Cond& x) { return print_at(*x.lhs, kSum) + " =:= " + print_at(*x.rhs, kSum); },
            [](const node::Seq& x) { return print_at(*x.first, kCond) + "; " + print_at(*x.second, kExpr); },
            [](const node::MatVec& x) { return matrix(x.matrix) + " * " + print_at(*x.body, kProd); },
        },
        t.node());
}

std::string print_at(const Term& t, Level need) {
    std::string s = print_node(t);
    if (level_of(t) < need) {
        return "(" + s + ")";
    }
    return s;
}

}  // namespace

std::string print(const Term& t) { return print_at(t, kExpr); }

}  // namespace exactcond::lang
