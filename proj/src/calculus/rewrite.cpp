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

#include "exactcond/calculus.hpp"

namespace exactcond::calculus {

std::string to_string(Axiom a) {
    switch (a) {
        case Axiom::Disc:
            return "DISC";
        case Axiom::Orth:
            return "ORTH";
        case Axiom::C1:
            return "C1";
        case Axiom::C2:
            return "C2";
        case Axiom::C3:
            return "C3";
        case Axiom::Taut:
            return "TAUT";
        case Axiom::Fail:
            return "FAIL";
        case Axiom::Subs:
            return "SUBS";
        case Axiom::Init:
            return "INIT";
        case Axiom::Cong:
            return "CONG";
    }
    return "?";
}

namespace {

constexpr double kMatchTolerance = 1e-12;

[[noreturn]] void mismatch(Axiom a, std::size_t p, const std::string& what) {
    throw ContractError(to_string(a) + " at statement " + std::to_string(p) + ": " + what);
}

double magnitude(const AffineExpr& e) {
    double m = std::abs(e.constant);
    for (double c : e.coeffs) {
        m = std::max(m, std::abs(c));
    }
    return m;
}

bool negligible(double c, const AffineExpr& e) { return std::abs(c) <= kMatchTolerance * (1.0 + magnitude(e)); }

// Every expression after statement p, in order: lhs/rhs of later conditions, then the result.
void for_each_after(CoreTerm& t, std::size_t p, const std::function<void(AffineExpr&)>& f) {
    for (std::size_t i = p + 1; i < t.stmts.size(); i++) {
        if (auto* c = std::get_if<CondStmt>(&t.stmts[i])) {
            f(c->lhs);
            f(c->rhs);
        }
    }
    for (auto& e : t.result) {
        f(e);
    }
}

bool mentions(const AffineExpr& e, std::size_t level) { return !negligible(e.coeff(level), e); }

void drop_level(AffineExpr& e, std::size_t level) {
    if (level < e.coeffs.size()) {
        e.coeffs.erase(e.coeffs.begin() + static_cast<std::ptrdiff_t>(level));
    }
}

const CondStmt& need_cond(const CoreTerm& t, std::size_t p, Axiom a) {
    if (p >= t.stmts.size() || !std::holds_alternative<CondStmt>(t.stmts[p])) {
        mismatch(a, p, "expected a condition");
    }
    return std::get<CondStmt>(t.stmts[p]);
}

void need_nu(const CoreTerm& t, std::size_t p, Axiom a) {
    if (p >= t.stmts.size() || !std::holds_alternative<Nu>(t.stmts[p])) {
        mismatch(a, p, "expected a nu-binder");
    }
}

}  // namespace

CoreTerm rewrite_step(const CoreTerm& t, const Rule& rule, std::size_t p) {
    CoreTerm out = t;
    const Axiom ax = rule.axiom;
    switch (ax) {
        case Axiom::Disc: {
            need_nu(t, p, ax);
            const std::size_t level = t.scope_at(p);
            bool used = false;
            for_each_after(out, p, [&](AffineExpr& e) { used = used || mentions(e, level); });
            if (used) {
                mismatch(ax, p, "the bound variable is used");
            }
            for_each_after(out, p, [&](AffineExpr& e) { drop_level(e, level); });
            out.stmts.erase(out.stmts.begin() + static_cast<std::ptrdiff_t>(p));
            return out;
        }
        case Axiom::Orth: {
            const std::size_t n = rule.u.rows();
            if (n == 0 || rule.u.cols() != n) {
                mismatch(ax, p, "U must be square and non-empty");
            }
            if (!linalg::approx_equal(linalg::transpose(rule.u) * rule.u, Matrix::identity(n), 1e-10)) {
                mismatch(ax, p, "U is not orthogonal");
            }
            for (std::size_t i = 0; i < n; i++) {
                need_nu(t, p + i, ax);
            }
            const std::size_t base = t.scope_at(p);
            for_each_after(out, p + n - 1, [&](AffineExpr& e) {
                Vector c(n);
                for (std::size_t i = 0; i < n; i++) {
                    c[i] = e.coeff(base + i);
                }
                const Vector moved = linalg::transpose(rule.u) * c;
                if (e.coeffs.size() < base + n) {
                    e.coeffs.resize(base + n, 0.0);
                }
                for (std::size_t i = 0; i < n; i++) {
                    e.coeffs[base + i] = moved[i];
                }
            });
            return out;
        }
        case Axiom::C1: {
            need_cond(t, p, ax);
            need_cond(t, p + 1, ax);
            std::swap(out.stmts[p], out.stmts[p + 1]);
            return out;
        }
        case Axiom::C2: {
            if (p + 1 >= t.stmts.size()) {
                mismatch(ax, p, "expected two statements");
            }
            const bool cond_first = std::holds_alternative<CondStmt>(t.stmts[p]);
            if (cond_first) {
                need_nu(t, p + 1, ax);
            } else {
                need_nu(t, p, ax);
                need_cond(t, p + 1, ax);
                CondStmt& c = std::get<CondStmt>(out.stmts[p + 1]);
                const std::size_t level = t.scope_at(p);
                if (mentions(c.lhs, level) || mentions(c.rhs, level)) {
                    mismatch(ax, p, "the condition mentions the bound variable");
                }
                c.lhs.coeffs.resize(std::min(c.lhs.coeffs.size(), level));
                c.rhs.coeffs.resize(std::min(c.rhs.coeffs.size(), level));
            }
            std::swap(out.stmts[p], out.stmts[p + 1]);
            return out;
        }
        case Axiom::C3: {
            need_cond(t, p, ax);
            if (!t.bot || p + 1 != t.stmts.size()) {
                mismatch(ax, p, "the condition is not followed by bot");
            }
            out.stmts.pop_back();
            return out;
        }
        case Axiom::Taut: {
            const CondStmt& c = need_cond(t, p, ax);
            if (!approx_equal(c.lhs, c.rhs, kMatchTolerance)) {
                mismatch(ax, p, "the two sides differ");
            }
            out.stmts.erase(out.stmts.begin() + static_cast<std::ptrdiff_t>(p));
            return out;
        }
        case Axiom::Fail: {
            const CondStmt& c = need_cond(t, p, ax);
            if (!c.lhs.is_constant() || !c.rhs.is_constant()) {
                mismatch(ax, p, "the condition is not between constants");
            }
            if (c.lhs.constant == c.rhs.constant) {
                mismatch(ax, p, "the constants are equal");
            }
            out.stmts.resize(p);
            out.bot_arity = t.arity();
            out.bot = true;
            out.result.clear();
            return out;
        }
        case Axiom::Subs: {
            const CondStmt c = need_cond(t, p, ax);
            const AffineExpr delta = rule.scale * (c.rhs - c.lhs);
            std::size_t index = 0;
            bool hit = false;
            for_each_after(out, p, [&](AffineExpr& e) {
                if (index++ == rule.target) {
                    e = e + delta;
                    hit = true;
                }
            });
            if (!hit) {
                mismatch(ax, p, "no expression with index " + std::to_string(rule.target) + " after the condition");
            }
            return out;
        }
        case Axiom::Init: {
            need_nu(t, p, ax);
            const CondStmt& c = need_cond(t, p + 1, ax);
            const std::size_t level = t.scope_at(p);
            const AffineExpr d = c.lhs - c.rhs;
            const double alpha = d.coeff(level);
            if (negligible(alpha, d)) {
                mismatch(ax, p, "the condition does not involve the bound variable");
            }
            for (std::size_t i = 0; i < d.coeffs.size(); i++) {
                if (i != level && !negligible(d.coeffs[i], d)) {
                    mismatch(ax, p, "the condition involves other variables");
                }
            }
            const double value = -d.constant / alpha;
            for_each_after(out, p + 1, [&](AffineExpr& e) {
                const double k = e.coeff(level);
                if (level < e.coeffs.size()) {
                    e.coeffs[level] = 0.0;
                }
                e.constant += k * value;
                drop_level(e, level);
            });
            out.stmts.erase(out.stmts.begin() + static_cast<std::ptrdiff_t>(p),
                            out.stmts.begin() + static_cast<std::ptrdiff_t>(p + 2));
            return out;
        }
        case Axiom::Cong: {
            need_cond(t, p, ax);
            if (rule.scale == 0.0 || !std::isfinite(rule.scale)) {
                mismatch(ax, p, "the scaling must be a nonzero number");
            }
            if (rule.shift.support_end() > t.scope_at(p)) {
                mismatch(ax, p, "the shift uses variables out of scope");
            }
            CondStmt& c = std::get<CondStmt>(out.stmts[p]);
            c.lhs = rule.scale * c.lhs + rule.shift;
            c.rhs = rule.scale * c.rhs + rule.shift;
            return out;
        }
    }
    throw ContractError("rewrite_step: unknown axiom");
}

}  // namespace exactcond::calculus
