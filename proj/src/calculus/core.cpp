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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "exactcond/calculus.hpp"
#include "lang/visit.hpp"

namespace exactcond::calculus {

namespace node = lang::node;
using lang::overloaded;

// ---------------------------------------------------------------------------
// Affine expressions

AffineExpr AffineExpr::variable(std::size_t level) {
    AffineExpr e;
    e.coeffs.assign(level + 1, 0.0);
    e.coeffs[level] = 1.0;
    return e;
}

AffineExpr AffineExpr::of_constant(double c) {
    AffineExpr e;
    e.constant = c;
    return e;
}

std::size_t AffineExpr::support_end() const {
    std::size_t n = coeffs.size();
    while (n > 0 && coeffs[n - 1] == 0.0) {
        n--;
    }
    return n;
}

AffineExpr operator+(const AffineExpr& a, const AffineExpr& b) {
    AffineExpr out;
    out.coeffs.assign(std::max(a.coeffs.size(), b.coeffs.size()), 0.0);
    for (std::size_t i = 0; i < out.coeffs.size(); i++) {
        out.coeffs[i] = a.coeff(i) + b.coeff(i);
    }
    out.constant = a.constant + b.constant;
    return out;
}

AffineExpr operator*(double alpha, const AffineExpr& a) {
    AffineExpr out = a;
    for (auto& c : out.coeffs) {
        c *= alpha;
    }
    out.constant *= alpha;
    return out;
}

AffineExpr operator-(const AffineExpr& a, const AffineExpr& b) { return a + (-1.0) * b; }

bool approx_equal(const AffineExpr& a, const AffineExpr& b, double tol) {
    const std::size_t n = std::max(a.coeffs.size(), b.coeffs.size());
    double scale = std::max(std::abs(a.constant), std::abs(b.constant));
    double diff = std::abs(a.constant - b.constant);
    for (std::size_t i = 0; i < n; i++) {
        scale = std::max({scale, std::abs(a.coeff(i)), std::abs(b.coeff(i))});
        diff = std::max(diff, std::abs(a.coeff(i) - b.coeff(i)));
    }
    return diff <= tol * (1.0 + scale);
}

// ---------------------------------------------------------------------------
// Terms

std::size_t CoreTerm::binder_count() const {
    return static_cast<std::size_t>(
        std::count_if(stmts.begin(), stmts.end(), [](const Stmt& s) { return std::holds_alternative<Nu>(s); }));
}

std::size_t CoreTerm::scope_at(std::size_t p) const {
    std::size_t n = context.size();
    for (std::size_t i = 0; i < p && i < stmts.size(); i++) {
        n += std::holds_alternative<Nu>(stmts[i]) ? 1 : 0;
    }
    return n;
}

namespace {

std::string number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

// Names by level; a binder that reuses an earlier name is suffixed with its level.
std::vector<std::string> level_names(const CoreTerm& t) {
    std::vector<std::string> names = t.context;
    std::set<std::string> used(names.begin(), names.end());
    for (const auto& s : t.stmts) {
        if (const auto* nu = std::get_if<Nu>(&s)) {
            std::string name = nu->name;
            if (name.empty() || used.count(name)) {
                name = (name.empty() ? "z" : name) + "_" + std::to_string(names.size());
            }
            used.insert(name);
            names.push_back(name);
        }
    }
    return names;
}

}  // namespace

std::string print(const AffineExpr& e, const std::vector<std::string>& names) {
    std::string out;
    auto emit = [&](double c, const std::string& atom) {
        if (out.empty()) {
            out = c < 0 ? "-" : "";
        } else {
            out += c < 0 ? " - " : " + ";
        }
        const double m = std::abs(c);
        if (atom.empty()) {
            out += number(m);
        } else {
            out += m == 1.0 ? atom : number(m) + "*" + atom;
        }
    };
    for (std::size_t i = 0; i < e.coeffs.size(); i++) {
        if (e.coeffs[i] != 0.0) {
            emit(e.coeffs[i], i < names.size() ? names[i] : "v" + std::to_string(i));
        }
    }
    if (e.constant != 0.0 || out.empty()) {
        emit(e.constant, "");
    }
    return out;
}

std::string print(const CoreTerm& t) {
    const std::vector<std::string> names = level_names(t);
    std::string out;
    std::size_t level = t.context.size();
    for (const auto& s : t.stmts) {
        if (std::holds_alternative<Nu>(s)) {
            out += "ν " + names[level++] + ". ";
        } else {
            const auto& c = std::get<CondStmt>(s);
            out += "(" + print(c.lhs, names) + " =:= " + print(c.rhs, names) + ") ";
        }
    }
    if (t.bot) {
        return out + "⊥";
    }
    out += "r[";
    for (std::size_t i = 0; i < t.result.size(); i++) {
        out += (i ? ", " : "") + print(t.result[i], names);
    }
    return out + "]";
}

// ---------------------------------------------------------------------------
// Flattening

namespace {

using Value = std::vector<AffineExpr>;

class Flattener {
  public:
    Flattener(const lang::TypedTerm& typed, CoreTerm& out) : typed_(typed), out_(out) {
        for (const auto& b : typed.context()) {
            if (b.type->kind() != lang::Type::Kind::Real) {
                throw ContractError("to_core: context variable '" + b.name + "' has type " + lang::to_string(*b.type) +
                                    "; only R is allowed");
            }
            env_.push_back({b.name, {AffineExpr::variable(out_.context.size())}});
            out_.context.push_back(b.name);
            taken_.insert(b.name);
        }
        levels_ = out_.context.size();
    }

    Value eval(const lang::Term& t) {
        return std::visit(
            overloaded{
                [&](const node::Var& x) -> Value {
                    for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
                        if (it->first == x.name) {
                            return it->second;
                        }
                    }
                    throw ContractError("to_core: unbound variable '" + x.name + "'");
                },
                [&](const node::Const& x) -> Value { return {AffineExpr::of_constant(x.value)}; },
                [&](const node::Unit&) -> Value { return {}; },
                [&](const node::Add& x) -> Value {
                    const Value l = eval(*x.lhs);
                    const Value r = eval(*x.rhs);
                    return {l[0] + r[0]};
                },
                [&](const node::Scale& x) -> Value { return {x.alpha * eval(*x.body)[0]}; },
                [&](const node::Pair& x) -> Value {
                    Value a = eval(*x.first);
                    const Value b = eval(*x.second);
                    a.insert(a.end(), b.begin(), b.end());
                    return a;
                },
                [&](const node::Let& x) -> Value {
                    env_.push_back({x.name, eval(*x.bound)});
                    Value v = eval(*x.body);
                    env_.pop_back();
                    return v;
                },
                [&](const node::LetPair& x) -> Value {
                    const Value v = eval(*x.bound);
                    const std::size_t k = typed_.type_of(*x.bound)->first()->size();
                    env_.push_back({x.first, Value(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k))});
                    env_.push_back({x.second, Value(v.begin() + static_cast<std::ptrdiff_t>(k), v.end())});
                    Value r = eval(*x.body);
                    env_.pop_back();
                    env_.pop_back();
                    return r;
                },
                [&](const node::Normal&) -> Value {
                    out_.stmts.push_back(Nu{fresh()});
                    return {AffineExpr::variable(levels_++)};
                },
                [&](const node::Cond& x) -> Value {
                    AffineExpr l = eval(*x.lhs)[0];
                    AffineExpr r = eval(*x.rhs)[0];
                    out_.stmts.push_back(CondStmt{std::move(l), std::move(r)});
                    return {};
                },
                [](const node::Latent&) -> Value { throw ContractError("to_core: latent variables are not allowed"); },
                [](const auto&) -> Value { throw ContractError("to_core: unexpected sugar"); },
            },
            t.node());
    }

  private:
    std::string fresh() {
        std::string name;
        do {
            name = "z" + std::to_string(++counter_);
        } while (taken_.count(name));
        return name;
    }

    const lang::TypedTerm& typed_;
    CoreTerm& out_;
    std::vector<std::pair<std::string, Value>> env_;
    std::set<std::string> taken_;
    std::size_t levels_ = 0;
    std::size_t counter_ = 0;
};

lang::TermPtr expr_term(const AffineExpr& e, const std::vector<std::string>& names) {
    lang::TermPtr out;
    auto push = [&](lang::TermPtr t) { out = out ? lang::add(out, t) : t; };
    for (std::size_t i = 0; i < e.coeffs.size(); i++) {
        const double c = e.coeffs[i];
        if (c == 0.0) {
            continue;
        }
        lang::TermPtr v = lang::var(names.at(i));
        push(c == 1.0 ? v : lang::scale(c, v));
    }
    if (e.constant != 0.0 || !out) {
        push(lang::constant(e.constant));
    }
    return out;
}

}  // namespace

CoreTerm to_core(const lang::TypedTerm& e) {
    const lang::TypedTerm core = lang::desugar(e);
    CoreTerm out;
    Flattener f(core, out);
    out.result = f.eval(*core.term());
    return out;
}

lang::Context core_context(const CoreTerm& t) {
    lang::Context ctx;
    for (const auto& name : t.context) {
        ctx.push_back({name, lang::Type::real()});
    }
    return ctx;
}

lang::TermPtr from_core(const CoreTerm& t) {
    const std::vector<std::string> names = level_names(t);
    lang::TermPtr tail;
    if (t.bot) {
        tail = lang::seq(lang::cond(lang::constant(0), lang::constant(1)),
                         lang::tuple(std::vector<lang::TermPtr>(t.bot_arity, lang::constant(0))));
    } else {
        std::vector<lang::TermPtr> items;
        for (const auto& e : t.result) {
            items.push_back(expr_term(e, names));
        }
        tail = lang::tuple(items);
    }
    std::size_t level = t.context.size() + t.binder_count();
    for (auto it = t.stmts.rbegin(); it != t.stmts.rend(); ++it) {
        if (std::holds_alternative<Nu>(*it)) {
            tail = lang::let(names[--level], lang::normal(), tail);
        } else {
            const auto& c = std::get<CondStmt>(*it);
            tail = lang::seq(lang::cond(expr_term(c.lhs, names), expr_term(c.rhs, names)), tail);
        }
    }
    return tail;
}

}  // namespace exactcond::calculus
