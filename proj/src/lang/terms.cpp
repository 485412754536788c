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

#include "exactcond/lang.hpp"
#include "lang/visit.hpp"

namespace exactcond::lang {

std::string to_string(SourceLoc loc) { return std::to_string(loc.line) + ":" + std::to_string(loc.col); }

SyntaxError::SyntaxError(SourceLoc loc, const std::string& what)
    : std::runtime_error("syntax error at " + to_string(loc) + ": " + what), loc_(loc) {}

TypeError::TypeError(SourceLoc loc, std::string rule, const std::string& what)
    : std::runtime_error("type error at " + to_string(loc) + " (rule " + rule + "): " + what),
      loc_(loc),
      rule_(std::move(rule)) {}

// ---------------------------------------------------------------------------
// Types

Type::Type(Kind kind, TypePtr first, TypePtr second)
    : kind_(kind), first_(std::move(first)), second_(std::move(second)) {
    switch (kind_) {
        case Kind::Real:
            size_ = 1;
            break;
        case Kind::Unit:
            size_ = 0;
            break;
        case Kind::Pair:
            size_ = first_->size() + second_->size();
            break;
    }
}

TypePtr Type::real() {
    static const TypePtr r(new Type(Kind::Real, nullptr, nullptr));
    return r;
}

TypePtr Type::unit() {
    static const TypePtr u(new Type(Kind::Unit, nullptr, nullptr));
    return u;
}

TypePtr Type::pair(TypePtr first, TypePtr second) {
    return TypePtr(new Type(Kind::Pair, std::move(first), std::move(second)));
}

TypePtr Type::vector(std::size_t n) {
    if (n == 0) {
        return unit();
    }
    TypePtr t = real();
    for (std::size_t i = 1; i < n; i++) {
        t = pair(real(), t);
    }
    return t;
}

bool operator==(const Type& a, const Type& b) {
    if (a.kind() != b.kind()) {
        return false;
    }
    if (a.kind() != Type::Kind::Pair) {
        return true;
    }
    return *a.first() == *b.first() && *a.second() == *b.second();
}

std::string to_string(const Type& t) {
    switch (t.kind()) {
        case Type::Kind::Real:
            return "R";
        case Type::Kind::Unit:
            return "unit";
        case Type::Kind::Pair:
            break;
    }
    std::string lhs = to_string(*t.first());
    if (t.first()->kind() == Type::Kind::Pair) {
        lhs = "(" + lhs + ")";
    }
    return lhs + " * " + to_string(*t.second());
}

// ---------------------------------------------------------------------------
// Constructors

namespace {

TermPtr make(Node n, SourceLoc loc) { return std::make_shared<const Term>(std::move(n), loc); }

}  // namespace

TermPtr var(std::string name, SourceLoc loc) { return make(node::Var{std::move(name)}, loc); }
TermPtr latent(std::size_t index) { return make(node::Latent{index}, {}); }
TermPtr add(TermPtr lhs, TermPtr rhs, SourceLoc loc) { return make(node::Add{std::move(lhs), std::move(rhs)}, loc); }
TermPtr sub(TermPtr lhs, TermPtr rhs, SourceLoc loc) { return make(node::Sub{std::move(lhs), std::move(rhs)}, loc); }
TermPtr scale(double alpha, TermPtr body, SourceLoc loc) { return make(node::Scale{alpha, std::move(body)}, loc); }
TermPtr constant(double value, SourceLoc loc) { return make(node::Const{value}, loc); }
TermPtr pair(TermPtr first, TermPtr second, SourceLoc loc) {
    return make(node::Pair{std::move(first), std::move(second)}, loc);
}
TermPtr unit(SourceLoc loc) { return make(node::Unit{}, loc); }
TermPtr let(std::string name, TermPtr bound, TermPtr body, SourceLoc loc) {
    return make(node::Let{std::move(name), std::move(bound), std::move(body)}, loc);
}
TermPtr let_pair(std::string first, std::string second, TermPtr bound, TermPtr body, SourceLoc loc) {
    return make(node::LetPair{std::move(first), std::move(second), std::move(bound), std::move(body)}, loc);
}
TermPtr normal(SourceLoc loc) { return make(node::Normal{}, loc); }
TermPtr normal_with(TermPtr mean, double variance, SourceLoc loc) {
    return make(node::NormalWith{std::move(mean), Matrix{{variance}}, true}, loc);
}
TermPtr normal_with(TermPtr mean, Matrix cov, SourceLoc loc) {
    return make(node::NormalWith{std::move(mean), std::move(cov), false}, loc);
}
TermPtr observe(TermPtr dist, TermPtr target, SourceLoc loc) {
    return make(node::Observe{std::move(dist), std::move(target)}, loc);
}
TermPtr cond(TermPtr lhs, TermPtr rhs, SourceLoc loc) { return make(node::Cond{std::move(lhs), std::move(rhs)}, loc); }
TermPtr seq(TermPtr first, TermPtr second, SourceLoc loc) {
    return make(node::Seq{std::move(first), std::move(second)}, loc);
}
TermPtr mat_vec(Matrix matrix, TermPtr body, SourceLoc loc) {
    return make(node::MatVec{std::move(matrix), std::move(body)}, loc);
}

TermPtr tuple(const std::vector<TermPtr>& items) {
    if (items.empty()) {
        return unit();
    }
    TermPtr t = items.back();
    for (std::size_t i = items.size() - 1; i-- > 0;) {
        t = pair(items[i], t);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Structural queries

bool equal(const Term& a, const Term& b) {
    if (a.node().index() != b.node().index()) {
        return false;
    }
    return std::visit(
        overloaded{
            [&](const node::Var& x) { return x.name == b.as<node::Var>()->name; },
            [&](const node::Latent& x) { return x.index == b.as<node::Latent>()->index; },
            [&](const node::Add& x) {
                const auto* y = b.as<node::Add>();
                return equal(*x.lhs, *y->lhs) && equal(*x.rhs, *y->rhs);
            },
            [&](const node::Sub& x) {
                const auto* y = b.as<node::Sub>();
                return equal(*x.lhs, *y->lhs) && equal(*x.rhs, *y->rhs);
            },
            [&](const node::Scale& x) {
                const auto* y = b.as<node::Scale>();
                return x.alpha == y->alpha && equal(*x.body, *y->body);
            },
            [&](const node::Const& x) { return x.value == b.as<node::Const>()->value; },
            [&](const node::Pair& x) {
                const auto* y = b.as<node::Pair>();
                return equal(*x.first, *y->first) && equal(*x.second, *y->second);
            },
            [&](const node::Unit&) { return true; },
            [&](const node::Let& x) {
                const auto* y = b.as<node::Let>();
                return x.name == y->name && equal(*x.bound, *y->bound) && equal(*x.body, *y->body);
            },
            [&](const node::LetPair& x) {
                const auto* y = b.as<node::LetPair>();
                return x.first == y->first && x.second == y->second && equal(*x.bound, *y->bound) &&
                       equal(*x.body, *y->body);
            },
            [&](const node::Normal&) { return true; },
            [&](const node::NormalWith& x) {
                const auto* y = b.as<node::NormalWith>();
                return x.scalar_cov == y->scalar_cov && x.cov == y->cov && equal(*x.mean, *y->mean);
            },
            [&](const node::Observe& x) {
                const auto* y = b.as<node::Observe>();
                return equal(*x.dist, *y->dist) && equal(*x.target, *y->target);
            },
            [&](const node::Cond& x) {
                const auto* y = b.as<node::Cond>();
                return equal(*x.lhs, *y->lhs) && equal(*x.rhs, *y->rhs);
            },
            [&](const node::Seq& x) {
                const auto* y = b.as<node::Seq>();
                return equal(*x.first, *y->first) && equal(*x.second, *y->second);
            },
            [&](const node::MatVec& x) {
                const auto* y = b.as<node::MatVec>();
                return x.matrix == y->matrix && equal(*x.body, *y->body);
            },
        },
        a.node());
}

bool is_core(const Term& t) {
    bool core = true;
    for_each_child(t, [&](const Term& c) { core = core && is_core(c); });
    if (!core) {
        return false;
    }
    return !(t.is<node::Sub>() || t.is<node::Seq>() || t.is<node::NormalWith>() || t.is<node::Observe>() ||
             t.is<node::MatVec>());
}

std::size_t term_size(const Term& t) {
    std::size_t n = 1;
    for_each_child(t, [&](const Term& c) { n += term_size(c); });
    return n;
}

}  // namespace exactcond::lang
