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

#include "exactcond/calculus.hpp"

namespace exactcond::calculus {

namespace {

// nu z. (A z =:= b) r[D z + d], all conditions hoisted to the front.
struct Hoisted {
    std::size_t context = 0;
    std::size_t latents = 0;
    Matrix a_ctx;  // condition rows over the context
    Matrix a;      // condition rows over the latents
    Vector b;
    Matrix d_ctx;
    Matrix d;
    Vector d0;
};

Hoisted hoist(const CoreTerm& t) {
    Hoisted h;
    h.context = t.context_size();
    h.latents = t.binder_count();
    const std::size_t width = h.context + h.latents;
    std::vector<AffineExpr> rows;
    for (const auto& s : t.stmts) {
        if (const auto* c = std::get_if<CondStmt>(&s)) {
            rows.push_back(c->lhs - c->rhs);
        }
    }
    auto split = [&](const std::vector<AffineExpr>& exprs, Matrix& ctx, Matrix& lat, Vector& offset, double sign) {
        ctx = Matrix(exprs.size(), h.context);
        lat = Matrix(exprs.size(), h.latents);
        offset = Vector(exprs.size());
        for (std::size_t i = 0; i < exprs.size(); i++) {
            if (exprs[i].support_end() > width) {
                throw ContractError("normalize: expression refers to a variable out of scope");
            }
            for (std::size_t j = 0; j < h.context; j++) {
                ctx(i, j) = exprs[i].coeff(j);
            }
            for (std::size_t j = 0; j < h.latents; j++) {
                lat(i, j) = exprs[i].coeff(h.context + j);
            }
            offset[i] = sign * exprs[i].constant;
        }
    };
    // lhs - rhs = a_ctx x + a z + beta = 0  reads  a_ctx x + a z = b with b = -beta.
    split(rows, h.a_ctx, h.a, h.b, -1.0);
    split(t.result, h.d_ctx, h.d, h.d0, 1.0);
    return h;
}

// nu z. (A z =:= b) r[D z + d] as in the closed normal form theorem: with the
// SVD A = U diag(s) V^T take T = V^T (orthogonal) and S = diag(1/s) U^T, so
// S A T^-1 = (I_r 0; 0 0). In w = T z the conditions read w_i = c_i (i < r)
// and 0 = c_i (i >= r) with c = S b.
ClosedNormalForm closed_normal_form(const Matrix& a, const Vector& b, const Matrix& d, const Vector& d0) {
    ClosedNormalForm out;
    if (a.rows() == 0) {
        out.a = d;
        out.c = d0;
        return out;
    }
    const std::size_t k = a.cols();
    const std::size_t m = a.rows();
    const double tol = linalg::support_tolerance() * (1.0 + linalg::max_abs(b));
    if (k == 0) {
        out.bot = linalg::max_abs(b) > tol;
        out.a = d;
        out.c = d0;
        return out;
    }
    const linalg::Svd sv = linalg::svd(a);
    const std::size_t r = linalg::numerical_rank(sv, m, k);
    const Vector ub = linalg::transpose(sv.u) * b;
    for (std::size_t i = r; i < m; i++) {
        if (std::abs(ub[i]) > tol) {
            out.bot = true;
            return out;
        }
    }
    const Matrix dv = d * sv.v;
    Vector c = d0;
    for (std::size_t i = 0; i < r; i++) {
        const double wi = ub[i] / sv.s[i];
        for (std::size_t row = 0; row < d.rows(); row++) {
            c[row] += dv(row, i) * wi;
        }
    }
    out.a = linalg::select_cols(dv, linalg::range(r, k));
    out.c = std::move(c);
    return out;
}

}  // namespace

std::optional<gauss::GaussState> ClosedNormalForm::state() const {
    if (bot) {
        return std::nullopt;
    }
    return gauss::GaussState(c, linalg::gram(a));
}

ClosedNormalForm normalize_closed(const CoreTerm& t) {
    if (!t.context.empty()) {
        throw ContractError("normalize_closed: the term has free variables");
    }
    if (t.bot) {
        ClosedNormalForm out;
        out.bot = true;
        return out;
    }
    const Hoisted h = hoist(t);
    return closed_normal_form(h.a, h.b, h.d, h.d0);
}

CoreTerm as_core(const ClosedNormalForm& nf) {
    CoreTerm out;
    if (nf.bot) {
        out.bot = true;
        return out;
    }
    for (std::size_t j = 0; j < nf.a.cols(); j++) {
        out.stmts.push_back(Nu{"z" + std::to_string(j + 1)});
    }
    for (std::size_t i = 0; i < nf.a.rows(); i++) {
        AffineExpr e;
        e.coeffs.assign(nf.a.cols(), 0.0);
        for (std::size_t j = 0; j < nf.a.cols(); j++) {
            e.coeffs[j] = nf.a(i, j);
        }
        e.constant = nf.c[i];
        out.result.push_back(std::move(e));
    }
    return out;
}

cond::EffectNormalForm normalize_effect(const CoreTerm& t) {
    if (t.arity() != 0) {
        throw ContractError("normalize_effect: the term returns " + std::to_string(t.arity()) + " values, expected none");
    }
    cond::EffectNormalForm out;
    if (t.bot) {
        return out;
    }
    const Hoisted h = hoist(t);
    // a_ctx x + a z = b  reads  a_ctx x =:= B z + b with B = -a.
    const linalg::RrefWithTransform rr = linalg::rref_with_transform(h.a_ctx);
    const std::size_t r = rr.rref.rank;
    const std::size_t m = h.a_ctx.rows();
    const Matrix sb = rr.transform * ((-1.0) * h.a);
    const Vector sc = rr.transform * h.b;
    const linalg::Indices top = linalg::range(0, r);
    const linalg::Indices bottom = linalg::range(r, m);
    // Rows without x: 0 =:= (S B z + S c)_bottom, i.e. (-S B)_bottom z = (S c)_bottom.
    const ClosedNormalForm rest =
        closed_normal_form((-1.0) * linalg::select_rows(sb, bottom), linalg::select(sc, bottom),
                           linalg::select_rows(sb, top), linalg::select(sc, top));
    if (rest.bot) {
        return out;
    }
    out.status = cond::EffectNormalForm::Status::Constraint;
    out.a = linalg::select_rows(rr.rref.r, top);
    out.c = rest.c;
    out.s = linalg::gram(rest.a);
    return out;
}

}  // namespace exactcond::calculus
