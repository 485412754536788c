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

#include "exactcond/cond.hpp"

#include <string>

namespace exactcond::cond {

using linalg::range;
using linalg::select;
using linalg::transpose;

CondMorphism::CondMorphism(std::size_t cod, GaussMap f, Vector o) : cod_(cod), f_(std::move(f)), o_(std::move(o)) {
    if (f_.cod() != cod_ + o_.size()) {
        throw ContractError("cond morphism: generative part has codomain " + std::to_string(f_.cod()) +
                            ", expected " + std::to_string(cod_) + " outputs + " + std::to_string(o_.size()) +
                            " condition wires");
    }
    if (!linalg::all_finite(o_)) {
        throw ContractError("cond morphism: observation is not finite");
    }
}

CondMorphism embed(const GaussMap& f) { return CondMorphism(f.cod(), f, Vector()); }

CondMorphism condition_effect(const Vector& o) { return CondMorphism(0, gauss::identity(o.size()), o); }

CondMorphism obs_compose(const CondMorphism& g, const CondMorphism& f) {
    if (g.dom() != f.cod()) {
        throw ContractError("obs_compose: domain " + std::to_string(g.dom()) + " does not match codomain " +
                            std::to_string(f.cod()));
    }
    GaussMap joint = gauss::compose(gauss::tensor(g.f(), gauss::identity(f.k())), f.f());
    return CondMorphism(g.cod(), std::move(joint), linalg::concat(g.o(), f.o()));
}

CondMorphism obs_tensor(const CondMorphism& f, const CondMorphism& g) {
    // f.f (x) g.f produces (y_f, k_f, y_g, k_g); route to (y_f, y_g, k_f, k_g).
    const std::size_t yf = f.cod();
    const std::size_t kf = f.k();
    const std::size_t yg = g.cod();
    const std::size_t kg = g.k();
    Indices order;
    for (std::size_t i = 0; i < yf; i++) {
        order.push_back(i);
    }
    for (std::size_t i = 0; i < yg; i++) {
        order.push_back(yf + kf + i);
    }
    for (std::size_t i = 0; i < kf; i++) {
        order.push_back(yf + i);
    }
    for (std::size_t i = 0; i < kg; i++) {
        order.push_back(yf + kf + yg + i);
    }
    const GaussMap routed = gauss::compose(gauss::projection(yf + kf + yg + kg, order), gauss::tensor(f.f(), g.f()));
    return CondMorphism(yf + yg, routed, linalg::concat(f.o(), g.o()));
}

CondMorphism pairing(const CondMorphism& f, const CondMorphism& g) {
    if (f.dom() != g.dom()) {
        throw ContractError("pairing: domains differ");
    }
    return obs_compose(obs_tensor(f, g), embed(gauss::copy(f.dom())));
}

std::optional<GaussState> state_normalize(const CondMorphism& s) {
    if (s.dom() != 0) {
        throw ContractError("state_normalize: morphism has domain " + std::to_string(s.dom()) + ", expected 0");
    }
    const GaussState psi = GaussState::from_map(s.f());
    if (s.k() == 0) {
        return psi;
    }
    const GaussState point = GaussState::point(s.o());
    if (!gauss::abs_cont(point, gauss::marginal(psi, s.condition_block()))) {
        return std::nullopt;
    }
    return gauss::condition_dist(psi, s.condition_block(), s.o());
}

EffectNormalForm constraint_normal_form(const Matrix& a, const Vector& c, const Matrix& s) {
    const std::size_t k = a.rows();
    const std::size_t n = a.cols();
    if (c.size() != k || s.rows() != k || s.cols() != k) {
        throw ContractError("constraint_normal_form: shape mismatch");
    }
    EffectNormalForm out;
    out.status = EffectNormalForm::Status::Constraint;
    if (k == 0) {
        out.a = Matrix(0, n);
        return out;
    }

    // Split the rows by an invertible T = [T_top; T_bot] with T_top a = rref(a)
    // and T_bot a = 0. T_top comes from the pseudoinverse, T_bot spans the left
    // null space.
    const linalg::Svd d = linalg::svd(a);
    const std::size_t r = linalg::numerical_rank(d, k, n);
    Matrix reduced(0, n);
    if (r > 0) {
        const Matrix row_basis = transpose(select(d.v, range(0, n), range(0, r)));
        reduced = select(linalg::rref(row_basis).r, range(0, r), range(0, n));
    }
    const Matrix top = reduced * linalg::pinv(a);
    Matrix bottom = transpose(select(d.u, range(0, k), range(r, k)));
    // Rotate the bottom rows onto the eigenbasis of their noise; directions
    // with rounding-level variance are deterministic.
    std::vector<bool> exact(k - r, false);
    if (r < k) {
        const linalg::SymEigen e = linalg::sym_eigen(linalg::sandwich(bottom, s));
        bottom = transpose(e.vectors) * bottom;
        const double cut = linalg::kCancellationEpsilon * double(k) * linalg::max_abs(s);
        for (std::size_t i = 0; i < k - r; i++) {
            exact[i] = e.values[i] <= cut;
        }
    }
    const Matrix t = linalg::vstack(top, bottom);

    Matrix cov = linalg::sandwich(t, s);
    for (std::size_t i = 0; i < k - r; i++) {
        if (exact[i]) {
            for (std::size_t j = 0; j < k; j++) {
                cov(r + i, j) = 0.0;
                cov(j, r + i) = 0.0;
            }
        }
    }
    const GaussState rhs = GaussState::assume_psd(t * c, cov);
    // The bottom rows read 0 =:= rhs_bottom: a closed condition on the
    // right-hand side, which either fails or updates the top rows.
    const std::optional<GaussState> resolved = gauss::condition_dist(rhs, range(r, k), Vector(k - r));
    if (!resolved) {
        out.status = EffectNormalForm::Status::Bot;
        return out;
    }
    out.a = reduced;
    out.c = resolved->mean();
    out.s = resolved->cov();
    return out;
}

EffectNormalForm effect_normal_form(const CondMorphism& e) {
    if (e.cod() != 0) {
        throw ContractError("effect_normal_form: morphism has " + std::to_string(e.cod()) + " outputs");
    }
    return constraint_normal_form(e.f().a(), e.o() - e.f().b(), e.f().sigma());
}

AffineSubspace success_region(const EffectNormalForm& nf) {
    if (nf.is_bot()) {
        throw ContractError("success_region: effect always fails");
    }
    const std::size_t n = nf.a.cols();
    // Rows of A x - c that must vanish: the components orthogonal to col(S).
    const Matrix q = linalg::left_null_space(nf.s);
    if (q.cols() == 0) {
        return AffineSubspace::whole(n);
    }
    const Matrix m = transpose(q) * nf.a;
    Vector point = linalg::pinv(m) * (transpose(q) * nf.c);
    return AffineSubspace(std::move(point), linalg::null_space(m));
}

CanonicalRecord canonicalize(const CondMorphism& m) {
    CanonicalRecord rec;
    rec.dom = m.dom();
    rec.cod = m.cod();
    const Indices in = range(0, m.dom());
    const Indices kb = m.condition_block();

    rec.effect = constraint_normal_form(select(m.f().a(), kb, in), m.o() - select(m.f().b(), kb),
                                        select(m.f().sigma(), kb, kb));
    if (rec.effect.is_bot()) {
        return rec;
    }
    rec.success = success_region(rec.effect);

    // Posterior map: the conditional given the condition wires, evaluated at o.
    const GaussMap post = gauss::parameterized_conditional(m.f(), kb);
    const Indices outs = range(0, m.cod());
    const Matrix h = select(post.a(), outs, range(m.k(), m.k() + m.dom()));
    const Vector hb = post.b() + select(post.a(), outs, range(0, m.k())) * m.o();

    const Matrix& basis = rec.success->basis();
    CanonicalPosterior cp;
    cp.a_on_w = h * basis * transpose(basis);
    cp.value_at_point = h * rec.success->point() + hb;
    cp.sigma = post.sigma();
    rec.posterior = std::move(cp);
    return rec;
}

bool equal(const EffectNormalForm& a, const EffectNormalForm& b, double tol) {
    if (a.status != b.status) {
        return false;
    }
    if (a.is_bot()) {
        return true;
    }
    return linalg::approx_equal(a.a, b.a, tol) && linalg::approx_equal(a.c, b.c, tol) &&
           linalg::approx_equal(a.s, b.s, tol);
}

bool records_equal(const CanonicalRecord& a, const CanonicalRecord& b, double tol) {
    if (a.dom != b.dom || a.cod != b.cod) {
        return false;
    }
    if (!equal(a.effect, b.effect, tol)) {
        return false;
    }
    if (a.effect.is_bot()) {
        return true;
    }
    const CanonicalPosterior& pa = *a.posterior;
    const CanonicalPosterior& pb = *b.posterior;
    return linalg::approx_equal(pa.a_on_w, pb.a_on_w, tol) &&
           linalg::approx_equal(pa.value_at_point, pb.value_at_point, tol) &&
           linalg::approx_equal(pa.sigma, pb.sigma, tol);
}

bool equiv(const CondMorphism& m1, const CondMorphism& m2) {
    if (m1.dom() != m2.dom() || m1.cod() != m2.cod()) {
        throw ContractError("equiv: morphisms have different types (" + std::to_string(m1.dom()) + " ~> " +
                            std::to_string(m1.cod()) + " vs " + std::to_string(m2.dom()) + " ~> " +
                            std::to_string(m2.cod()) + ")");
    }
    return records_equal(canonicalize(m1), canonicalize(m2));
}

}  // namespace exactcond::cond
