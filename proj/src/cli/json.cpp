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

#include <stdexcept>

#include "exactcond/cli.hpp"

namespace exactcond::cli {

json to_json(const Vector& v) {
    json out = json::array();
    for (double x : v) {
        out.push_back(x == 0.0 ? 0.0 : x);
    }
    return out;
}

json to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); i++) {
        rows.push_back(to_json(m.row_vector(i)));
    }
    return rows;
}

json to_json(const GaussState& s) { return {{"mean", to_json(s.mean())}, {"cov", to_json(s.cov())}}; }

json to_json(const cond::EffectNormalForm& nf) {
    if (nf.is_bot()) {
        return {{"status", "bot"}};
    }
    return {{"status", "constraint"}, {"a", to_json(nf.a)}, {"c", to_json(nf.c)}, {"s", to_json(nf.s)}};
}

json to_json(const cond::CanonicalRecord& r) {
    json j = {{"dom", r.dom}, {"cod", r.cod}, {"effect", to_json(r.effect)}};
    if (r.success) {
        j["success"] = {{"point", to_json(r.success->point())}, {"basis", to_json(r.success->basis())}};
    }
    if (r.posterior) {
        j["posterior"] = {{"a_on_w", to_json(r.posterior->a_on_w)},
                          {"value_at_point", to_json(r.posterior->value_at_point)},
                          {"sigma", to_json(r.posterior->sigma)}};
    }
    return j;
}

json to_json(const calculus::ClosedNormalForm& nf) {
    if (nf.bot) {
        return {{"status", "bot"}};
    }
    return {{"status", "generative"},
            {"a", to_json(nf.a)},
            {"c", to_json(nf.c)},
            {"cov", to_json(linalg::gram(nf.a))}};
}

Vector vector_from_json(const json& j) {
    if (!j.is_array()) {
        throw std::invalid_argument("expected a JSON array of numbers");
    }
    return Vector(j.get<std::vector<double>>());
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array()) {
        throw std::invalid_argument("expected a JSON array of rows");
    }
    const std::size_t rows = j.size();
    const std::size_t cols = rows == 0 ? 0 : j[0].size();
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; i++) {
        const Vector row = vector_from_json(j[i]);
        if (row.size() != cols) {
            throw std::invalid_argument("ragged matrix in JSON");
        }
        for (std::size_t k = 0; k < cols; k++) {
            m(i, k) = row[k];
        }
    }
    return m;
}

GaussState state_from_json(const json& j) {
    return GaussState(vector_from_json(j.at("mean")), matrix_from_json(j.at("cov")));
}

}  // namespace exactcond::cli
