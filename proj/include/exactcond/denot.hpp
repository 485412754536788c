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

#ifndef EXACTCOND_DENOT_HPP_
#define EXACTCOND_DENOT_HPP_

#include "exactcond/cond.hpp"
#include "exactcond/lang.hpp"

/// Compositional translation of typed programs into conditioning morphisms.
///
/// A context x1:A1, ..., xk:Ak is laid out as the concatenation of the real
/// coordinates of A1, ..., Ak (R is one coordinate, unit none, pairs are
/// first-then-second). let appends its binder's block at the end.
namespace exactcond::denot {

using cond::CondMorphism;

/// Total number of real coordinates.
std::size_t flat_size(const lang::Context& ctx);

/// The morphism  flat_size(context) ~> size(type)  of a typed program. Sugar
/// is desugared first. Throws ContractError on latents.
CondMorphism denote(const lang::TypedTerm& e);

struct Agreement {
    bool agree = false;
    std::optional<gauss::GaussState> denotational;  // nullopt is failure
    std::optional<gauss::GaussState> operational;
};

/// Normalized denotation vs the observable of the interpreter, for a closed
/// program, to 1e-8.
Agreement compare_semantics(const lang::TypedTerm& e);
bool check_agreement(const lang::TypedTerm& e);

}  // namespace exactcond::denot

#endif  // EXACTCOND_DENOT_HPP_
