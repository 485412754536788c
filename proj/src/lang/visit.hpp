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

#ifndef EXACTCOND_SRC_LANG_VISIT_HPP_
#define EXACTCOND_SRC_LANG_VISIT_HPP_

#include "exactcond/lang.hpp"

namespace exactcond::lang {

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

/// Calls f on each direct subterm, left to right.
template <class F>
void for_each_child(const Term& t, F&& f) {
    std::visit(overloaded{
                   [&](const node::Add& x) { f(*x.lhs), f(*x.rhs); },
                   [&](const node::Sub& x) { f(*x.lhs), f(*x.rhs); },
                   [&](const node::Scale& x) { f(*x.body); },
                   [&](const node::Pair& x) { f(*x.first), f(*x.second); },
                   [&](const node::Let& x) { f(*x.bound), f(*x.body); },
                   [&](const node::LetPair& x) { f(*x.bound), f(*x.body); },
                   [&](const node::NormalWith& x) { f(*x.mean); },
                   [&](const node::Observe& x) { f(*x.dist), f(*x.target); },
                   [&](const node::Cond& x) { f(*x.lhs), f(*x.rhs); },
                   [&](const node::Seq& x) { f(*x.first), f(*x.second); },
                   [&](const node::MatVec& x) { f(*x.body); },
                   [](const auto&) {},
               },
               t.node());
}

}  // namespace exactcond::lang

#endif  // EXACTCOND_SRC_LANG_VISIT_HPP_
