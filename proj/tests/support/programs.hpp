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

// Seeded generators of well-typed core programs.

#ifndef EXACTCOND_TESTS_SUPPORT_PROGRAMS_HPP_
#define EXACTCOND_TESTS_SUPPORT_PROGRAMS_HPP_

#include <string>
#include <vector>

#include "exactcond/lang.hpp"
#include "support/random.hpp"

namespace testing {

namespace lang = exactcond::lang;
using lang::TermPtr;

struct ProgramOptions {
    std::size_t depth = 4;
    double coeff = 3.0;
    double cond_rate = 0.2;      // chance a real-valued node is prefixed by a condition
    double noisy_rate = 0.5;     // chance a condition observes through fresh noise (never fails)
    double constant_rate = 0.02; // chance a condition compares two constants
};

class ProgramGen {
  public:
    ProgramGen(Rng& rng, ProgramOptions opts = {}) : rng_(rng), opts_(opts) {}

    /// Closed core program of type R^n (unit for n = 0).
    TermPtr program(std::size_t n) { return open_program(n, {}); }

    /// Core program of type R^n over real-typed free variables `vars`.
    TermPtr open_program(std::size_t n, std::vector<std::string> vars) {
        env_ = std::move(vars);
        std::vector<TermPtr> items;
        for (std::size_t i = 0; i < n; i++) {
            items.push_back(real(opts_.depth));
        }
        return lang::tuple(items);
    }

    TermPtr real(std::size_t depth) {
        if (depth > 0 && rng_.coin(opts_.cond_rate)) {
            TermPtr c = condition(depth - 1);
            return lang::let(fresh("u"), c, real(depth - 1));
        }
        if (depth == 0) {
            return leaf();
        }
        switch (rng_.index(0, 6)) {
            case 0:
                return leaf();
            case 1:
            case 2:
                return lang::add(real(depth - 1), real(depth - 1));
            case 3:
                return lang::scale(coefficient(), real(depth - 1));
            case 4: {
                TermPtr bound = real(depth - 1);
                const std::string x = fresh("x");
                env_.push_back(x);
                TermPtr body = real(depth - 1);
                env_.pop_back();
                return lang::let(x, bound, body);
            }
            case 5: {
                TermPtr bound = lang::pair(real(depth - 1), real(depth - 1));
                const std::string a = fresh("a");
                const std::string b = fresh("b");
                env_.push_back(a);
                env_.push_back(b);
                TermPtr body = real(depth - 1);
                env_.pop_back();
                env_.pop_back();
                return lang::let_pair(a, b, bound, body);
            }
            default:
                return lang::normal();
        }
    }

    TermPtr condition(std::size_t depth) {
        if (rng_.coin(opts_.constant_rate)) {
            const double a = std::round(coefficient());
            return lang::cond(lang::constant(a), lang::constant(rng_.coin() ? a : a + 1.0));
        }
        TermPtr lhs = real(depth);
        TermPtr rhs = real(depth);
        if (rng_.coin(opts_.noisy_rate)) {
            rhs = lang::add(rhs, lang::normal());
        }
        return lang::cond(lhs, rhs);
    }

    double coefficient() {
        double a = 0.0;
        while (a == 0.0) {
            a = std::round(rng_.uniform(-opts_.coeff, opts_.coeff) * 4.0) / 4.0;
        }
        return a;
    }

  private:
    TermPtr leaf() {
        const std::size_t pick = rng_.index(0, env_.empty() ? 1 : 3);
        if (pick == 0) {
            return lang::normal();
        }
        if (pick == 1) {
            return lang::constant(coefficient());
        }
        return lang::var(env_[rng_.index(0, env_.size() - 1)]);
    }

    std::string fresh(const char* stem) { return stem + std::to_string(counter_++); }

    Rng& rng_;
    ProgramOptions opts_;
    std::vector<std::string> env_;
    std::size_t counter_ = 0;
};

}  // namespace testing

#endif  // EXACTCOND_TESTS_SUPPORT_PROGRAMS_HPP_
