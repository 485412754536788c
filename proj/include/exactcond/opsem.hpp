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

#ifndef EXACTCOND_OPSEM_HPP_
#define EXACTCOND_OPSEM_HPP_

#include <optional>
#include <variant>

#include "exactcond/gauss.hpp"
#include "exactcond/lang.hpp"

/// Call-by-value small-step interpreter. A configuration pairs a term over
/// latents z1..zr with a Gaussian prior on R^r; normal() allocates a latent,
/// =:= conditions the prior.
namespace exactcond::opsem {

using gauss::GaussState;
using lang::TermPtr;
using linalg::Matrix;
using linalg::Vector;

class Configuration {
  public:
    static Configuration running(TermPtr term, GaussState prior);
    static Configuration bot();

    bool is_bot() const { return !term_; }
    /// Both throw ContractError on the failure configuration.
    const TermPtr& term() const;
    const GaussState& prior() const;

  private:
    Configuration(TermPtr term, GaussState prior) : term_(std::move(term)), prior_(std::move(prior)) {}

    TermPtr term_;
    GaussState prior_;
};

namespace frame {

struct AddL {
    TermPtr rhs;
};
struct AddR {
    TermPtr lhs;
};
struct Scale {
    double alpha;
};
struct PairL {
    TermPtr second;
};
struct PairR {
    TermPtr first;
};
struct CondL {
    TermPtr rhs;
};
struct CondR {
    TermPtr lhs;
};
struct Let {
    std::string name;
    TermPtr body;
};
struct LetPair {
    std::string first, second;
    TermPtr body;
};

}  // namespace frame

using Frame = std::variant<frame::AddL, frame::AddR, frame::Scale, frame::PairL, frame::PairR, frame::CondL,
                           frame::CondR, frame::Let, frame::LetPair>;

/// C[rho]: frames from the outermost to the hole.
struct Decomposition {
    std::vector<Frame> context;
    TermPtr redex;
};

bool is_value(const lang::Term& t);

/// nullopt for values.
std::optional<Decomposition> decompose(const TermPtr& t);

TermPtr plug(const std::vector<Frame>& context, TermPtr t);

/// t[v/x] for a closed value v.
TermPtr substitute(const TermPtr& t, const std::string& x, const TermPtr& v);

/// A value over z1..zr read as the affine map z |-> V z + w.
struct ValueExpr {
    Matrix v;
    Vector w;
};

ValueExpr value_expr(const lang::Term& value, std::size_t latents);

/// One reduction. Requires a running configuration whose term is not a value.
Configuration step(const Configuration& c);

struct TraceEntry {
    std::string term;  // empty for the failure configuration
    std::optional<GaussState> prior;
};

struct RunResult {
    Configuration final;
    std::size_t steps = 0;
    std::vector<TraceEntry> trace;  // filled only when requested, initial configuration first
};

/// Reduces a closed core program from the empty prior to a value or failure.
RunResult run(const lang::TypedTerm& program, bool trace = false);

/// v_* psi for a value configuration, nullopt for failure.
std::optional<GaussState> observable(const Configuration& c);
std::optional<GaussState> observable(const RunResult& r);

}  // namespace exactcond::opsem

#endif  // EXACTCOND_OPSEM_HPP_
