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

#ifndef EXACTCOND_CLI_HPP_
#define EXACTCOND_CLI_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exactcond/calculus.hpp"
#include "exactcond/cond.hpp"
#include "exactcond/opsem.hpp"
#include "json.hpp"

/// The command-line front end as a library: every command returns its exit
/// code and output instead of touching the process.
namespace exactcond::cli {

using gauss::GaussState;
using linalg::Matrix;
using linalg::Vector;
using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitBot = 2;
inline constexpr int kExitInequivalent = 3;

struct CommandResult {
    int exit_code = kExitOk;
    std::string out;
    std::string err;
};

// ---------------------------------------------------------------------------
// JSON

json to_json(const Vector& v);
json to_json(const Matrix& m);
/// {"mean": [...], "cov": [[...]]}
json to_json(const GaussState& s);
json to_json(const cond::EffectNormalForm& nf);
json to_json(const cond::CanonicalRecord& r);
json to_json(const calculus::ClosedNormalForm& nf);

Vector vector_from_json(const json& j);
Matrix matrix_from_json(const json& j);
GaussState state_from_json(const json& j);

// ---------------------------------------------------------------------------
// Commands

struct RunReport {
    bool ok = false;
    Vector mean;  // empty unless ok
    Matrix cov;
    std::size_t latent_count = 0;
    std::size_t step_count = 0;
    std::vector<opsem::TraceEntry> trace;
};

RunReport make_report(const opsem::RunResult& r);
json to_json(const RunReport& r);
std::string format(const RunReport& r);

/// `name` labels diagnostics.
CommandResult cmd_run(std::string_view source, bool trace, bool as_json, const std::string& name = "<input>");

/// Exit 0 when equivalent, 3 when not, 1 on static errors or a type mismatch.
CommandResult cmd_equiv(std::string_view source1, std::string_view source2, const lang::Context& ctx = {},
                        const std::string& name1 = "<first>", const std::string& name2 = "<second>");

/// Closed programs print their closed normal form; unit-typed programs print
/// their effect normal form; anything else prints its canonical record.
CommandResult cmd_normalize(std::string_view source, const lang::Context& ctx = {}, bool as_json = false,
                            const std::string& name = "<input>");

// ---------------------------------------------------------------------------
// Examples

/// kriging (kernel=rbf or kernel=randomwalk), randomwalk, kalman, ridge.
struct ExampleSpec {
    std::string name;
    std::map<std::string, std::string> params;
};

struct ExampleTable {
    std::string file;  // CSV file name inside the output directory
    std::optional<GaussState> prior;
    std::optional<GaussState> posterior;  // nullopt when the conditions fail
};

struct ExampleResult {
    std::vector<ExampleTable> tables;
    json summary;
};

/// The generative program of an example, with and without its conditions.
struct ExamplePrograms {
    lang::TermPtr prior;
    lang::TermPtr posterior;
};
ExamplePrograms example_programs(const ExampleSpec& spec);

/// Runs the example's programs through the interpreter. Throws
/// std::invalid_argument for unknown examples or parameters.
ExampleResult run_example(const ExampleSpec& spec);

/// index,prior_mean,prior_sd,post_mean,post_sd
std::string to_csv(const ExampleTable& t);

/// Writes every table and summary.json into `out`.
CommandResult cmd_example(const ExampleSpec& spec, const std::filesystem::path& out);

/// "k=v" into the parameter map.
void parse_param(const std::string& kv, std::map<std::string, std::string>& params);

}  // namespace exactcond::cli

#endif  // EXACTCOND_CLI_HPP_
