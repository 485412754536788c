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
#include <cmath>
#include <iomanip>
#include <sstream>

#include "exactcond/cli.hpp"
#include "exactcond/denot.hpp"

namespace exactcond::cli {

namespace {

std::string number(double x) {
    if (x == 0.0) {
        x = 0.0;
    }
    std::ostringstream os;
    os << std::setprecision(10) << x;
    return os.str();
}

std::string show(const Vector& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); i++) {
        s += (i ? ", " : "") + number(v[i]);
    }
    return s + "]";
}

std::string show(const Matrix& m) {
    std::string s = "[";
    for (std::size_t i = 0; i < m.rows(); i++) {
        s += (i ? ", " : "") + show(m.row_vector(i));
    }
    return s + "]";
}

// Runs `body`, turning static and contract errors into exit code 1.
template <class F>
CommandResult guarded(const std::string& name, F body) {
    try {
        return body();
    } catch (const lang::SyntaxError& e) {
        return {kExitError, "", name + ": " + e.what() + "\n"};
    } catch (const lang::TypeError& e) {
        return {kExitError, "", name + ": " + e.what() + "\n"};
    } catch (const ContractError& e) {
        return {kExitError, "", name + ": " + e.what() + "\n"};
    }
}

}  // namespace

RunReport make_report(const opsem::RunResult& r) {
    RunReport report;
    report.step_count = r.steps;
    report.trace = r.trace;
    if (const auto obs = opsem::observable(r)) {
        report.ok = true;
        report.mean = obs->mean();
        report.cov = obs->cov();
        report.latent_count = r.final.prior().dim();
    }
    return report;
}

json to_json(const RunReport& r) {
    json j = {{"status", r.ok ? "ok" : "bot"}, {"steps", r.step_count}};
    if (r.ok) {
        j["mean"] = to_json(r.mean);
        j["cov"] = to_json(r.cov);
        j["latents"] = r.latent_count;
    }
    if (!r.trace.empty()) {
        json trace = json::array();
        for (const opsem::TraceEntry& e : r.trace) {
            json entry = {{"term", e.prior ? json(e.term) : json(nullptr)}};
            if (e.prior) {
                entry["prior"] = to_json(*e.prior);
            }
            trace.push_back(entry);
        }
        j["trace"] = trace;
    }
    return j;
}

std::string format(const RunReport& r) {
    std::string s;
    for (std::size_t i = 0; i < r.trace.size(); i++) {
        const opsem::TraceEntry& e = r.trace[i];
        s += std::to_string(i) + ": ";
        if (!e.prior) {
            s += "bot\n";
            continue;
        }
        s += e.term + "    prior mean " + show(e.prior->mean()) + " cov " + show(e.prior->cov()) + "\n";
    }
    s += std::string("status: ") + (r.ok ? "ok" : "bot") + "\n";
    if (r.ok) {
        s += "mean: " + show(r.mean) + "\n";
        s += "cov: " + show(r.cov) + "\n";
        s += "latents: " + std::to_string(r.latent_count) + "\n";
    }
    s += "steps: " + std::to_string(r.step_count) + "\n";
    return s;
}

CommandResult cmd_run(std::string_view source, bool trace, bool as_json, const std::string& name) {
    return guarded(name, [&]() -> CommandResult {
        const RunReport report = make_report(opsem::run(lang::compile(source), trace));
        std::string out = as_json ? to_json(report).dump(2) + "\n" : format(report);
        return {report.ok ? kExitOk : kExitBot, std::move(out), ""};
    });
}

CommandResult cmd_equiv(std::string_view source1, std::string_view source2, const lang::Context& ctx,
                        const std::string& name1, const std::string& name2) {
    std::optional<lang::TypedTerm> t1;
    std::optional<lang::TypedTerm> t2;
    CommandResult r = guarded(name1, [&]() -> CommandResult {
        t1 = lang::compile(source1, ctx);
        return {};
    });
    if (r.exit_code != kExitOk) {
        return r;
    }
    r = guarded(name2, [&]() -> CommandResult {
        t2 = lang::compile(source2, ctx);
        return {};
    });
    if (r.exit_code != kExitOk) {
        return r;
    }
    if (!(*t1->type() == *t2->type())) {
        return {kExitError, "",
                "type mismatch: " + name1 + " has type " + lang::to_string(*t1->type()) + ", " + name2 +
                    " has type " + lang::to_string(*t2->type()) + "\n"};
    }
    const cond::CondMorphism m1 = denot::denote(*t1);
    const cond::CondMorphism m2 = denot::denote(*t2);
    const bool same = cond::equiv(m1, m2);
    std::string out = same ? "equivalent\n" : "inequivalent\n";
    out += name1 + ": " + to_json(cond::canonicalize(m1)).dump() + "\n";
    out += name2 + ": " + to_json(cond::canonicalize(m2)).dump() + "\n";
    return {same ? kExitOk : kExitInequivalent, std::move(out), ""};
}

CommandResult cmd_normalize(std::string_view source, const lang::Context& ctx, bool as_json, const std::string& name) {
    return guarded(name, [&]() -> CommandResult {
        const lang::TypedTerm t = lang::compile(source, ctx);
        if (ctx.empty()) {
            const calculus::ClosedNormalForm nf = calculus::normalize_closed(calculus::to_core(t));
            if (as_json) {
                return {kExitOk, to_json(nf).dump(2) + "\n", ""};
            }
            std::string out = calculus::print(calculus::as_core(nf)) + "\n";
            if (!nf.bot) {
                out += "A: " + show(nf.a) + "\n";
                out += "c: " + show(nf.c) + "\n";
                out += "AA^T: " + show(linalg::gram(nf.a)) + "\n";
            }
            return {kExitOk, std::move(out), ""};
        }
        const bool real_context = std::all_of(ctx.begin(), ctx.end(), [](const lang::Binding& b) {
            return b.type->kind() == lang::Type::Kind::Real;
        });
        if (real_context && t.type()->kind() == lang::Type::Kind::Unit) {
            const cond::EffectNormalForm nf = calculus::normalize_effect(calculus::to_core(t));
            if (as_json) {
                return {kExitOk, to_json(nf).dump(2) + "\n", ""};
            }
            if (nf.is_bot()) {
                return {kExitOk, "bot\n", ""};
            }
            return {kExitOk, "A: " + show(nf.a) + "\nc: " + show(nf.c) + "\nBB^T: " + show(nf.s) + "\n", ""};
        }
        const json record = to_json(cond::canonicalize(denot::denote(t)));
        return {kExitOk, record.dump(as_json ? 2 : -1) + "\n", ""};
    });
}

}  // namespace exactcond::cli
