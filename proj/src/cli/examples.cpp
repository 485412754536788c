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
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include "exactcond/cli.hpp"

namespace exactcond::cli {

using lang::TermPtr;

namespace {

// ---------------------------------------------------------------------------
// Parameters

class Params {
  public:
    Params(const ExampleSpec& spec, std::map<std::string, std::string> defaults) : values_(std::move(defaults)) {
        for (const auto& [key, value] : spec.params) {
            if (!values_.count(key)) {
                throw std::invalid_argument("example " + spec.name + ": unknown parameter '" + key + "'");
            }
            values_[key] = value;
        }
    }

    const std::string& text(const std::string& key) const { return values_.at(key); }

    double real(const std::string& key) const {
        const std::string& s = text(key);
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || !std::isfinite(x)) {
            throw std::invalid_argument("parameter " + key + ": not a number: '" + s + "'");
        }
        return x;
    }

    std::size_t count(const std::string& key) const {
        const double x = real(key);
        if (x < 1.0 || x != std::floor(x)) {
            throw std::invalid_argument("parameter " + key + ": expected a positive integer");
        }
        return static_cast<std::size_t>(x);
    }

    double variance(const std::string& key) const {
        const double v = real(key);
        if (v < 0.0) {
            throw std::invalid_argument("parameter " + key + ": negative variance");
        }
        return v;
    }

    std::vector<double> list(const std::string& key) const {
        std::vector<double> out;
        std::stringstream ss(text(key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            std::size_t used = 0;
            double x = 0.0;
            try {
                x = std::stod(item, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != item.size()) {
                throw std::invalid_argument("parameter " + key + ": bad list entry '" + item + "'");
            }
            out.push_back(x);
        }
        return out;
    }

    /// "i:c,i:c,..." with distinct indices below `n`.
    std::vector<std::pair<std::size_t, double>> observations(const std::string& key, std::size_t n) const {
        std::vector<std::pair<std::size_t, double>> out;
        std::set<std::size_t> seen;
        std::stringstream ss(text(key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const std::size_t colon = item.find(':');
            std::size_t used_i = 0;
            std::size_t used_c = 0;
            unsigned long i = 0;
            double c = 0.0;
            try {
                i = std::stoul(item.substr(0, colon), &used_i);
                c = std::stod(item.substr(colon + 1), &used_c);
            } catch (const std::exception&) {
                used_i = 0;
            }
            if (colon == std::string::npos || used_i != colon || used_c != item.size() - colon - 1 || i >= n ||
                !seen.insert(i).second) {
                throw std::invalid_argument("parameter " + key + ": bad observation '" + item + "'");
            }
            out.emplace_back(i, c);
        }
        return out;
    }

    json to_json() const { return json(values_); }

  private:
    std::map<std::string, std::string> values_;
};

// ---------------------------------------------------------------------------
// Program construction

using Lets = std::vector<std::pair<std::string, TermPtr>>;

TermPtr with_lets(const Lets& lets, TermPtr body) {
    for (std::size_t i = lets.size(); i-- > 0;) {
        body = lang::let(lets[i].first, lets[i].second, body);
    }
    return body;
}

TermPtr noisy(TermPtr mean, double variance) { return lang::normal_with(std::move(mean), variance); }

TermPtr vars(const std::string& stem, std::size_t begin, std::size_t end) {
    std::vector<TermPtr> items;
    for (std::size_t i = begin; i < end; i++) {
        items.push_back(lang::var(stem + std::to_string(i)));
    }
    return lang::tuple(items);
}

// conditions; body
TermPtr after(const std::vector<TermPtr>& conditions, TermPtr body) {
    for (std::size_t i = conditions.size(); i-- > 0;) {
        body = lang::seq(conditions[i], body);
    }
    return body;
}

const std::map<std::string, std::string> kRandomWalkDefaults = {
    {"n", "100"}, {"step_var", "1"}, {"obs", "0:0,20:1.5,40:-0.5,60:2,80:1,100:-1"}};

const std::map<std::string, std::string> kRbfDefaults = {
    {"n", "100"}, {"bandwidth", "10"}, {"obs", "10:1,35:-0.5,60:0.8,85:-1.2"}};

const std::map<std::string, std::string> kKalmanDefaults = {{"xs", "1.0,3.4,2.7,3.2,5.8,14.0,18.0,11.7,19.5,19.2"},
                                                             {"x0_var", "1"},
                                                             {"v0", "1.0"},
                                                             {"v0_var", "10"},
                                                             {"drift_var", "0.75"},
                                                             {"obs_var", "1"}};

const std::map<std::string, std::string> kRidgeDefaults = {{"xs", "1.0,2.0,2.25,5.0,10.0"},
                                                            {"ys", "-3.5,-6.4,-4.0,-8.1,-11.0"},
                                                            {"prior_var", "10"},
                                                            {"noise_var", "0.1"},
                                                            {"grid_min", "0"},
                                                            {"grid_max", "11"},
                                                            {"grid_points", "111"}};

// y0 ~ N(0, s), y_i = y_{i-1} + N(0, s), i = 1..n; returns (y0, ..., yn).
ExamplePrograms random_walk(const Params& p) {
    const std::size_t n = p.count("n");
    const double s = p.variance("step_var");
    const auto obs = p.observations("obs", n + 1);
    Lets lets{{"y0", noisy(lang::constant(0.0), s)}};
    for (std::size_t i = 1; i <= n; i++) {
        lets.emplace_back("y" + std::to_string(i), noisy(lang::var("y" + std::to_string(i - 1)), s));
    }
    std::vector<TermPtr> conditions;
    for (const auto& [i, c] : obs) {
        conditions.push_back(lang::cond(lang::var("y" + std::to_string(i)), lang::constant(c)));
    }
    const TermPtr result = vars("y", 0, n + 1);
    return {with_lets(lets, result), with_lets(lets, after(conditions, result))};
}

// ys ~ N(0, K) with K_ij = exp(-(i - j)^2 / (2 l^2)); returns (y0, ..., y_{n-1}).
ExamplePrograms rbf_process(const Params& p) {
    const std::size_t n = p.count("n");
    const double l = p.real("bandwidth");
    if (!(l > 0.0)) {
        throw std::invalid_argument("parameter bandwidth: must be positive");
    }
    const auto obs = p.observations("obs", n);
    Matrix k(n, n);
    for (std::size_t i = 0; i < n; i++) {
        for (std::size_t j = 0; j < n; j++) {
            const double d = double(i) - double(j);
            k(i, j) = std::exp(-d * d / (2.0 * l * l));
        }
    }
    TermPtr mean = lang::tuple(std::vector<TermPtr>(n, lang::constant(0.0)));
    std::vector<TermPtr> conditions;
    for (const auto& [i, c] : obs) {
        conditions.push_back(lang::cond(lang::var("y" + std::to_string(i)), lang::constant(c)));
    }
    auto build = [&](const std::vector<TermPtr>& conds) {
        TermPtr body = after(conds, vars("y", 0, n));
        if (n == 1) {
            return lang::let("y0", lang::normal_with(mean, k), body);
        }
        // let (y0, r0) = ys in let (y1, r1) = r0 in ... let (y_{n-2}, y_{n-1}) = r_{n-3}
        for (std::size_t i = n - 1; i-- > 0;) {
            const std::string rest = i + 2 == n ? "y" + std::to_string(n - 1) : "rest" + std::to_string(i);
            const TermPtr source = i == 0 ? lang::var("ys") : lang::var("rest" + std::to_string(i - 1));
            body = lang::let_pair("y" + std::to_string(i), rest, source, body);
        }
        return lang::let("ys", lang::normal_with(mean, k), body);
    };
    return {build({}), build(conditions)};
}

// x0 = xs[0] + N(0, x0_var), v0 = v0 + N(0, v0_var); then per step
// x_i = x_{i-1} + v_{i-1}, v_i = v_{i-1} + N(0, drift_var), x_i + N(0, obs_var) =:= xs[i].
// Returns (x0, ..., x_{m-1}, v0, ..., v_{m-1}).
ExamplePrograms kalman(const Params& p) {
    const std::vector<double> xs = p.list("xs");
    if (xs.empty()) {
        throw std::invalid_argument("parameter xs: empty");
    }
    const double x0_var = p.variance("x0_var");
    const double v0_var = p.variance("v0_var");
    const double drift = p.variance("drift_var");
    const double obs_var = p.variance("obs_var");
    const std::size_t m = xs.size();
    const TermPtr result = lang::pair(vars("x", 0, m), vars("v", 0, m));
    auto build = [&](bool conditioned) {
        TermPtr body = result;
        for (std::size_t i = m; i-- > 1;) {
            const std::string si = std::to_string(i);
            const std::string prev = std::to_string(i - 1);
            if (conditioned) {
                body = lang::seq(lang::cond(noisy(lang::var("x" + si), obs_var), lang::constant(xs[i])), body);
            }
            body = lang::let("v" + si, noisy(lang::var("v" + prev), drift), body);
            body = lang::let("x" + si, lang::add(lang::var("x" + prev), lang::var("v" + prev)), body);
        }
        return with_lets({{"x0", noisy(lang::constant(xs[0]), x0_var)},
                          {"v0", noisy(lang::constant(p.real("v0")), v0_var)}},
                         body);
    };
    return {build(false), build(true)};
}

// a, b ~ N(0, prior_var); a x + b =:= y + N(0, noise_var) for each pair; returns (a, b).
ExamplePrograms ridge(const Params& p) {
    const std::vector<double> xs = p.list("xs");
    const std::vector<double> ys = p.list("ys");
    if (xs.size() != ys.size()) {
        throw std::invalid_argument("parameters xs and ys differ in length");
    }
    const double prior = p.variance("prior_var");
    const double noise = p.variance("noise_var");
    const Lets lets{{"a", noisy(lang::constant(0.0), prior)}, {"b", noisy(lang::constant(0.0), prior)}};
    const TermPtr result = lang::pair(lang::var("a"), lang::var("b"));
    std::vector<TermPtr> conditions;
    for (std::size_t i = 0; i < xs.size(); i++) {
        const TermPtr f = lang::add(lang::scale(xs[i], lang::var("a")), lang::var("b"));
        conditions.push_back(lang::cond(f, noisy(lang::constant(ys[i]), noise)));
    }
    return {with_lets(lets, result), with_lets(lets, after(conditions, result))};
}

std::map<std::string, std::string> defaults_for(const ExampleSpec& spec) {
    if (spec.name == "randomwalk") {
        return kRandomWalkDefaults;
    }
    if (spec.name == "kriging") {
        const auto kernel = spec.params.find("kernel");
        std::map<std::string, std::string> d =
            kernel != spec.params.end() && kernel->second == "randomwalk" ? kRandomWalkDefaults : kRbfDefaults;
        d["kernel"] = "rbf";
        return d;
    }
    if (spec.name == "kalman") {
        return kKalmanDefaults;
    }
    if (spec.name == "ridge") {
        return kRidgeDefaults;
    }
    throw std::invalid_argument("unknown example '" + spec.name + "' (expected kriging, randomwalk, kalman, ridge)");
}

ExamplePrograms programs_for(const ExampleSpec& spec, const Params& p) {
    if (spec.name == "randomwalk") {
        return random_walk(p);
    }
    if (spec.name == "kriging") {
        const std::string& kernel = p.text("kernel");
        if (kernel == "rbf") {
            return rbf_process(p);
        }
        if (kernel == "randomwalk") {
            return random_walk(p);
        }
        throw std::invalid_argument("parameter kernel: expected rbf or randomwalk, got '" + kernel + "'");
    }
    if (spec.name == "kalman") {
        return kalman(p);
    }
    return ridge(p);
}

std::optional<GaussState> evaluate(const TermPtr& program) {
    return opsem::observable(opsem::run(lang::desugar(lang::typecheck(program))));
}

std::optional<GaussState> slice(const std::optional<GaussState>& s, std::size_t begin, std::size_t end) {
    if (!s) {
        return std::nullopt;
    }
    return gauss::marginal(*s, linalg::range(begin, end));
}

std::string number(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

}  // namespace

ExamplePrograms example_programs(const ExampleSpec& spec) {
    const Params p(spec, defaults_for(spec));
    return programs_for(spec, p);
}

ExampleResult run_example(const ExampleSpec& spec) {
    const Params p(spec, defaults_for(spec));
    const ExamplePrograms programs = programs_for(spec, p);
    const std::optional<GaussState> prior = evaluate(programs.prior);
    const std::optional<GaussState> post = evaluate(programs.posterior);

    ExampleResult result;
    result.summary = {{"example", spec.name}, {"params", p.to_json()}, {"status", post ? "ok" : "bot"}};
    if (spec.name == "kalman") {
        const std::size_t m = prior->dim() / 2;
        result.tables.push_back({"kalman.csv", slice(prior, 0, m), slice(post, 0, m)});
        result.tables.push_back({"kalman_velocity.csv", slice(prior, m, 2 * m), slice(post, m, 2 * m)});
    } else if (spec.name == "ridge") {
        result.tables.push_back({"ridge.csv", prior, post});
        const std::size_t points = p.count("grid_points");
        const double lo = p.real("grid_min");
        const double hi = p.real("grid_max");
        Matrix design(points, 2);
        json grid = json::array();
        for (std::size_t i = 0; i < points; i++) {
            const double x = points == 1 ? lo : lo + (hi - lo) * double(i) / double(points - 1);
            design(i, 0) = x;
            design(i, 1) = 1.0;
            grid.push_back(x);
        }
        const gauss::GaussMap line = gauss::affine(design, Vector(points));
        auto fit = [&](const std::optional<GaussState>& s) -> std::optional<GaussState> {
            if (!s) {
                return std::nullopt;
            }
            return gauss::push(line, *s);
        };
        result.tables.push_back({"ridge_fit.csv", fit(prior), fit(post)});
        result.summary["grid"] = grid;
        result.summary["columns"] = {"a", "b"};
    } else {
        result.tables.push_back({spec.name + ".csv", prior, post});
    }
    if (post) {
        result.summary["posterior"] = to_json(*post);
    }
    json files = json::array();
    for (const ExampleTable& t : result.tables) {
        files.push_back(t.file);
    }
    result.summary["tables"] = files;
    return result;
}

std::string to_csv(const ExampleTable& t) {
    std::string s = "index,prior_mean,prior_sd,post_mean,post_sd\n";
    const std::size_t n = t.prior ? t.prior->dim() : t.posterior ? t.posterior->dim() : 0;
    auto cells = [](const std::optional<GaussState>& g, std::size_t i) {
        if (!g) {
            return std::string("nan,nan");
        }
        return number(g->mean()[i]) + "," + number(std::sqrt(std::max(0.0, g->cov()(i, i))));
    };
    for (std::size_t i = 0; i < n; i++) {
        s += std::to_string(i) + "," + cells(t.prior, i) + "," + cells(t.posterior, i) + "\n";
    }
    return s;
}

CommandResult cmd_example(const ExampleSpec& spec, const std::filesystem::path& out) {
    ExampleResult result;
    try {
        result = run_example(spec);
    } catch (const std::invalid_argument& e) {
        return {kExitError, "", std::string(e.what()) + "\n"};
    }
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) {
        return {kExitError, "", "cannot create " + out.string() + ": " + ec.message() + "\n"};
    }
    std::string listing;
    auto write = [&](const std::string& file, const std::string& text) {
        const std::filesystem::path path = out / file;
        std::ofstream f(path);
        f << text;
        if (!f) {
            throw std::runtime_error("cannot write " + path.string());
        }
        listing += path.string() + "\n";
    };
    try {
        for (const ExampleTable& t : result.tables) {
            write(t.file, to_csv(t));
        }
        write(spec.name + ".json", result.summary.dump(2) + "\n");
    } catch (const std::runtime_error& e) {
        return {kExitError, listing, std::string(e.what()) + "\n"};
    }
    const bool ok = result.summary["status"] == "ok";
    return {ok ? kExitOk : kExitBot, listing, ""};
}

void parse_param(const std::string& kv, std::map<std::string, std::string>& params) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw std::invalid_argument("expected key=value, got '" + kv + "'");
    }
    params[kv.substr(0, eq)] = kv.substr(eq + 1);
}

}  // namespace exactcond::cli
