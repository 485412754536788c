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

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "exactcond/cli.hpp"

namespace {

namespace cli = exactcond::cli;

bool read_file(const std::string& path, std::string& text) {
    std::ifstream f(path);
    if (!f) {
        std::cerr << path << ": cannot open\n";
        return false;
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    text = ss.str();
    return true;
}

int emit(const cli::CommandResult& r) {
    std::cout << r.out;
    std::cerr << r.err;
    return r.exit_code;
}

bool apply_tolerance() {
    const char* env = std::getenv("GAUSS_TOL");
    if (!env) {
        return true;
    }
    char* end = nullptr;
    const double tol = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(tol > 0.0)) {
        std::cerr << "GAUSS_TOL: expected a positive number, got '" << env << "'\n";
        return false;
    }
    exactcond::linalg::set_support_tolerance(tol);
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact conditioning for Gaussian programs"};
    app.require_subcommand(1);

    std::string file;
    std::string file2;
    std::string context;
    bool trace = false;
    bool as_json = false;

    CLI::App* run = app.add_subcommand("run", "Run a closed program and print its posterior");
    run->add_option("file", file, "Program file")->required();
    run->add_flag("--trace", trace, "Print every configuration");
    run->add_flag("--json", as_json, "JSON output");

    CLI::App* equiv = app.add_subcommand("equiv", "Decide observational equivalence of two programs");
    equiv->add_option("first", file, "First program")->required();
    equiv->add_option("second", file2, "Second program")->required();
    equiv->add_option("--context", context, "Typing context, e.g. 'x:R, y:R'");

    CLI::App* normalize = app.add_subcommand("normalize", "Print the normal form of a program");
    normalize->add_option("file", file, "Program file")->required();
    normalize->add_option("--context", context, "Typing context, e.g. 'x:R, y:R'");
    normalize->add_flag("--json", as_json, "JSON output");

    std::string name;
    std::vector<std::string> params;
    std::string out;
    CLI::App* example = app.add_subcommand("example", "Write an example's prior and posterior as CSV");
    example->add_option("name", name, "kriging, randomwalk, kalman or ridge")->required();
    example->add_option("--param", params, "Parameter k=v (repeatable)");
    example->add_option("--out", out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kExitError;
    }
    if (!apply_tolerance()) {
        return cli::kExitError;
    }

    exactcond::lang::Context ctx;
    if (!context.empty()) {
        try {
            ctx = exactcond::lang::parse_context(context);
        } catch (const std::exception& e) {
            std::cerr << "--context: " << e.what() << "\n";
            return cli::kExitError;
        }
    }

    std::string text;
    std::string text2;
    if (*run) {
        if (!read_file(file, text)) {
            return cli::kExitError;
        }
        return emit(cli::cmd_run(text, trace, as_json, file));
    }
    if (*equiv) {
        if (!read_file(file, text) || !read_file(file2, text2)) {
            return cli::kExitError;
        }
        return emit(cli::cmd_equiv(text, text2, ctx, file, file2));
    }
    if (*normalize) {
        if (!read_file(file, text)) {
            return cli::kExitError;
        }
        return emit(cli::cmd_normalize(text, ctx, as_json, file));
    }
    cli::ExampleSpec spec{name, {}};
    try {
        for (const std::string& kv : params) {
            cli::parse_param(kv, spec.params);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "--param: " << e.what() << "\n";
        return cli::kExitError;
    }
    return emit(cli::cmd_example(spec, out));
}
