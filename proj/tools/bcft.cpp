// bcft: run scenario files and the self-test.
//
//   bcft cluster --scenario scenarios/cluster_q1.json --out results
//   bcft run --scenario scenarios/modular_su2_1.json
//   bcft selftest --parallel
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 schema error,
// 3 numerical guard error, 4 output not writable.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bcft/report.hpp"
#include "bcft/scenario.hpp"

namespace fs = std::filesystem;
using bcft::scenario::ExitCode;

namespace {

std::string default_out_dir()
{
    const char* env = std::getenv("BCFT_OUT_DIR");
    return env && *env ? env : ".";
}

int emit(const bcft::scenario::Outcome& out, const fs::path& dir, const std::string& stem)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    const auto json_path = dir / (stem + ".json");
    if (!bcft::report::write_file(json_path.string(), bcft::report::dump(out.summary))) {
        std::cerr << "bcft: cannot write " << json_path.string() << "\n";
        return ExitCode::unwritable_output;
    }
    std::cout << json_path.string() << "\n";
    if (out.csv) {
        const auto csv_path = dir / (stem + ".csv");
        if (!bcft::report::write_file(csv_path.string(), *out.csv)) {
            std::cerr << "bcft: cannot write " << csv_path.string() << "\n";
            return ExitCode::unwritable_output;
        }
        std::cout << csv_path.string() << "\n";
    }
    return out.exit_code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Boundary CFT numerical laboratory: Weyl correlators, cluster limits, vertex operators, modular data"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = default_out_dir();
    bcft::scenario::Overrides ov;
    double mu = 0.0, epsilon = 0.0;
    std::string grid, profile;
    bool parallel = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", scenario_path, "Scenario JSON file")->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "Output directory (default: $BCFT_OUT_DIR or .)");
        sub->add_option("--mu", mu, "IR scale mu (default 1)");
        sub->add_option("--epsilon", epsilon, "Vertex regulator (default 1e-8 times the position spread)");
        sub->add_option("--grid", grid, "Shift grid min:max:n in units of a (default 10/mu:1e4/mu:16)");
        sub->add_flag("--parallel", parallel, "Evaluate grids and ensembles on a worker pool");
        sub->add_option("--tolerance-profile", profile, "Quadrature profile (default fast)")->check(CLI::IsMember({"strict", "fast"}));
    };

    std::string command;
    CLI::App* run = app.add_subcommand("run", "Run the command named in the scenario file");
    add_common(run);
    run->callback([&] { command.clear(); });
    for (const auto& name : bcft::scenario::commands()) {
        auto* sub = app.add_subcommand(name, "Run a " + name + " scenario");
        add_common(sub);
        sub->callback([&, name] { command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    for (auto* sub : app.get_subcommands()) {
        if (sub->count("--mu")) ov.mu = mu;
        if (sub->count("--epsilon")) ov.epsilon = epsilon;
        if (sub->count("--tolerance-profile")) ov.tolerance_profile = profile;
        if (sub->count("--parallel")) ov.parallel = parallel;
        if (sub->count("--grid")) {
            try {
                ov.grid = bcft::scenario::parse_grid_text(grid);
            } catch (const bcft::io::SchemaError& e) {
                std::cerr << "bcft: " << e.what() << "\n";
                return ExitCode::schema_error;
            }
        }
    }

    bcft::report::json doc = bcft::report::json::object();
    std::string stem = command.empty() ? "scenario" : command;
    if (!scenario_path.empty()) {
        stem = fs::path(scenario_path).stem().string();
        std::ifstream in(scenario_path);
        std::stringstream buf;
        buf << in.rdbuf();
        try {
            doc = bcft::report::json::parse(buf.str());
        } catch (const bcft::report::json::parse_error& e) {
            bcft::scenario::Outcome bad;
            bad.summary = bcft::report::summary(command);
            bad.summary["passed"] = false;
            bad.summary["error"] = {{"name", "schema"}, {"pointer", ""}, {"message", e.what()}};
            bad.exit_code = ExitCode::schema_error;
            const int code = emit(bad, out_dir, stem);
            std::cerr << "bcft: scenario is not valid JSON\n";
            return code;
        }
    } else if (command != "selftest") {
        std::cerr << "bcft: --scenario is required for this command\n";
        return ExitCode::schema_error;
    }

    const auto outcome = bcft::scenario::run(doc, command, ov);
    if (outcome.summary.contains("error")) std::cerr << "bcft: " << outcome.summary["error"]["message"].get<std::string>() << "\n";
    return emit(outcome, out_dir, stem);
}
