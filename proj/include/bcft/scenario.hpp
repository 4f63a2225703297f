#pragma once

// Scenario runner behind the command-line tool. A scenario document is
//     {"command": "...", "config": {...}, <payload fields>}
// and produces a JSON summary plus, for cluster scans, a CSV table.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "bcft/acceptance.hpp"
#include "bcft/cluster.hpp"
#include "bcft/json_io.hpp"
#include "bcft/modular.hpp"
#include "bcft/report.hpp"
#include "bcft/vertex.hpp"
#include "bcft/weyl.hpp"

namespace bcft::scenario {

using json = report::json;

enum ExitCode : int { ok = 0, checks_failed = 1, schema_error = 2, guard_error = 3, unwritable_output = 4 };

inline const std::vector<std::string>& commands()
{
    static const std::vector<std::string> c{"correlate", "cluster", "vertex", "locality", "modular", "selftest"};
    return c;
}

struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    std::size_t n = 0;
};

/// Settings from the scenario's "config" object, then command-line flags.
struct Config {
    double mu = 1.0;
    std::optional<double> epsilon;
    std::string tolerance_profile = "fast";
    bool parallel = false;
    std::optional<GridSpec> grid;
    QuadratureConfig quadrature{};
};

struct Overrides {
    std::optional<double> mu;
    std::optional<double> epsilon;
    std::optional<std::string> tolerance_profile;
    std::optional<bool> parallel;
    std::optional<GridSpec> grid;
};

struct Outcome {
    int exit_code = ExitCode::ok;
    json summary;
    std::optional<std::string> csv;
};

inline GridSpec parse_grid_text(const std::string& text)
{
    const auto a = text.find(':'), b = text.rfind(':');
    if (a == std::string::npos || a == b) throw io::SchemaError("/config/grid", "grid must look like min:max:n");
    try {
        GridSpec g;
        g.min = std::stod(text.substr(0, a));
        g.max = std::stod(text.substr(a + 1, b - a - 1));
        const long n = std::stol(text.substr(b + 1));
        if (n < 2) throw io::SchemaError("/config/grid", "grid needs at least 2 points");
        g.n = static_cast<std::size_t>(n);
        if (!(g.min > 0.0 && g.max > g.min)) throw io::SchemaError("/config/grid", "grid needs 0 < min < max");
        return g;
    } catch (const std::logic_error&) {
        throw io::SchemaError("/config/grid", "grid must look like min:max:n");
    }
}

inline GridSpec parse_grid(const json& j, const std::string& ptr)
{
    if (j.is_string()) return parse_grid_text(j.get<std::string>());
    const double lo = io::positive_field(j, "min", ptr), hi = io::positive_field(j, "max", ptr);
    const auto& n = io::require(j, "n", ptr);
    if (!n.is_number_integer() || n.get<long long>() < 2) throw io::SchemaError(ptr + "/n", "expected an integer >= 2");
    if (!(hi > lo)) throw io::SchemaError(ptr + "/max", "must exceed min");
    return {lo, hi, static_cast<std::size_t>(n.get<long long>())};
}

inline QuadratureConfig profile_config(const std::string& name, const std::string& ptr)
{
    if (name == "fast") return QuadratureConfig::fast();
    if (name == "strict") return QuadratureConfig::strict();
    throw io::SchemaError(ptr, "tolerance profile must be 'strict' or 'fast'");
}

inline Config resolve_config(const json& doc, const Overrides& ov)
{
    Config c;
    json file = json::object();
    if (doc.contains("config")) {
        file = doc["config"];
        io::expect_object(file, "/config");
    }
    if (auto mu = io::optional_number(file, "mu", "/config")) c.mu = *mu;
    c.epsilon = io::optional_number(file, "epsilon", "/config");
    if (file.contains("tolerance_profile")) c.tolerance_profile = io::string_field(file, "tolerance_profile", "/config");
    if (file.contains("parallel")) {
        if (!file["parallel"].is_boolean()) throw io::SchemaError("/config/parallel", "expected a boolean");
        c.parallel = file["parallel"].get<bool>();
    }
    if (file.contains("grid")) c.grid = parse_grid(file["grid"], "/config/grid");

    if (ov.mu) c.mu = *ov.mu;
    if (ov.epsilon) c.epsilon = ov.epsilon;
    if (ov.tolerance_profile) c.tolerance_profile = *ov.tolerance_profile;
    if (ov.parallel) c.parallel = *ov.parallel;
    if (ov.grid) c.grid = ov.grid;

    if (!(c.mu > 0.0)) throw io::SchemaError("/config/mu", "must be positive");
    if (c.epsilon && !(*c.epsilon > 0.0)) throw io::SchemaError("/config/epsilon", "must be positive");
    c.quadrature = profile_config(c.tolerance_profile, "/config/tolerance_profile");

    if (file.contains("quadrature")) {
        const auto& q = file["quadrature"];
        io::expect_object(q, "/config/quadrature");
        auto int_field = [&](const char* key, int& dst) {
            if (!q.contains(key)) return;
            const auto& v = q[key];
            if (!v.is_number_integer() || v.get<long long>() < 1)
                throw io::SchemaError(std::string("/config/quadrature/") + key, "expected a positive integer");
            dst = static_cast<int>(v.get<long long>());
        };
        int_field("order", c.quadrature.order);
        int_field("panels_per_width", c.quadrature.panels_per_width);
        int_field("grading_levels", c.quadrature.grading_levels);
        int_field("tail_panels", c.quadrature.tail_panels);
    }
    return c;
}

/// Config echo; the parallel flag is left out so reports match across modes.
inline json config_json(const Config& c)
{
    json j;
    j["mu"] = c.mu;
    j["epsilon"] = c.epsilon ? json(*c.epsilon) : json(nullptr);
    j["tolerance_profile"] = c.tolerance_profile;
    j["quadrature_order"] = c.quadrature.order;
    if (c.grid) j["grid"] = {{"min", c.grid->min}, {"max", c.grid->max}, {"n", c.grid->n}};
    return j;
}

struct Checks {
    json list = json::array();
    bool all = true;

    void add(const std::string& name, bool passed)
    {
        list.push_back({{"name", name}, {"passed", passed}});
        all = all && passed;
    }
};

inline json run_correlate(const json& doc, const Config& c, Checks& checks)
{
    const auto& fs = io::array_field(doc, "factors", "");
    std::vector<SmearedFunction> factors;
    for (std::size_t i = 0; i < fs.size(); ++i) factors.push_back(io::parse_test_function(fs[i], io::child("/factors", i)));
    bool neutral = true;
    for (const auto& f : factors) neutral = neutral && f.is_neutral();

    json r;
    r["factors"] = factors.size();
    r["neutral"] = neutral;
    if (neutral) {
        const weyl::WeylWord word(factors);
        const auto v = weyl::n_point(word, c.quadrature);
        const auto folded = word.folded(c.quadrature);
        const cplx via = folded.factors().empty()
            ? folded.phase()
            : folded.phase() * weyl::vacuum_expectation(folded.factors()[0], c.quadrature).value;
        r["value"] = report::complex_json(v.value);
        r["weyl_fold_error"] = std::abs(v.value - via);
        checks.add("weyl_fold", std::abs(v.value - via) < 1e-10);
    } else {
        const auto v = cluster::charged_ensemble_correlator(factors, c.mu, c.quadrature);
        const auto w = cluster::charged_ensemble_correlator(factors, 10.0 * c.mu, c.quadrature);
        const double change = acceptance::rel(w.value, v.value);
        r["value"] = report::complex_json(v.value);
        r["mu_change"] = change;
        checks.add("mu_independence", change < 1e-6);
    }
    return r;
}

inline json run_cluster(const json& doc, const Config& c, Checks& checks, std::optional<std::string>& csv)
{
    const auto& os = io::array_field(doc, "operators", "");
    std::vector<BoundaryOperator> ops;
    for (std::size_t i = 0; i < os.size(); ++i) ops.push_back(io::parse_boundary_operator(os[i], io::child("/operators", i)));
    if (ops.empty()) throw io::SchemaError("/operators", "expected at least one operator");
    const GridSpec g = c.grid.value_or(GridSpec{10.0 / c.mu, 1e4 / c.mu, 16});
    const auto grid = cluster::log_grid(g.min, g.max, g.n);

    std::optional<cluster::FitWindow> window;
    if (doc.contains("fit_window")) {
        const auto& w = doc["fit_window"];
        if (!w.is_array() || w.size() != 2 || !w[0].is_number_unsigned() || !w[1].is_number_unsigned())
            throw io::SchemaError("/fit_window", "expected [begin, end] indices");
        window = cluster::FitWindow{w[0].get<std::size_t>(), w[1].get<std::size_t>()};
        if (window->end > grid.size() || window->begin >= window->end) throw io::SchemaError("/fit_window", "window outside the grid");
    }

    const auto rep = cluster::factorization_check(ops, grid, c.mu, window, c.parallel, c.quadrature);
    cluster::ClusterScan scan;
    scan.operators = ops;
    scan.a_grid = grid;
    scan.mu = c.mu;
    scan.fit_window = window.value_or(cluster::default_window(grid.size()));
    for (const auto& row : rep.rows) scan.values.push_back(row.shifted);
    scan.fitted_exponent = cluster::cluster_scan_fit(scan);

    std::vector<report::CsvRow> rows;
    for (const auto& row : rep.rows) rows.push_back({row.a, row.shifted, row.deficit});
    csv = report::csv(rows);

    json r;
    r["total_charge"] = rep.total_charge;
    r["limit_is_zero"] = rep.limit_is_zero;
    r["expected_exponent"] = -rep.total_charge * rep.total_charge;
    r["fitted_exponent"] = scan.fitted_exponent;
    r["fit_window"] = {scan.fit_window.begin, scan.fit_window.end};
    if (!rep.limit_is_zero) {
        r["factorized"] = report::complex_json(rep.factorized);
        r["final_deficit"] = rep.rows.back().deficit;
        r["deficit_rate"] = rep.deficit_rate ? json(*rep.deficit_rate) : json(nullptr);
    }
    r["degenerate"] = rep.degenerate;
    r["note"] = rep.note;
    r["rows"] = rep.rows.size();

    const double Q2 = rep.total_charge * rep.total_charge;
    if (rep.limit_is_zero) {
        checks.add("decay_exponent", std::abs(scan.fitted_exponent + Q2) <= 0.01 * Q2);
    } else {
        checks.add("flat_tail", std::abs(scan.fitted_exponent) <= 0.01);
        checks.add("factorization_deficit", rep.rows.back().deficit < 1e-3);
    }
    return r;
}

inline json run_vertex(const json& doc, const Config& c, Checks& checks)
{
    const auto ens = io::parse_vertex_ensemble(doc, "", c.epsilon);
    const cplx v = vertex::vertex_correlator(ens);
    json r;
    r["entries"] = ens.size();
    r["total_charge"] = ens.total_charge();
    r["neutral"] = ens.is_neutral();
    r["epsilon"] = ens.epsilon();
    r["value"] = report::complex_json(v);
    json scan = json::array();
    for (double f : {1.0, 0.1, 0.01}) {
        const cplx w = vertex::vertex_correlator(vertex::VertexEnsemble(ens.entries(), f * ens.epsilon()));
        scan.push_back({{"epsilon", f * ens.epsilon()}, {"value", report::complex_json(w)}});
    }
    r["epsilon_scan"] = scan;
    checks.add("charge_conservation", ens.is_neutral() || (v.real() == 0.0 && v.imag() == 0.0));
    return r;
}

inline json run_locality(const json& doc, Checks& checks)
{
    std::vector<std::pair<vertex::BulkField, vertex::BulkField>> pairs;
    if (doc.contains("pairs")) {
        const auto& ps = io::array_field(doc, "pairs", "");
        for (std::size_t i = 0; i < ps.size(); ++i) {
            const auto p = io::child("/pairs", i);
            if (!ps[i].is_array() || ps[i].size() != 2) throw io::SchemaError(p, "expected a pair of fields");
            pairs.emplace_back(io::parse_bulk_field(ps[i][0], p + "/0"), io::parse_bulk_field(ps[i][1], p + "/1"));
        }
    } else if (doc.contains("fields")) {
        const auto& fs = io::array_field(doc, "fields", "");
        if (fs.size() != 2) throw io::SchemaError("/fields", "expected two fields");
        pairs.emplace_back(io::parse_bulk_field(fs[0], "/fields/0"), io::parse_bulk_field(fs[1], "/fields/1"));
    }
    bool su2 = false;
    if (doc.contains("su2_level1")) {
        if (!doc["su2_level1"].is_boolean()) throw io::SchemaError("/su2_level1", "expected a boolean");
        su2 = doc["su2_level1"].get<bool>();
    }
    if (pairs.empty() && !su2) throw io::SchemaError("/pairs", "expected field pairs or su2_level1");

    json r;
    json out = json::array();
    bool well_formed = true;
    for (const auto& [f1, f2] : pairs) {
        const auto res = vertex::locality_phase_sum(f1, f2);
        well_formed = well_formed && (res.S == -2 || res.S == 0 || res.S == 2) && std::abs(std::abs(res.phase) - 1.0) < 1e-12;
        out.push_back({{"S", res.S}, {"qq", res.qq}, {"phase", report::complex_json(res.phase)}, {"commute", res.commute}});
    }
    r["pairs"] = out;
    if (!pairs.empty()) checks.add("phase_sum_well_formed", well_formed);
    if (su2) {
        const auto rep = vertex::su2_level1_check();
        json cs = json::array();
        for (const auto& ck : rep.checks)
            cs.push_back({{"name", ck.name}, {"passed", ck.passed}, {"expected_failure", ck.expected_failure}, {"detail", ck.detail}});
        r["su2_level1"] = {{"ok", rep.ok}, {"checks", cs}};
        checks.add("su2_level1", rep.ok);
    }
    return r;
}

inline json run_modular(const json& doc, Checks& checks)
{
    const auto model = io::parse_model(doc, "");
    const auto check = modular::validate(model);
    const int n = model.n_sectors;
    const auto z = doc.contains("Z") ? io::parse_z(doc["Z"], "/Z") : modular::ZMatrix::identity(n);
    if (z.size() != n) throw io::SchemaError("/Z", "matrix must be " + std::to_string(n) + " x " + std::to_string(n));

    json r;
    r["model"] = model.label;
    r["sectors"] = n;
    r["central_charge"] = model.c;
    r["model_valid"] = check.ok;
    const auto zv = modular::is_modular_invariant(z, model);
    r["Z_modular_invariant"] = zv.modular_invariant;
    checks.add("model_valid", check.ok);
    if (doc.contains("Ztilde")) {
        const auto zt = io::parse_z(doc["Ztilde"], "/Ztilde");
        if (zt.size() != n) throw io::SchemaError("/Ztilde", "matrix must be " + std::to_string(n) + " x " + std::to_string(n));
        const auto h = modular::haag_duality_obstruction(zt, z, model);
        r["v"] = h.v;
        r["modular_invariant"] = h.ztilde_modular_invariant;
        r["conclusion"] = h.conclusion;
        r["strictness_bound"] = h.equal ? json(nullptr) : json(h.strictness_bound);
        checks.add("obstruction_consistent", h.equal ? std::abs(h.v - 1.0) < 1e-9 : h.obstruction && !h.ztilde_modular_invariant);
    } else {
        r["modular_invariant"] = zv.modular_invariant;
    }
    return r;
}

inline json run_selftest(const Config& c, Checks& checks)
{
    acceptance::Options o;
    o.parallel = c.parallel;
    o.cfg = c.quadrature;
    const auto results = acceptance::run_all(o);
    for (const auto& res : results) checks.add(std::to_string(res.id) + "-" + res.name, res.passed);
    return {{"criteria", acceptance::details_json(results)}};
}

/// Runs a parsed scenario document. `command` comes from the subcommand and
/// must agree with the document's "command" field when both are present.
inline Outcome run(const json& doc, std::string command, const Overrides& ov)
{
    Outcome out;
    out.summary = report::summary(command);
    try {
        io::expect_object(doc, "");
        if (doc.contains("command")) {
            if (!doc["command"].is_string()) throw io::SchemaError("/command", "expected a string");
            const auto file_cmd = doc["command"].get<std::string>();
            if (command.empty()) command = file_cmd;
            else if (file_cmd != command)
                throw io::SchemaError("/command", "scenario is for '" + file_cmd + "', not '" + command + "'");
        }
        if (std::find(commands().begin(), commands().end(), command) == commands().end())
            throw io::SchemaError("/command", "unknown command '" + command + "'");
        out.summary["command"] = command;
        const Config c = resolve_config(doc, ov);
        out.summary["config"] = config_json(c);

        Checks checks;
        json results;
        if (command == "correlate") results = run_correlate(doc, c, checks);
        else if (command == "cluster") results = run_cluster(doc, c, checks, out.csv);
        else if (command == "vertex") results = run_vertex(doc, c, checks);
        else if (command == "locality") results = run_locality(doc, checks);
        else if (command == "modular") results = run_modular(doc, checks);
        else results = run_selftest(c, checks);

        out.summary["results"] = results;
        out.summary["checks"] = checks.list;
        out.summary["passed"] = checks.all;
        out.exit_code = checks.all ? ExitCode::ok : ExitCode::checks_failed;
    } catch (const io::SchemaError& e) {
        out.csv.reset();
        out.summary["passed"] = false;
        out.summary["error"] = {{"name", "schema"}, {"pointer", e.pointer()}, {"message", e.what()}};
        out.exit_code = ExitCode::schema_error;
    } catch (const Error& e) {
        out.csv.reset();
        out.summary["passed"] = false;
        out.summary["error"] = {{"name", e.name()}, {"message", e.what()}};
        out.exit_code = ExitCode::guard_error;
    }
    return out;
}

}  // namespace bcft::scenario
