#include "dirac/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace dirac {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where)
{
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw spec_error("unknown key \"" + it.key() + "\" in " + where);
        }
    }
}

double require_number(const json& obj, const std::string& key, const std::string& where)
{
    if (!obj.contains(key)) {
        throw spec_error("missing required key \"" + key + "\" in " + where);
    }
    if (!obj[key].is_number()) {
        throw spec_error("key \"" + key + "\" in " + where + " must be a number");
    }
    return obj[key].get<double>();
}

PotentialModel parse_potential(const json& p)
{
    if (!p.is_object()) {
        throw spec_error("\"potential\" must be an object");
    }
    reject_unknown_keys(p, {"family", "params", "r", "V"}, "potential");
    if (!p.contains("family") || !p["family"].is_string()) {
        throw spec_error("potential needs a \"family\" string");
    }
    potential_family fam = family_from_name(p["family"].get<std::string>());

    json params = p.value("params", json::object());
    if (!params.is_object()) {
        throw spec_error("potential \"params\" must be an object");
    }
    switch (fam) {
        case potential_family::coulomb:
            reject_unknown_keys(params, {"v"}, "potential params");
            return PotentialModel::coulomb(require_number(params, "v", "coulomb params"));
        case potential_family::hellmann:
            reject_unknown_keys(params, {"A", "B", "C"}, "potential params");
            return PotentialModel::hellmann(require_number(params, "A", "hellmann params"),
                                            require_number(params, "B", "hellmann params"),
                                            require_number(params, "C", "hellmann params"));
        case potential_family::laser_dressed_coulomb:
            reject_unknown_keys(params, {"v", "lambda"}, "potential params");
            return PotentialModel::laser_dressed_coulomb(
                require_number(params, "v", "laser_dressed_coulomb params"),
                require_number(params, "lambda", "laser_dressed_coulomb params"));
        case potential_family::tabulated_monotone: {
            reject_unknown_keys(params, {}, "potential params");
            if (!p.contains("r") || !p.contains("V") || !p["r"].is_array() ||
                !p["V"].is_array()) {
                throw spec_error("tabulated_monotone needs \"r\" and \"V\" arrays");
            }
            return PotentialModel::tabulated(p["r"].get<std::vector<double>>(),
                                             p["V"].get<std::vector<double>>());
        }
    }
    throw spec_error("unreachable potential family");
}

} // namespace

void apply_config_json(ShootingConfig& cfg, const nlohmann::json& obj)
{
    if (!obj.is_object()) {
        throw spec_error("\"config\" must be an object");
    }
    reject_unknown_keys(obj,
                        {"rtol", "atol", "energy_tol", "scan_points", "match_rule",
                         "match_fraction", "max_states", "max_refine_depth", "origin_eps",
                         "grid_refine", "parallel"},
                        "config");
    if (obj.contains("rtol")) cfg.rtol = obj["rtol"].get<double>();
    if (obj.contains("atol")) cfg.atol = obj["atol"].get<double>();
    if (obj.contains("energy_tol")) cfg.energy_tol = obj["energy_tol"].get<double>();
    if (obj.contains("scan_points")) cfg.scan_points = obj["scan_points"].get<int>();
    if (obj.contains("match_rule")) {
        std::string rule = obj["match_rule"].get<std::string>();
        if (rule == "turning_point") {
            cfg.match = match_rule::turning_point;
        } else if (rule == "fixed_fraction") {
            cfg.match = match_rule::fixed_fraction;
        } else {
            throw spec_error("config match_rule must be turning_point or fixed_fraction");
        }
    }
    if (obj.contains("match_fraction")) cfg.match_fraction = obj["match_fraction"].get<double>();
    if (obj.contains("max_states")) cfg.max_states = obj["max_states"].get<int>();
    if (obj.contains("max_refine_depth"))
        cfg.max_refine_depth = obj["max_refine_depth"].get<int>();
    if (obj.contains("origin_eps")) cfg.origin_eps = obj["origin_eps"].get<double>();
    if (obj.contains("grid_refine")) cfg.grid_refine = obj["grid_refine"].get<double>();
    if (obj.contains("parallel")) cfg.parallel = obj["parallel"].get<bool>();
    cfg.check();
}

ProblemDocument parse_problem_document(const nlohmann::json& doc)
{
    if (!doc.is_object()) {
        throw spec_error("problem document must be a JSON object");
    }
    reject_unknown_keys(doc, {"dimension", "mass", "potential", "j", "tau", "parity", "config",
                              "output"},
                        "problem document");

    ProblemDocument out;
    double dim = require_number(doc, "dimension", "problem document");
    if (dim != std::floor(dim) || dim < 1) {
        throw spec_error("\"dimension\" must be a positive integer");
    }
    out.spec.dimension = static_cast<int>(dim);
    out.spec.mass = require_number(doc, "mass", "problem document");
    if (!doc.contains("potential")) {
        throw spec_error("missing required key \"potential\" in problem document");
    }
    out.spec.potential = parse_potential(doc["potential"]);

    if (out.spec.dimension > 1) {
        out.spec.j = require_number(doc, "j", "problem document (required for d > 1)");
        double tau = require_number(doc, "tau", "problem document (required for d > 1)");
        if (tau != 1 && tau != -1) {
            throw spec_error("\"tau\" must be +1 or -1");
        }
        out.spec.tau = static_cast<int>(tau);
        if (doc.contains("parity")) {
            throw spec_error("\"parity\" applies only to d = 1 problems");
        }
    } else {
        if (doc.contains("j") || doc.contains("tau")) {
            throw spec_error("\"j\"/\"tau\" apply only to d > 1 problems");
        }
        if (doc.contains("parity")) {
            std::string par = doc["parity"].get<std::string>();
            if (par == "even") {
                out.spec.sector = parity_sector::u1_even;
            } else if (par == "odd") {
                out.spec.sector = parity_sector::u1_odd;
            } else {
                throw spec_error("\"parity\" must be \"even\" or \"odd\"");
            }
            out.parity_given = true;
        }
    }

    if (doc.contains("config")) {
        apply_config_json(out.config, doc["config"]);
    }
    if (doc.contains("output")) {
        const json& o = doc["output"];
        reject_unknown_keys(o, {"grid_refine", "psi2_scale"}, "output");
        if (o.contains("grid_refine")) {
            out.output.grid_refine = o["grid_refine"].get<double>();
            if (!(out.output.grid_refine >= 1.0)) {
                throw spec_error("output grid_refine must be >= 1");
            }
        }
        if (o.contains("psi2_scale")) {
            out.output.psi2_scale = o["psi2_scale"].get<double>();
            if (!(out.output.psi2_scale > 0)) {
                throw spec_error("output psi2_scale must be positive");
            }
        }
    }

    out.spec.check();
    return out;
}

ProblemDocument load_problem_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw spec_error("cannot open problem file \"" + path + "\"");
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw spec_error("problem file \"" + path + "\": " + e.what());
    }
    return parse_problem_document(doc);
}

std::string format_g17(double x)
{
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

nlohmann::json nodal_report_json(const NodalReport& report)
{
    json clauses = json::object();
    json details = json::object();
    for (const auto& [name, verdict] : report.clauses) {
        clauses[name] = verdict_name(verdict);
    }
    for (const auto& [name, text] : report.details) {
        details[name] = text;
    }
    return json{{"n1", report.n1},
                {"n2", report.n2},
                {"theorem_expected_n2", report.theorem_expected_n2},
                {"clauses", clauses},
                {"details", details},
                {"psi1_node_radii", report.psi1_nodes},
                {"psi2_node_radii", report.psi2_nodes}};
}

nlohmann::json solution_summary_json(const RadialSolution& sol, const NodalReport& report,
                                     const OutputControls& out)
{
    json j{{"E", sol.energy},
           {"n1", sol.n1},
           {"n2", sol.n2},
           {"beta", sol.beta},
           {"r_match", sol.r_match},
           {"matching_residual", sol.matching_residual},
           {"samples", sol.trajectory.size()},
           {"psi2_plot_scale", out.psi2_scale},
           {"nodal_report", nodal_report_json(report)}};
    if (sol.problem.dimension > 1) {
        j["k_d"] = sol.k_d;
    } else {
        j["k_d"] = nullptr;
        j["parity"] = sol.problem.sector == parity_sector::u1_even ? "even" : "odd";
    }
    if (sol.r_c) {
        j["r_c"] = *sol.r_c;
    } else {
        j["r_c"] = nullptr;
    }
    return j;
}

nlohmann::json spectrum_json(const std::vector<RadialSolution>& states)
{
    json list = json::array();
    for (const auto& s : states) {
        list.push_back(json{{"E", s.energy}, {"n1", s.n1}, {"n2", s.n2}});
    }
    return list;
}

nlohmann::json sweep_report_json(const SweepResult& result)
{
    json entries = json::array();
    for (const auto& e : result.entries) {
        json row{{"d", e.prob.dimension}, {"n1", e.target_n1}};
        if (e.prob.dimension > 1) {
            row["j"] = e.prob.j;
            row["tau"] = e.prob.tau;
        } else {
            row["parity"] = e.prob.sector == parity_sector::u1_even ? "even" : "odd";
        }
        switch (e.status) {
            case sweep_status::solved:
                row["status"] = "solved";
                row["E"] = e.energy;
                row["report"] = nodal_report_json(e.report);
                break;
            case sweep_status::skipped:
                row["status"] = "skipped";
                row["note"] = e.note;
                break;
            case sweep_status::failed:
                row["status"] = "failed";
                row["note"] = e.note;
                break;
        }
        entries.push_back(std::move(row));
    }
    return json{{"solved", result.solved},
                {"skipped", result.skipped},
                {"failed", result.failed},
                {"theorem_failures", result.theorem_failures},
                {"entries", entries}};
}

std::string solution_csv(const RadialSolution& sol)
{
    std::string out = "r,psi1,psi2,W2\n";
    const Trajectory& tr = sol.trajectory;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        double W2v = w2(sol.problem, sol.energy, tr.r[i]);
        out += format_g17(tr.r[i]);
        out += ',';
        out += format_g17(tr.psi1[i]);
        out += ',';
        out += format_g17(tr.psi2[i]);
        out += ',';
        out += format_g17(W2v);
        out += '\n';
    }
    return out;
}

std::string orbit_csv(const OrbitTrace& trace)
{
    std::string out = "r,psi1,psi2,phi,riccati_residual\n";
    for (std::size_t i = 0; i < trace.r.size(); ++i) {
        out += format_g17(trace.r[i]);
        out += ',';
        out += format_g17(trace.psi1[i]);
        out += ',';
        out += format_g17(trace.psi2[i]);
        out += ',';
        out += format_g17(trace.phi[i]);
        out += ',';
        out += format_g17(trace.riccati_residual[i]);
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw spec_error("cannot write \"" + path + "\"");
    }
    out << content;
    if (!out) {
        throw spec_error("short write to \"" + path + "\"");
    }
}

} // namespace dirac
