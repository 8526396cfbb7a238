// Command-line front end: solve | spectrum | verify | orbit.
//
// Exit codes: 0 ok, 1 theorem violation, 2 state not found,
// 3 input/validation error, 4 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dirac/serialize.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using nlohmann::json;

namespace {

struct GlobalArgs {
    std::string config_path;
    int jobs = 0;
    bool quiet = false;
};

std::string strip_csv_suffix(const std::string& path)
{
    if (path.size() > 4 && path.substr(path.size() - 4) == ".csv") {
        return path.substr(0, path.size() - 4);
    }
    return path;
}

dirac::ProblemDocument load_document(const std::string& spec_path, const GlobalArgs& g)
{
    dirac::ProblemDocument doc = dirac::load_problem_file(spec_path);
    if (!g.config_path.empty()) {
        std::ifstream in(g.config_path);
        if (!in) {
            throw dirac::spec_error("cannot open config file \"" + g.config_path + "\"");
        }
        json obj;
        try {
            in >> obj;
        } catch (const json::parse_error& e) {
            throw dirac::spec_error("config file \"" + g.config_path + "\": " + e.what());
        }
        dirac::apply_config_json(doc.config, obj);
    }
    return doc;
}

void require_valid_potential(const dirac::ProblemDocument& doc)
{
    auto rep = dirac::validate(doc.spec.potential, dirac::default_validation_grid(doc.spec.mass));
    if (!rep.pass()) {
        throw dirac::spec_error("potential fails the bound-state hypotheses: " + rep.detail);
    }
}

int run_solve(const std::string& spec_path, int n1, const std::string& parity,
              const std::string& out_prefix, const GlobalArgs& g)
{
    dirac::ProblemDocument doc = load_document(spec_path, g);
    if (!parity.empty()) {
        if (doc.spec.dimension != 1) {
            throw dirac::spec_error("--parity applies only to d = 1 problems");
        }
        doc.spec.sector = (parity == "even") ? dirac::parity_sector::u1_even
                                             : dirac::parity_sector::u1_odd;
    } else if (doc.spec.dimension == 1 && !doc.parity_given) {
        // The full-line label fixes the sector.
        doc.spec.sector =
            (n1 % 2 == 0) ? dirac::parity_sector::u1_even : dirac::parity_sector::u1_odd;
    }
    require_valid_potential(doc);

    dirac::ShootingConfig cfg = doc.config;
    cfg.grid_refine = std::max(cfg.grid_refine, doc.output.grid_refine);
    dirac::RadialSolution sol = dirac::solve_state(doc.spec, n1, cfg);
    dirac::NodalReport report = dirac::verify_structure(sol);

    if (!out_prefix.empty()) {
        std::string prefix = strip_csv_suffix(out_prefix);
        dirac::write_file(prefix + ".csv", dirac::solution_csv(sol));
        dirac::write_file(prefix + ".json",
                          dirac::solution_summary_json(sol, report, doc.output).dump(2) + "\n");
    }
    if (!g.quiet) {
        std::printf("E = %.10f  n1 = %d  n2 = %d  theorem %s\n", sol.energy, sol.n1, sol.n2,
                    report.theorem_pass() ? "pass" : "FAIL");
    }
    return 0;
}

int run_spectrum(const std::string& spec_path, int max_states, const std::string& out_path,
                 const GlobalArgs& g)
{
    dirac::ProblemDocument doc = load_document(spec_path, g);
    require_valid_potential(doc);
    dirac::ShootingConfig cfg = doc.config;
    if (max_states > 0) cfg.max_states = max_states;

    std::vector<dirac::RadialSolution> states;
    if (doc.spec.dimension == 1 && !doc.parity_given) {
        // Merge both parity sectors into the full-line spectrum.
        for (auto sector : {dirac::parity_sector::u1_even, dirac::parity_sector::u1_odd}) {
            dirac::ProblemSpec p = doc.spec;
            p.sector = sector;
            auto part = dirac::solve_spectrum(p, cfg);
            states.insert(states.end(), part.begin(), part.end());
        }
        std::sort(states.begin(), states.end(),
                  [](const auto& a, const auto& b) { return a.energy < b.energy; });
        if (states.size() > static_cast<std::size_t>(cfg.max_states)) {
            states.resize(static_cast<std::size_t>(cfg.max_states));
        }
    } else {
        states = dirac::solve_spectrum(doc.spec, cfg);
    }

    std::string text = dirac::spectrum_json(states).dump(2) + "\n";
    if (!out_path.empty()) {
        dirac::write_file(out_path, text);
    }
    if (!g.quiet) {
        std::fputs(text.c_str(), stdout);
    }
    return 0;
}

int run_verify(const std::string& spec_path, const std::string& sweep_text,
               const std::string& out_path, const GlobalArgs& g)
{
    dirac::ProblemDocument doc = load_document(spec_path, g);
    dirac::SweepSpec sweep = dirac::parse_sweep(sweep_text);
    dirac::SweepResult result =
        dirac::run_sweep(doc.spec.potential, doc.spec.mass, sweep, doc.config, g.jobs);

    if (!g.quiet) {
        std::printf("%-4s %-5s %-4s %-4s %-8s %-12s %s\n", "d", "j", "tau", "n1", "status", "E",
                    "clauses");
        for (const auto& e : result.entries) {
            std::string jtxt = e.prob.dimension > 1 ? std::to_string(e.prob.j) : "-";
            std::string tau = e.prob.dimension > 1 ? (e.prob.tau > 0 ? "+1" : "-1") : "-";
            if (e.prob.dimension == 1) {
                jtxt = e.prob.sector == dirac::parity_sector::u1_even ? "even" : "odd";
            }
            if (e.status == dirac::sweep_status::solved) {
                std::string clauses;
                for (const auto& [name, verdict] : e.report.clauses) {
                    clauses += name + "=" + dirac::verdict_name(verdict) + " ";
                }
                std::printf("%-4d %-5.5s %-4s %-4d %-8s %-12.8f %s\n", e.prob.dimension,
                            jtxt.c_str(), tau.c_str(), e.target_n1, "solved", e.energy,
                            clauses.c_str());
            } else {
                const char* status =
                    e.status == dirac::sweep_status::skipped ? "skipped" : "FAILED";
                std::printf("%-4d %-5.5s %-4s %-4d %-8s %-12s %s\n", e.prob.dimension,
                            jtxt.c_str(), tau.c_str(), e.target_n1, status, "-", e.note.c_str());
            }
        }
        std::printf("solved %d, skipped %d, failed %d, theorem failures %d\n", result.solved,
                    result.skipped, result.failed, result.theorem_failures);
    }
    if (!out_path.empty()) {
        dirac::write_file(out_path, dirac::sweep_report_json(result).dump(2) + "\n");
    }
    if (result.theorem_failures > 0) {
        for (const auto& e : result.entries) {
            if (e.status == dirac::sweep_status::solved && !e.report.theorem_pass()) {
                std::fprintf(stderr,
                             "theorem violation: d=%d j=%g tau=%d n1=%d (E=%.10f, n2=%d, "
                             "expected %d)\n",
                             e.prob.dimension, e.prob.j, e.prob.tau, e.target_n1, e.energy,
                             e.report.n2, e.report.theorem_expected_n2);
            }
        }
        return 1;
    }
    if (result.failed > 0) {
        return 4;
    }
    return 0;
}

int run_orbit(const std::string& spec_path, int n1, const std::string& parity,
              const std::string& out_prefix, const GlobalArgs& g)
{
    dirac::ProblemDocument doc = load_document(spec_path, g);
    if (!parity.empty()) {
        if (doc.spec.dimension != 1) {
            throw dirac::spec_error("--parity applies only to d = 1 problems");
        }
        doc.spec.sector = (parity == "even") ? dirac::parity_sector::u1_even
                                             : dirac::parity_sector::u1_odd;
    } else if (doc.spec.dimension == 1 && !doc.parity_given) {
        doc.spec.sector =
            (n1 % 2 == 0) ? dirac::parity_sector::u1_even : dirac::parity_sector::u1_odd;
    }
    require_valid_potential(doc);

    dirac::ShootingConfig cfg = doc.config;
    cfg.grid_refine = std::max(cfg.grid_refine, doc.output.grid_refine);
    dirac::RadialSolution sol = dirac::solve_state(doc.spec, n1, cfg);
    dirac::OrbitTrace trace = dirac::orbit_trace(sol);

    std::string prefix = strip_csv_suffix(out_prefix);
    dirac::write_file(prefix + ".csv", dirac::orbit_csv(trace));
    json sidecar{{"E", sol.energy},
                 {"n1", sol.n1},
                 {"n2", sol.n2},
                 {"crossings", trace.crossings},
                 {"rotation", dirac::verdict_name(trace.rotation)},
                 {"rotation_detail", trace.rotation_detail}};
    dirac::write_file(prefix + ".json", sidecar.dump(2) + "\n");

    if (!g.quiet) {
        std::printf("E = %.10f  n1 = %d  n2 = %d  %s\n", sol.energy, sol.n1, sol.n2,
                    trace.rotation_detail.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bound states of the radial Dirac equation in d >= 1 dimensions "
                 "with nodal-structure verification"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    GlobalArgs g;
    app.add_option("--config", g.config_path, "JSON file with solver config overrides");
    app.add_option("--jobs", g.jobs, "Thread budget for sweeps and scans (0 = default)");
    app.add_flag("--quiet", g.quiet, "Suppress normal console output");

    std::string spec_path, out_path, parity, sweep_text = "d=1..6,j=0.5..2.5,tau=+-1,n1=0..4";
    int n1 = 0, max_states = 0;

    CLI::App* solve = app.add_subcommand("solve", "Solve one bound state by node label");
    solve->add_option("spec", spec_path, "Problem document (JSON)")->required();
    solve->add_option("--n1", n1, "Target node count of the upper component")->required();
    solve->add_option("--parity", parity, "d = 1 sector of u1 (even|odd)")
        ->check(CLI::IsMember({"even", "odd"}));
    solve->add_option("--out", out_path, "Output prefix (.csv and .json are written)");

    CLI::App* spectrum = app.add_subcommand("spectrum", "List bound states");
    spectrum->add_option("spec", spec_path, "Problem document (JSON)")->required();
    spectrum->add_option("--max-states", max_states, "Cap on the number of reported states");
    spectrum->add_option("--out", out_path, "Write the JSON list to this file");

    CLI::App* verify = app.add_subcommand("verify", "Verify the nodal theorems over a sweep");
    verify->add_option("spec", spec_path, "Problem document (JSON)")->required();
    verify->add_option("--sweep", sweep_text, "Sweep ranges, e.g. d=2..6,j=0.5..2.5,tau=+-1,n1=0..4");
    verify->add_option("--out", out_path, "Write the JSON report to this file");

    CLI::App* orbit = app.add_subcommand("orbit", "Emit the Dirac spinor orbit of one state");
    orbit->add_option("spec", spec_path, "Problem document (JSON)")->required();
    orbit->add_option("--n1", n1, "Target node count of the upper component")->required();
    orbit->add_option("--parity", parity, "d = 1 sector of u1 (even|odd)")
        ->check(CLI::IsMember({"even", "odd"}));
    orbit->add_option("--out", out_path, "Output prefix (.csv and .json are written)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 3;
    }

#ifdef _OPENMP
    if (g.jobs > 0) omp_set_num_threads(g.jobs);
#endif

    try {
        if (app.got_subcommand(solve)) {
            return run_solve(spec_path, n1, parity, out_path, g);
        }
        if (app.got_subcommand(spectrum)) {
            return run_spectrum(spec_path, max_states, out_path, g);
        }
        if (app.got_subcommand(verify)) {
            return run_verify(spec_path, sweep_text, out_path, g);
        }
        if (app.got_subcommand(orbit)) {
            return run_orbit(spec_path, n1, parity, out_path, g);
        }
    } catch (const dirac::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 3;
}
