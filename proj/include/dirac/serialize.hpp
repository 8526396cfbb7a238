#ifndef DIRAC_SERIALIZE_HPP
#define DIRAC_SERIALIZE_HPP

#include <string>

#include <json.hpp>

#include "dirac/nodal.hpp"
#include "dirac/sweep.hpp"

namespace dirac {

struct OutputControls {
    double grid_refine = 1.0;
    /// Cosmetic hint for plotting (figures often draw 10x psi2); stored
    /// data is always unscaled.
    double psi2_scale = 1.0;
};

/// A solver run as declared on disk: problem, config overrides, output
/// controls.
struct ProblemDocument {
    ProblemSpec spec;
    ShootingConfig config;
    OutputControls output;
    bool parity_given = false;
};

/// Strict parse: unknown keys anywhere in the document are rejected with an
/// error naming the offending key.
ProblemDocument parse_problem_document(const nlohmann::json& doc);
ProblemDocument load_problem_file(const std::string& path);

/// Merge a bare config object (same keys as the document's "config") over
/// an existing configuration.
void apply_config_json(ShootingConfig& cfg, const nlohmann::json& obj);

nlohmann::json nodal_report_json(const NodalReport& report);
nlohmann::json solution_summary_json(const RadialSolution& sol, const NodalReport& report,
                                     const OutputControls& out);
nlohmann::json spectrum_json(const std::vector<RadialSolution>& states);
nlohmann::json sweep_report_json(const SweepResult& result);

/// CSV with columns r,psi1,psi2,W2 (17 significant digits, LF endings).
std::string solution_csv(const RadialSolution& sol);
/// CSV with columns r,psi1,psi2,phi,riccati_residual.
std::string orbit_csv(const OrbitTrace& trace);

void write_file(const std::string& path, const std::string& content);
std::string format_g17(double x);

} // namespace dirac

#endif
