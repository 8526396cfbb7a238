#ifndef DIRAC_SWEEP_HPP
#define DIRAC_SWEEP_HPP

#include "dirac/nodal.hpp"

namespace dirac {

/// Grid of states exercised by a verify run.
struct SweepSpec {
    std::vector<int> dims{1, 2, 3, 4, 5, 6};
    std::vector<double> js{0.5, 1.5, 2.5};
    std::vector<int> taus{+1, -1};
    std::vector<int> n1s{0, 1, 2, 3, 4};
};

/// Parses "d=1..6,j=0.5..2.5,tau=±1,n1=0..4" (ranges step by 1; j accepts
/// half-integers; tau accepts +1, -1, ±1 or +-1).
SweepSpec parse_sweep(const std::string& text);

enum class sweep_status { solved, skipped, failed };

struct SweepEntry {
    ProblemSpec prob;
    int target_n1 = 0;
    sweep_status status = sweep_status::skipped;
    double energy = 0;
    NodalReport report; // meaningful when solved
    std::string note;
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    int solved = 0;
    int skipped = 0;
    int failed = 0;           // numerical errors; distinct from theorem failures
    int theorem_failures = 0; // solved states whose theorem clause failed

    bool clean() const { return failed == 0 && theorem_failures == 0; }
};

/// Solves every state of the grid that exists for this potential and runs
/// the structural verification on each. States are grouped by problem so a
/// single scan serves all labels; groups run in parallel up to `jobs`
/// threads (0 = library default). d = 1 rows collapse over (j, tau) and the
/// parity sector follows the label parity. Unsupported or supercritical
/// combinations are reported as skipped.
SweepResult run_sweep(const PotentialModel& pot, double mass, const SweepSpec& sweep,
                      const ShootingConfig& cfg, int jobs = 0);

} // namespace dirac

#endif
