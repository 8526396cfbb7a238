#include "dirac/sweep.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dirac {

namespace {

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<double> parse_range(const std::string& value, const std::string& key)
{
    auto bad = [&](const std::string& why) {
        return spec_error("sweep: bad range \"" + key + "=" + value + "\" (" + why + ")");
    };
    std::vector<double> out;
    auto dots = value.find("..");
    try {
        if (dots == std::string::npos) {
            out.push_back(std::stod(value));
        } else {
            double a = std::stod(value.substr(0, dots));
            double b = std::stod(value.substr(dots + 2));
            if (b < a) throw bad("descending");
            for (double x = a; x <= b + 1e-9; x += 1.0) out.push_back(x);
        }
    } catch (const spec_error&) {
        throw;
    } catch (const std::exception&) {
        throw bad("not numeric");
    }
    if (out.empty()) throw bad("empty");
    return out;
}

} // namespace

SweepSpec parse_sweep(const std::string& text)
{
    SweepSpec sweep;
    sweep.dims.clear();
    sweep.js.clear();
    sweep.taus.clear();
    sweep.n1s.clear();

    for (const std::string& term : split(text, ',')) {
        if (term.empty()) continue;
        auto eq = term.find('=');
        if (eq == std::string::npos) {
            throw spec_error("sweep: expected key=value, got \"" + term + "\"");
        }
        std::string key = term.substr(0, eq);
        std::string value = term.substr(eq + 1);
        if (key == "d") {
            for (double x : parse_range(value, key)) {
                if (x != std::floor(x) || x < 1) {
                    throw spec_error("sweep: d must be a positive integer");
                }
                sweep.dims.push_back(static_cast<int>(x));
            }
        } else if (key == "j") {
            for (double x : parse_range(value, key)) sweep.js.push_back(x);
        } else if (key == "tau") {
            if (value == "\xc2\xb1" "1" || value == "+-1" || value == "-+1") {
                sweep.taus = {+1, -1};
            } else if (value == "+1" || value == "1") {
                sweep.taus = {+1};
            } else if (value == "-1") {
                sweep.taus = {-1};
            } else {
                throw spec_error("sweep: tau must be +1, -1 or ±1");
            }
        } else if (key == "n1") {
            for (double x : parse_range(value, key)) {
                if (x != std::floor(x) || x < 0) {
                    throw spec_error("sweep: n1 must be a nonnegative integer");
                }
                sweep.n1s.push_back(static_cast<int>(x));
            }
        } else {
            throw spec_error("sweep: unknown key \"" + key + "\"");
        }
    }
    if (sweep.dims.empty()) sweep.dims = {1, 2, 3, 4, 5, 6};
    if (sweep.js.empty()) sweep.js = {0.5, 1.5, 2.5};
    if (sweep.taus.empty()) sweep.taus = {+1, -1};
    if (sweep.n1s.empty()) sweep.n1s = {0, 1, 2, 3, 4};
    return sweep;
}

namespace {

struct Group {
    ProblemSpec prob;
    std::vector<int> targets;
    bool skip = false;
    std::string skip_note;
};

} // namespace

SweepResult run_sweep(const PotentialModel& pot, double mass, const SweepSpec& sweep,
                      const ShootingConfig& cfg, int jobs)
{
    cfg.check();
    ValidationReport vrep = validate(pot, default_validation_grid(mass));
    if (!vrep.pass()) {
        throw spec_error("sweep: potential fails the bound-state hypotheses: " + vrep.detail);
    }

    double v0 = coulomb_coefficient(pot);

    std::vector<Group> groups;
    for (int d : sweep.dims) {
        if (d == 1) {
            // (j, tau) are not defined in one dimension; the parity sector
            // follows the label parity, so at most two groups appear.
            for (parity_sector sector : {parity_sector::u1_even, parity_sector::u1_odd}) {
                Group g;
                g.prob.dimension = 1;
                g.prob.mass = mass;
                g.prob.potential = pot;
                g.prob.sector = sector;
                bool even = sector == parity_sector::u1_even;
                for (int n1 : sweep.n1s) {
                    if ((n1 % 2 == 0) == even) g.targets.push_back(n1);
                }
                if (g.targets.empty()) continue;
                if (pot.singular_at_origin() || v0 != 0.0) {
                    g.skip = true;
                    g.skip_note = "d = 1 requires a potential finite at the origin";
                }
                groups.push_back(std::move(g));
            }
        } else {
            for (double j : sweep.js) {
                for (int tau : sweep.taus) {
                    Group g;
                    g.prob.dimension = d;
                    g.prob.mass = mass;
                    g.prob.potential = pot;
                    g.prob.j = j;
                    g.prob.tau = tau;
                    g.targets = sweep.n1s;
                    double k = k_index(d, j, tau);
                    if (!(std::abs(v0) < std::abs(k))) {
                        g.skip = true;
                        std::ostringstream os;
                        os << "supercritical: |v0| = " << std::abs(v0) << " >= |k_d| = "
                           << std::abs(k);
                        g.skip_note = os.str();
                    }
                    groups.push_back(std::move(g));
                }
            }
        }
    }

    // Fixed slot layout keeps the result deterministic under parallel runs.
    std::vector<std::size_t> offsets(groups.size() + 1, 0);
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        offsets[gi + 1] = offsets[gi] + groups[gi].targets.size();
    }
    SweepResult result;
    result.entries.resize(offsets.back());

#ifdef _OPENMP
    if (jobs > 0) omp_set_num_threads(jobs);
#else
    (void)jobs;
#endif

    const long ngroups = static_cast<long>(groups.size());
#pragma omp parallel for schedule(dynamic) if (ngroups > 1)
    for (long gi = 0; gi < ngroups; ++gi) {
        const Group& g = groups[static_cast<std::size_t>(gi)];
        std::size_t base = offsets[static_cast<std::size_t>(gi)];
        for (std::size_t t = 0; t < g.targets.size(); ++t) {
            SweepEntry& e = result.entries[base + t];
            e.prob = g.prob;
            e.target_n1 = g.targets[t];
        }
        if (g.skip) {
            for (std::size_t t = 0; t < g.targets.size(); ++t) {
                result.entries[base + t].status = sweep_status::skipped;
                result.entries[base + t].note = g.skip_note;
            }
            continue;
        }

        SpectrumScan scan;
        std::string scan_failure;
        try {
            scan = spectrum_scan(g.prob, cfg);
        } catch (const std::exception& ex) {
            scan_failure = ex.what();
        }
        for (std::size_t t = 0; t < g.targets.size(); ++t) {
            SweepEntry& e = result.entries[base + t];
            if (!scan_failure.empty()) {
                e.status = sweep_status::failed;
                e.note = scan_failure;
                continue;
            }
            try {
                RadialSolution sol = solve_state_from_scan(g.prob, e.target_n1, scan, cfg);
                e.report = verify_structure(sol);
                e.energy = sol.energy;
                e.status = sweep_status::solved;
            } catch (const state_not_found_error& ex) {
                e.status = sweep_status::skipped;
                e.note = ex.what();
            } catch (const std::exception& ex) {
                e.status = sweep_status::failed;
                e.note = ex.what();
            }
        }
    }

    for (const SweepEntry& e : result.entries) {
        switch (e.status) {
            case sweep_status::solved:
                ++result.solved;
                if (!e.report.theorem_pass()) ++result.theorem_failures;
                break;
            case sweep_status::skipped: ++result.skipped; break;
            case sweep_status::failed: ++result.failed; break;
        }
    }
    return result;
}

} // namespace dirac
