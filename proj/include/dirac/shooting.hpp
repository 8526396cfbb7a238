#ifndef DIRAC_SHOOTING_HPP
#define DIRAC_SHOOTING_HPP

#include <string>
#include <vector>

#include "dirac/radial_ode.hpp"

namespace dirac {

enum class match_rule { turning_point, fixed_fraction };

struct ShootingConfig {
    double rtol = 1e-10;
    double atol = 1e-14;
    /// Bisection convergence width; 0 selects 1e-12 * 2m.
    double energy_tol = 0.0;
    int scan_points = 2000;
    match_rule match = match_rule::turning_point;
    /// fixed_fraction rule: geometric interpolation exponent between the
    /// domain ends.
    double match_fraction = 0.5;
    int max_states = 64;
    /// Cells whose outward node count jumps by >= 2 are rescanned at 4x
    /// resolution, recursively up to this depth.
    int max_refine_depth = 10;
    double origin_eps = 0.0; // 0 -> 1e-6/m
    double grid_refine = 1.0;
    bool parallel = true;

    void check() const;
};

struct EnergyBracket {
    double e_lo = 0, e_hi = 0;
    double d_lo = 0, d_hi = 0;
    /// Outward psi1 sign changes at e_lo (u1 half-line count for d = 1).
    int label = 0;
};

struct SpectrumScan {
    std::vector<EnergyBracket> brackets; // ascending in energy
    bool monotone = true;                // outward counts nondecreasing across the grid
    std::string diagnostic;
};

/// Two-sided matching determinant D(E). Both one-sided solutions are scaled
/// to unit amplitude at the match radius; D vanishes exactly when they are
/// proportional, i.e. when E is an eigenvalue.
double mismatch(const ProblemSpec& prob, double E, const ShootingConfig& cfg = {});

/// Serial reference kernel: fills D(E) and the outward node count for every
/// energy in the list.
void scan_kernel_serial(const ProblemSpec& prob, const ShootingConfig& cfg,
                        const std::vector<double>& energies, std::vector<double>& mismatches,
                        std::vector<int>& node_counts);

/// OpenMP variant of the kernel; bit-identical results to the serial one.
void scan_kernel_parallel(const ProblemSpec& prob, const ShootingConfig& cfg,
                          const std::vector<double>& energies, std::vector<double>& mismatches,
                          std::vector<int>& node_counts);

/// Sign-change brackets of D over (-m + delta, m - delta) with node labels.
SpectrumScan spectrum_scan(const ProblemSpec& prob, const ShootingConfig& cfg = {});

struct RadialSolution {
    ProblemSpec problem;
    double energy = 0;
    Trajectory trajectory;
    /// Node counts of the two components (full-line counts for d = 1).
    int n1 = 0, n2 = 0;
    double k_d = 0; // NaN for d = 1
    double beta = 0;
    std::optional<double> r_c;
    double r_match = 0;
    double matching_residual = 0;
    double norm_error = 0;  // |integral - 1| after normalization
    double origin_eps = 0;  // inner end of the stored domain (0 for d = 1)
};

/// Refine one bracket to an eigenstate: bisection on D, two-sided dense
/// re-integration, splice, normalization, node counts.
RadialSolution solve_bracket(const ProblemSpec& prob, const EnergyBracket& bracket,
                             const ShootingConfig& cfg = {});

/// Find the bound state with the requested node label (full-line n1 for
/// d = 1, in the sector requested by the problem).
RadialSolution solve_state(const ProblemSpec& prob, int target_n1,
                           const ShootingConfig& cfg = {});

/// Same, reusing an existing scan (verify sweeps solve many labels from one
/// scan).
RadialSolution solve_state_from_scan(const ProblemSpec& prob, int target_n1,
                                     const SpectrumScan& scan, const ShootingConfig& cfg = {});

/// Every bound state found by the scan, ascending in energy, capped at
/// cfg.max_states.
std::vector<RadialSolution> solve_spectrum(const ProblemSpec& prob,
                                           const ShootingConfig& cfg = {});

/// Closed-form Dirac-Coulomb level: E = m [1 + v^2/(n_r + gamma)^2]^{-1/2}
/// with gamma = sqrt(k_d^2 - v^2). The n_r = 0 state exists only for
/// k_d < 0.
double coulomb_oracle(int d, double j, int tau, double v, int n_r, double m);

} // namespace dirac

#endif
