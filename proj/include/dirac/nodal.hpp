#ifndef DIRAC_NODAL_HPP
#define DIRAC_NODAL_HPP

#include <map>
#include <span>
#include <string>

#include "dirac/shooting.hpp"

namespace dirac {

enum class clause_verdict { pass, fail, not_applicable };

std::string verdict_name(clause_verdict v);

/// Node-counting domain. Half-line counts are what the samples show; the
/// full-line variants reconstruct d = 1 counts from the component's parity
/// (odd components own a node at the origin).
enum class count_domain { half_line, full_line_even, full_line_odd };

/// Strict sign changes between consecutive non-negligible samples; samples
/// below 1e-8 of the component's peak are skipped, and runs of two or more
/// such samples away from the endpoints are rejected as ambiguous.
int count_nodes(std::span<const double> values, std::span<const double> radii,
                count_domain domain = count_domain::half_line);

/// Interior crossing radii (linear interpolation), half-line.
std::vector<double> node_radii(std::span<const double> values, std::span<const double> radii);

struct NodalReport {
    int n1 = 0, n2 = 0;
    int theorem_expected_n2 = 0;
    std::map<std::string, clause_verdict> clauses;
    std::map<std::string, std::string> details;
    std::vector<double> psi1_nodes, psi2_nodes;

    bool theorem_pass() const;
    /// True when no clause failed (not_applicable does not fail).
    bool all_pass() const;
};

/// Checks every clause of the nodal theorem and the supporting structure:
/// expected count relation, node confinement to (0, r_c], alternation,
/// origin and infinity sign laws, and the orbit rotation direction.
NodalReport verify_structure(const RadialSolution& sol);

struct OrbitTrace {
    std::vector<double> r;
    std::vector<double> psi1, psi2;
    /// Unwrapped spinor-plane angle atan2(psi2, psi1).
    std::vector<double> phi;
    /// psi2/psi1 where psi1 is significant, NaN elsewhere.
    std::vector<double> rho;
    /// |rho' - (2 k_d rho / r - W2 - W1 rho^2)| at interior points (d > 1),
    /// NaN where undefined.
    std::vector<double> riccati_residual;

    int crossings = 0; // axis crossings inside the node region
    clause_verdict rotation = clause_verdict::not_applicable;
    std::string rotation_detail;
};

/// Parametric (psi1, psi2) orbit with the rotation verdict: phi must
/// decrease at every axis crossing inside (0, r_c] for d > 1 (clockwise);
/// for d = 1 the observed direction is reported as informational detail.
OrbitTrace orbit_trace(const RadialSolution& sol);

} // namespace dirac

#endif
