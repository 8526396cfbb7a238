#ifndef DIRAC_RADIAL_ODE_HPP
#define DIRAC_RADIAL_ODE_HPP

#include <optional>
#include <vector>

#include "dirac/ode45.hpp"
#include "dirac/problem.hpp"

namespace dirac {

/// Sampled radial solution. Radii are strictly increasing; components are
/// stored at the same indices. scale_log records the overflow-protection
/// renormalizations applied along the way (node structure and component
/// ratios are unaffected).
struct Trajectory {
    std::vector<double> r;
    std::vector<double> psi1;
    std::vector<double> psi2;
    double scale_log = 0.0;

    std::size_t size() const { return r.size(); }
};

/// W1 = E + m - V(r) (positive throughout the energy window).
double w1(const ProblemSpec& prob, double E, double r);
/// W2 = E - m - V(r) (nonincreasing; at most one sign change).
double w2(const ProblemSpec& prob, double E, double r);
/// Tail decay rate sqrt(m^2 - E^2); requires |E| < m.
double tail_beta(double mass, double E);

/// Boundary data at the inner end of the domain.
struct OriginState {
    ode::vec2 y{};     // (psi1, psi2) at radius epsilon (u1, u2 for d = 1)
    double epsilon = 0; // where the data applies (0 for d = 1)
    double gamma = 0;   // leading power r^gamma (d > 1)
};

/// Series/parity start consistent with the origin sign law. For d > 1 the
/// default offset is 1e-6/m; pass epsilon <= 0 to use it. d = 1 requires a
/// potential that is finite at the origin and starts exactly at x = 0.
OriginState origin_conditions(const ProblemSpec& prob, double E, double epsilon = 0.0);

/// Unit-normalized decaying direction at r_max.
ode::vec2 tail_conditions(const ProblemSpec& prob, double E, double r_max);

/// Outer integration radius: beta * r_max = 35, capped at 1e5/m and pushed
/// past the turning radius when necessary.
double default_r_max(const ProblemSpec& prob, double E);

/// Unique root of W2, if W2 changes sign; no root means no nodes anywhere.
std::optional<double> turning_radius(const ProblemSpec& prob, double E);

struct IntegrateOptions {
    double rtol = 1e-10;
    double atol = 1e-14;
    /// > 1 densifies the emitted samples (both spacing and rotation caps).
    double grid_refine = 1.0;
    /// Baseline sample budget across the span.
    int min_samples = 1000;
    /// Overflow-protection renormalization threshold.
    double rescale_threshold = 1e10;
};

/// Adaptive integration of the coupled system between two radii (either
/// direction); dense output is resampled so that neighbouring samples differ
/// by less than pi/8 in spinor-plane angle. Samples are returned ascending
/// in r regardless of the direction of integration.
Trajectory integrate(const ProblemSpec& prob, double E, double from, double to,
                     const ode::vec2& init, const IntegrateOptions& opts = {});

/// Endpoint-only integration used by the energy scan: final state plus the
/// count of strict sign changes of psi1 along the way.
struct ShootResult {
    ode::vec2 y{};
    int psi1_sign_changes = 0;
    double scale_log = 0.0;
};

ShootResult shoot(const ProblemSpec& prob, double E, double from, double to,
                  const ode::vec2& init, double rtol = 1e-10, double atol = 1e-14);

} // namespace dirac

#endif
