#ifndef DIRAC_POTENTIALS_HPP
#define DIRAC_POTENTIALS_HPP

#include <map>
#include <string>
#include <vector>

#include "dirac/errors.hpp"

namespace dirac {

enum class potential_family {
    coulomb,               // V(r) = -v/r
    hellmann,              // V(r) = -A/r + B e^{-Cr}/r
    laser_dressed_coulomb, // V(r) = -v/sqrt(r^2 + lambda^2)
    tabulated_monotone,    // sorted samples, monotone linear interpolation
};

std::string family_name(potential_family f);
potential_family family_from_name(const std::string& name);

/// An attractive central potential. Immutable after construction; all
/// evaluation paths are pure and safe to call concurrently.
struct PotentialModel {
    potential_family family = potential_family::coulomb;
    std::map<std::string, double> params;

    // tabulated_monotone only
    std::vector<double> r_table;
    std::vector<double> v_table;

    static PotentialModel coulomb(double v);
    static PotentialModel hellmann(double A, double B, double C);
    static PotentialModel laser_dressed_coulomb(double v, double lambda);
    static PotentialModel tabulated(std::vector<double> r, std::vector<double> v);

    double param(const std::string& name) const;

    /// True when V(r) diverges like 1/r at the origin.
    bool singular_at_origin() const;
};

/// V(r). r = 0 is allowed only for families finite at the origin.
double evaluate(const PotentialModel& pot, double r);

/// v0 = -lim_{r->0+} r V(r). Closed forms are returned exactly; tabulated
/// input is probed at r = 1e-4, 1e-5, 1e-6 and must converge.
double coulomb_coefficient(const PotentialModel& pot);

/// V(0) for families finite at the origin; throws otherwise.
double origin_value(const PotentialModel& pot);

struct ValidationReport {
    bool negative = false;
    bool nondecreasing = false;
    bool vanishing_tail = false;
    std::string detail;
    bool pass() const { return negative && nondecreasing && vanishing_tail; }
};

/// 512 logarithmically spaced radii spanning [1e-4/m, 1e3/m].
std::vector<double> default_validation_grid(double mass, int points = 512);

/// Grid-based check of the bound-state hypotheses: V < 0, V nondecreasing,
/// V -> 0 at the far end of the grid. The grid must be ascending with at
/// least 100 points.
ValidationReport validate(const PotentialModel& pot, const std::vector<double>& grid);

} // namespace dirac

#endif
