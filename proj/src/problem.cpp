#include "dirac/problem.hpp"

#include <cmath>
#include <sstream>

namespace dirac {

namespace {

bool is_half_odd_integer(double j)
{
    double twice = 2.0 * j;
    double r = std::round(twice);
    return j > 0 && std::abs(twice - r) < 1e-9 && (static_cast<long long>(r) % 2 != 0);
}

} // namespace

double k_index(int d, double j, int tau)
{
    if (d <= 1) {
        throw spec_error("k_index: defined only for d > 1");
    }
    if (!is_half_odd_integer(j)) {
        std::ostringstream os;
        os << "k_index: j = " << j << " is not a positive half-odd-integer";
        throw spec_error(os.str());
    }
    if (tau != 1 && tau != -1) {
        throw spec_error("k_index: tau must be +1 or -1");
    }
    return tau * (j + 0.5 * (d - 2));
}

void ProblemSpec::check() const
{
    if (dimension < 1) {
        throw spec_error("problem: dimension must be >= 1");
    }
    if (!(mass > 0)) {
        throw spec_error("problem: mass must be positive");
    }
    if (dimension > 1) {
        double k = k_d(); // validates j, tau
        double v0 = coulomb_coefficient(potential);
        if (!(std::abs(v0) < std::abs(k))) {
            std::ostringstream os;
            os << "origin singularity too strong: |v0| = " << std::abs(v0)
               << " must be below |k_d| = " << std::abs(k);
            throw supercritical_error(os.str());
        }
    } else {
        if (coulomb_coefficient(potential) != 0.0) {
            throw unsupported_potential_error(
                "d = 1 requires a potential that is finite at the origin");
        }
    }
}

} // namespace dirac
