#ifndef DIRAC_PROBLEM_HPP
#define DIRAC_PROBLEM_HPP

#include "dirac/potentials.hpp"

namespace dirac {

/// d = 1 solutions split into sectors of definite, opposite parities.
enum class parity_sector { u1_even, u1_odd };

/// k_d = tau (j + (d-2)/2). Only defined for d > 1; may be half-integer
/// when d is even.
double k_index(int d, double j, int tau);

/// Everything that determines the coupled radial system.
struct ProblemSpec {
    int dimension = 3;
    double mass = 1.0;
    PotentialModel potential = PotentialModel::coulomb(0.5);

    // d > 1
    double j = 0.5;
    int tau = +1;

    // d == 1
    parity_sector sector = parity_sector::u1_even;

    double k_d() const { return k_index(dimension, j, tau); }

    /// Enforces the structural invariants (dimension, mass, quantum numbers,
    /// and the subcritical-singularity requirement for d > 1).
    void check() const;
};

} // namespace dirac

#endif
