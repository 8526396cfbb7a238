#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dirac/shooting.hpp"

using namespace dirac;

namespace {

ProblemSpec hellmann_d5(int tau)
{
    ProblemSpec p;
    p.dimension = 5;
    p.mass = 1.0;
    p.j = 1.5;
    p.tau = tau;
    p.potential = PotentialModel::hellmann(0.7, 0.5, 0.25);
    return p;
}

ProblemSpec coulomb_prob(int d, double j, int tau, double v)
{
    ProblemSpec p;
    p.dimension = d;
    p.mass = 1.0;
    p.j = j;
    p.tau = tau;
    p.potential = PotentialModel::coulomb(v);
    return p;
}

// Independent quadrature for the normalization checks (local copy, not the
// solver's path).
double trapz(const std::vector<double>& x, const std::vector<double>& f)
{
    double s = 0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        s += 0.5 * (x[i + 1] - x[i]) * (f[i] + f[i + 1]);
    }
    return s;
}

} // namespace

TEST_CASE("coulomb_oracle arithmetic")
{
    // v -> 0: no binding.
    CHECK(coulomb_oracle(3, 0.5, -1, 1e-12, 0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));

    // d=3, j=1/2, tau=-1 (k=-1), v=0.5, n_r=0: E = sqrt(3)/2.
    CHECK(coulomb_oracle(3, 0.5, -1, 0.5, 0, 1.0) ==
          doctest::Approx(0.8660254037844386).epsilon(1e-14));

    // d=3, j=1/2, tau=+1 (k=+1), v=0.5, n_r=1: E = [1 + 0.25/(1+sqrt(0.75))^2]^{-1/2}.
    double g = std::sqrt(0.75);
    double expect = 1.0 / std::sqrt(1.0 + 0.25 / ((1.0 + g) * (1.0 + g)));
    CHECK(coulomb_oracle(3, 0.5, +1, 0.5, 1, 1.0) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(expect == doctest::Approx(0.9659258262890683).epsilon(1e-12));

    CHECK_THROWS_AS(coulomb_oracle(3, 0.5, +1, 1.2, 1, 1.0), supercritical_error);
    CHECK_THROWS_AS(coulomb_oracle(3, 0.5, +1, 0.5, 0, 1.0), spec_error); // n_r=0 needs k<0
}

TEST_CASE("mismatch determinant: antisymmetry of the matching form")
{
    // D = l1 r2 - r1 l2 flips sign when the sides are swapped.
    double l1 = 0.3, l2 = -0.8, r1 = 0.6, r2 = 0.2;
    double d_lr = l1 * r2 - r1 * l2;
    double d_rl = r1 * l2 - l1 * r2;
    CHECK(d_lr == -d_rl);
}

TEST_CASE("mismatch changes sign across the Hellmann tau=+1 ground state")
{
    ProblemSpec p = hellmann_d5(+1);
    double dlo = mismatch(p, 0.9842);
    double dhi = mismatch(p, 0.9853);
    CHECK(dlo * dhi < 0);
}

TEST_CASE("spectrum scan finds the figure brackets with the right labels")
{
    ProblemSpec p = hellmann_d5(+1);
    SpectrumScan scan = spectrum_scan(p);
    CHECK(scan.monotone);

    bool ground = false, excited5 = false;
    for (const auto& b : scan.brackets) {
        if (b.e_lo <= 0.98472 && 0.98472 <= b.e_hi) {
            ground = true;
            CHECK(b.label == 0);
        }
        if (b.e_lo <= 0.99697 && 0.99697 <= b.e_hi) {
            excited5 = true;
            CHECK(b.label == 5);
        }
    }
    CHECK(ground);
    CHECK(excited5);

    SUBCASE("solving from the scan hits the captioned energies")
    {
        RadialSolution s0 = solve_state_from_scan(p, 0, scan);
        CHECK(std::abs(s0.energy - 0.98472) < 5e-5);
        CHECK(s0.n1 == 0);
        CHECK(s0.n2 == 1);
        CHECK(std::abs(mismatch(p, s0.energy)) < 1e-9);

        RadialSolution s5 = solve_state_from_scan(p, 5, scan);
        CHECK(std::abs(s5.energy - 0.99697) < 5e-5);
        CHECK(s5.n2 == 6);
    }
}

TEST_CASE("solve_state reproduces the tau=-1 figure states")
{
    ProblemSpec p = hellmann_d5(-1);
    RadialSolution s = solve_state(p, 0);
    CHECK(std::abs(s.energy - 0.97487) < 5e-5);
    CHECK(s.n1 == 0);
    CHECK(s.n2 == 0);
    CHECK(s.matching_residual < 1e-6);
}

TEST_CASE("solver matches the closed-form Dirac-Coulomb oracle")
{
    // Small slice of the oracle grid (the full grid runs in acceptance).
    for (int tau : {+1, -1}) {
        ProblemSpec p = coulomb_prob(3, 0.5, tau, 0.5);
        SpectrumScan scan = spectrum_scan(p);
        for (int n1 = 0; n1 <= 2; ++n1) {
            int n_r = tau > 0 ? n1 + 1 : n1;
            double expect = coulomb_oracle(3, 0.5, tau, 0.5, n_r, 1.0);
            RadialSolution s = solve_state_from_scan(p, n1, scan);
            INFO("tau=", tau, " n1=", n1);
            CHECK(std::abs(s.energy - expect) < 1e-8);
        }
    }
}

TEST_CASE("solution is normalized and stable under grid refinement")
{
    ProblemSpec p = hellmann_d5(+1);
    ShootingConfig cfg;
    RadialSolution s = solve_state(p, 1, cfg);

    std::vector<double> dens(s.trajectory.size());
    for (std::size_t i = 0; i < dens.size(); ++i) {
        dens[i] = s.trajectory.psi1[i] * s.trajectory.psi1[i] +
                  s.trajectory.psi2[i] * s.trajectory.psi2[i];
    }
    double norm = trapz(s.trajectory.r, dens);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-5)); // trapezoid is the coarse check

    ShootingConfig fine = cfg;
    fine.grid_refine = 2.0;
    RadialSolution s2 = solve_state(p, 1, fine);
    std::vector<double> dens2(s2.trajectory.size());
    for (std::size_t i = 0; i < dens2.size(); ++i) {
        dens2[i] = s2.trajectory.psi1[i] * s2.trajectory.psi1[i] +
                   s2.trajectory.psi2[i] * s2.trajectory.psi2[i];
    }
    double norm2 = trapz(s2.trajectory.r, dens2);
    CHECK(std::abs(norm2 - norm) < 2e-5);      // trapezoid-level agreement
    CHECK(std::abs(s2.energy - s.energy) < 1e-10);
}

TEST_CASE("d = 1 sector labels and state-not-found paths")
{
    ProblemSpec p;
    p.dimension = 1;
    p.mass = 1.0;
    p.sector = parity_sector::u1_even;
    p.potential = PotentialModel::laser_dressed_coulomb(0.9, 0.5);

    // Odd label in the even sector: no such state.
    SpectrumScan scan = spectrum_scan(p);
    CHECK_THROWS_AS(solve_state_from_scan(p, 3, scan), state_not_found_error);

    try {
        solve_state_from_scan(p, 99, scan);
        FAIL("expected state_not_found_error");
    } catch (const state_not_found_error& e) {
        CHECK(!e.available_labels().empty());
        // Labels in the even sector are even full-line counts.
        for (int label : e.available_labels()) {
            CHECK(label % 2 == 0);
        }
    }
}

TEST_CASE("weak wells: at most a ground bracket, none when vanishing")
{
    ShootingConfig cfg;
    cfg.scan_points = 600;

    ProblemSpec shallow;
    shallow.dimension = 3;
    shallow.mass = 1.0;
    shallow.j = 0.5;
    shallow.tau = -1;
    shallow.potential =
        PotentialModel::tabulated({1e-4, 0.5, 1.0, 3.0, 1e4}, {-0.05, -0.05, -0.02, -1e-9, -1e-12});
    SpectrumScan scan = spectrum_scan(shallow, cfg);
    CHECK(scan.brackets.size() <= 1);
    for (const auto& b : scan.brackets) {
        CHECK(b.label == 0);
    }

    ProblemSpec empty = shallow;
    empty.potential = PotentialModel::tabulated({1e-4, 1.0, 1e4}, {-1e-9, -5e-10, -1e-12});
    SpectrumScan scan2 = spectrum_scan(empty, cfg);
    CHECK(scan2.brackets.empty());
}

TEST_CASE("shooting config contract")
{
    ShootingConfig bad;
    bad.scan_points = 1;
    CHECK_THROWS_AS(bad.check(), spec_error);
    bad = ShootingConfig{};
    bad.rtol = 0;
    CHECK_THROWS_AS(bad.check(), spec_error);
}
