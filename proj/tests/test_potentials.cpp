#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dirac/potentials.hpp"

using namespace dirac;

TEST_CASE("closed-form evaluation")
{
    auto laser = PotentialModel::laser_dressed_coulomb(0.9, 0.5);
    CHECK(evaluate(laser, 0.0) == doctest::Approx(-1.8).epsilon(1e-15));

    auto coulomb = PotentialModel::coulomb(1.0);
    CHECK(evaluate(coulomb, 2.0) == doctest::Approx(-0.5).epsilon(1e-15));

    auto hell = PotentialModel::hellmann(0.7, 0.5, 0.25);
    CHECK(std::abs(evaluate(hell, 1e7)) < 1e-7); // monotone tail
    CHECK(evaluate(hell, 1.0) ==
          doctest::Approx(-0.7 + 0.5 * std::exp(-0.25)).epsilon(1e-15));
}

TEST_CASE("evaluation at the origin is a domain error for 1/r families")
{
    CHECK_THROWS_AS(evaluate(PotentialModel::coulomb(1.0), 0.0), spec_error);
    CHECK_THROWS_AS(evaluate(PotentialModel::hellmann(0.7, 0.5, 0.25), 0.0), spec_error);
    CHECK_NOTHROW(evaluate(PotentialModel::laser_dressed_coulomb(0.9, 0.5), 0.0));
}

TEST_CASE("coulomb coefficient: closed forms and the numeric-limit oracle")
{
    // Oracle: -r V(r) probed toward the origin must settle on A - B.
    auto hell = PotentialModel::hellmann(0.7, 0.5, 0.25);
    double s4 = -1e-4 * evaluate(hell, 1e-4);
    double s5 = -1e-5 * evaluate(hell, 1e-5);
    double s6 = -1e-6 * evaluate(hell, 1e-6);
    CHECK(std::abs(s5 - s6) < std::abs(s4 - s5));
    CHECK(s6 == doctest::Approx(0.2).epsilon(1e-5));
    CHECK(coulomb_coefficient(hell) == doctest::Approx(0.2).epsilon(1e-12));

    CHECK(coulomb_coefficient(PotentialModel::laser_dressed_coulomb(0.9, 0.5)) == 0.0);
    CHECK(coulomb_coefficient(PotentialModel::coulomb(0.5)) == 0.5);
}

TEST_CASE("coulomb coefficient is blind to terms finite at the origin")
{
    for (double A : {0.4, 0.7, 1.1}) {
        for (double B : {0.1, 0.3}) {
            for (double C : {0.25, 1.0}) {
                auto p = PotentialModel::hellmann(A, B, C);
                CHECK(coulomb_coefficient(p) == doctest::Approx(A - B).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("tabulated potential: interpolation, clamping, limit failure")
{
    auto tab = PotentialModel::tabulated({0.5, 1.0, 2.0, 1000.0}, {-2.0, -1.0, -0.5, -1e-9});
    CHECK(evaluate(tab, 0.75) == doctest::Approx(-1.5).epsilon(1e-15));
    CHECK(evaluate(tab, 0.1) == doctest::Approx(-2.0).epsilon(1e-15)); // clamped
    CHECK(evaluate(tab, 5000.0) == doctest::Approx(-1e-9).epsilon(1e-15));
    CHECK(coulomb_coefficient(tab) == 0.0); // clamped data is finite at the origin

    // A finely tabulated Coulomb profile sampled down to 1e-8 keeps its
    // coefficient.
    std::vector<double> rs, vs;
    for (double r = 1e-8; r < 2e3; r *= 1.05) {
        rs.push_back(r);
        vs.push_back(-0.5 / r);
    }
    auto tabc = PotentialModel::tabulated(rs, vs);
    CHECK(coulomb_coefficient(tabc) == doctest::Approx(0.5).epsilon(5e-3));

    // A 1/r^2 profile has no limit: unsupported.
    std::vector<double> rs2, vs2;
    for (double r = 1e-8; r < 2e3; r *= 1.6) {
        rs2.push_back(r);
        vs2.push_back(-1e-6 / (r * r));
    }
    auto tab2 = PotentialModel::tabulated(rs2, vs2);
    CHECK_THROWS_AS(coulomb_coefficient(tab2), unsupported_potential_error);
}

TEST_CASE("validate: hypotheses on the default grid")
{
    auto grid = default_validation_grid(1.0);
    CHECK(grid.size() == 512);
    CHECK(grid.front() == doctest::Approx(1e-4));
    CHECK(grid.back() == doctest::Approx(1e3));

    SUBCASE("Hellmann with A > B passes; the derivative oracle agrees")
    {
        auto p = PotentialModel::hellmann(0.7, 0.5, 0.25);
        auto rep = validate(p, grid);
        CHECK(rep.pass());
        // V'(r) = (A - B e^{-Cr} (1 + Cr)) / r^2 > 0 whenever A > B.
        for (double r : {1e-4, 1e-2, 1.0, 10.0, 500.0}) {
            double deriv = (0.7 - 0.5 * std::exp(-0.25 * r) * (1 + 0.25 * r)) / (r * r);
            CHECK(deriv > 0);
        }
    }

    SUBCASE("Hellmann with B > A fails negativity near the origin")
    {
        auto p = PotentialModel::hellmann(0.5, 0.7, 0.25);
        auto rep = validate(p, grid);
        CHECK_FALSE(rep.pass());
        CHECK_FALSE(rep.negative);
    }

    SUBCASE("Coulomb passes")
    {
        auto rep = validate(PotentialModel::coulomb(1.0), grid);
        CHECK(rep.pass());
    }

    SUBCASE("laser-dressed Coulomb passes")
    {
        auto rep = validate(PotentialModel::laser_dressed_coulomb(0.9, 0.5), grid);
        CHECK(rep.pass());
    }

    SUBCASE("a potential that tends to a nonzero constant fails the tail clause")
    {
        auto p = PotentialModel::tabulated({1e-5, 1.0, 1e4}, {-2.0, -1.0, -0.99});
        auto rep = validate(p, grid);
        CHECK_FALSE(rep.vanishing_tail);
        CHECK_FALSE(rep.pass());
    }

    SUBCASE("validated potentials are negative and nondecreasing on the grid")
    {
        for (auto p : {PotentialModel::coulomb(0.5), PotentialModel::hellmann(0.7, 0.5, 0.25),
                       PotentialModel::laser_dressed_coulomb(0.9, 0.5)}) {
            auto rep = validate(p, grid);
            REQUIRE(rep.pass());
            double prev = -std::numeric_limits<double>::infinity();
            for (double r : grid) {
                double v = evaluate(p, r);
                CHECK(v < 0);
                CHECK(v >= prev);
                prev = v;
            }
        }
    }
}

TEST_CASE("validate input contract")
{
    auto p = PotentialModel::coulomb(1.0);
    std::vector<double> tiny{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(validate(p, tiny), spec_error);
    auto grid = default_validation_grid(1.0);
    std::swap(grid[5], grid[6]);
    CHECK_THROWS_AS(validate(p, grid), spec_error);
}
