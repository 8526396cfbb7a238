#include "dirac/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <mutex>
#include <sstream>

#include "dirac/nodal.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dirac {

namespace {

int sgn(double x) { return (x > 0) - (x < 0); }

struct MatchGeometry {
    double eps = 0;
    double r_max = 0;
    double r_match = 0;
    std::optional<double> r_c;
};

MatchGeometry match_geometry(const ProblemSpec& prob, double E, const ShootingConfig& cfg)
{
    MatchGeometry g;
    g.eps = (prob.dimension == 1) ? 0.0
                                  : (cfg.origin_eps > 0 ? cfg.origin_eps : 1e-6 / prob.mass);
    g.r_max = default_r_max(prob, E);
    g.r_c = turning_radius(prob, E);

    auto fallback = [&]() {
        double f = cfg.match_fraction;
        if (prob.dimension == 1) {
            return f * g.r_max;
        }
        return std::exp((1.0 - f) * std::log(g.eps) + f * std::log(g.r_max));
    };

    if (cfg.match == match_rule::turning_point && g.r_c) {
        g.r_match = *g.r_c; // clamped into the domain below when r_c outruns it
    } else {
        g.r_match = fallback();
    }
    double lo = std::max(4.0 * g.eps, 1e-9 / prob.mass);
    g.r_match = std::clamp(g.r_match, lo, 0.8 * g.r_max);
    return g;
}

struct MismatchValue {
    double determinant = 0;
    int outward_nodes = 0;
};

MismatchValue evaluate_mismatch(const ProblemSpec& prob, double E, const ShootingConfig& cfg)
{
    MatchGeometry g = match_geometry(prob, E, cfg);
    OriginState origin = origin_conditions(prob, E, g.eps);
    ode::vec2 tail = tail_conditions(prob, E, g.r_max);

    ShootResult left = shoot(prob, E, origin.epsilon, g.r_match, origin.y, cfg.rtol, cfg.atol);
    ShootResult right = shoot(prob, E, g.r_max, g.r_match, tail, cfg.rtol, cfg.atol);

    double nl = ode::norm2(left.y);
    double nr = ode::norm2(right.y);
    if (!(nl > 0) || !(nr > 0) || !std::isfinite(nl) || !std::isfinite(nr)) {
        throw numerical_error("mismatch: degenerate one-sided solution at E = " +
                              std::to_string(E));
    }
    MismatchValue mv;
    mv.determinant = (left.y[0] / nl) * (right.y[1] / nr) - (right.y[0] / nr) * (left.y[1] / nl);
    mv.outward_nodes = left.psi1_sign_changes;
    return mv;
}

double energy_tolerance(const ProblemSpec& prob, const ShootingConfig& cfg)
{
    return cfg.energy_tol > 0 ? cfg.energy_tol : 1e-12 * 2.0 * prob.mass;
}

} // namespace

void ShootingConfig::check() const
{
    if (!(rtol > 0) || !(atol > 0)) {
        throw spec_error("shooting config: tolerances must be positive");
    }
    if (energy_tol < 0) {
        throw spec_error("shooting config: energy_tol must be nonnegative");
    }
    if (scan_points < 2) {
        throw spec_error("shooting config: scan_points must be at least 2");
    }
    if (max_states < 1) {
        throw spec_error("shooting config: max_states must be positive");
    }
    if (!(match_fraction > 0) || !(match_fraction < 1)) {
        throw spec_error("shooting config: match_fraction must lie in (0, 1)");
    }
    if (!(grid_refine >= 1.0)) {
        throw spec_error("shooting config: grid_refine must be >= 1");
    }
}

double mismatch(const ProblemSpec& prob, double E, const ShootingConfig& cfg)
{
    cfg.check();
    try {
        return evaluate_mismatch(prob, E, cfg).determinant;
    } catch (const integration_failure& e) {
        std::ostringstream os;
        os << e.what() << " (while evaluating D at E = " << E << ")";
        throw integration_failure(os.str(), e.radius());
    }
}

void scan_kernel_serial(const ProblemSpec& prob, const ShootingConfig& cfg,
                        const std::vector<double>& energies, std::vector<double>& mismatches,
                        std::vector<int>& node_counts)
{
    mismatches.resize(energies.size());
    node_counts.resize(energies.size());
    for (std::size_t i = 0; i < energies.size(); ++i) {
        try {
            MismatchValue mv = evaluate_mismatch(prob, energies[i], cfg);
            mismatches[i] = mv.determinant;
            node_counts[i] = mv.outward_nodes;
        } catch (const integration_failure& e) {
            std::ostringstream os;
            os << e.what() << " (scan energy E = " << energies[i] << ")";
            throw integration_failure(os.str(), e.radius());
        }
    }
}

void scan_kernel_parallel(const ProblemSpec& prob, const ShootingConfig& cfg,
                          const std::vector<double>& energies, std::vector<double>& mismatches,
                          std::vector<int>& node_counts)
{
#ifdef _OPENMP
    mismatches.resize(energies.size());
    node_counts.resize(energies.size());
    bool failed = false;
    std::string message;
    std::mutex mtx;
    const long n = static_cast<long>(energies.size());
#pragma omp parallel for schedule(dynamic, 8) if (!omp_in_parallel())
    for (long i = 0; i < n; ++i) {
        bool skip;
#pragma omp atomic read
        skip = failed;
        if (skip) continue;
        try {
            MismatchValue mv = evaluate_mismatch(prob, energies[i], cfg);
            mismatches[i] = mv.determinant;
            node_counts[i] = mv.outward_nodes;
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(mtx);
            failed = true;
            if (message.empty()) {
                message = std::string(e.what()) + " (scan energy E = " +
                          std::to_string(energies[i]) + ")";
            }
        }
    }
    if (failed) {
        throw numerical_error("scan: " + message);
    }
#else
    scan_kernel_serial(prob, cfg, energies, mismatches, node_counts);
#endif
}

SpectrumScan spectrum_scan(const ProblemSpec& prob, const ShootingConfig& cfg)
{
    cfg.check();
    prob.check();

    const double m = prob.mass;
    const double delta = 1e-6 * m;
    const int n = cfg.scan_points;
    std::vector<double> energies(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / (n - 1);
        energies[static_cast<std::size_t>(i)] = (-m + delta) + t * (2.0 * m - 2.0 * delta);
    }

    std::vector<double> dvals;
    std::vector<int> nodes;
    if (cfg.parallel) {
        scan_kernel_parallel(prob, cfg, energies, dvals, nodes);
    } else {
        scan_kernel_serial(prob, cfg, energies, dvals, nodes);
    }

    SpectrumScan scan;
    for (std::size_t i = 0; i + 1 < energies.size(); ++i) {
        if (nodes[i + 1] < nodes[i]) {
            scan.monotone = false;
            std::ostringstream os;
            os << "outward node count drops from " << nodes[i] << " to " << nodes[i + 1]
               << " between E = " << energies[i] << " and " << energies[i + 1];
            scan.diagnostic = os.str();
        }
    }

    // Cell queue: emit brackets on sign changes, rescan node jumps >= 2 at
    // 4x resolution until resolved or the depth cap is reached.
    struct Cell {
        double e0, e1, d0, d1;
        int n0, n1, depth;
    };
    std::deque<Cell> queue;
    for (std::size_t i = 0; i + 1 < energies.size(); ++i) {
        queue.push_back({energies[i], energies[i + 1], dvals[i], dvals[i + 1], nodes[i],
                         nodes[i + 1], 0});
    }

    while (!queue.empty()) {
        Cell c = queue.front();
        queue.pop_front();
        bool sign_change = sgn(c.d0) != sgn(c.d1) && sgn(c.d0) != 0 && sgn(c.d1) != 0;
        // The outward count flips slightly after the eigenvalue (the new
        // node enters through the match radius), so a two-root cell can
        // show a jump of one: any advance without a sign change is suspect.
        bool jump = (c.n1 - c.n0) >= 2 || ((c.n1 - c.n0) >= 1 && !sign_change);
        if (jump && c.depth < cfg.max_refine_depth) {
            double e[5], d[5];
            int nn[5];
            e[0] = c.e0;
            e[4] = c.e1;
            d[0] = c.d0;
            d[4] = c.d1;
            nn[0] = c.n0;
            nn[4] = c.n1;
            for (int k = 1; k <= 3; ++k) {
                e[k] = c.e0 + 0.25 * k * (c.e1 - c.e0);
                MismatchValue mv = evaluate_mismatch(prob, e[k], cfg);
                d[k] = mv.determinant;
                nn[k] = mv.outward_nodes;
            }
            for (int k = 0; k < 4; ++k) {
                queue.push_back({e[k], e[k + 1], d[k], d[k + 1], nn[k], nn[k + 1], c.depth + 1});
            }
            continue;
        }
        if (sign_change) {
            scan.brackets.push_back({c.e0, c.e1, c.d0, c.d1, c.n0});
        }
        if ((c.n1 - c.n0) >= 2 && c.depth >= cfg.max_refine_depth && scan.diagnostic.empty()) {
            std::ostringstream os;
            os << "unresolved node jump (" << c.n0 << " -> " << c.n1 << ") near E = " << c.e0
               << " at refinement depth " << c.depth;
            scan.diagnostic = os.str();
        }
    }

    std::sort(scan.brackets.begin(), scan.brackets.end(),
              [](const EnergyBracket& a, const EnergyBracket& b) { return a.e_lo < b.e_lo; });
    if (scan.brackets.size() > static_cast<std::size_t>(cfg.max_states)) {
        scan.brackets.resize(static_cast<std::size_t>(cfg.max_states));
    }
    return scan;
}

namespace {

double bisect_energy(const ProblemSpec& prob, const EnergyBracket& br, const ShootingConfig& cfg)
{
    double lo = br.e_lo, hi = br.e_hi;
    double dlo = br.d_lo;
    if (sgn(br.d_lo) == sgn(br.d_hi)) {
        throw numerical_error("solve: bracket does not straddle a sign change of D");
    }
    const double tol = energy_tolerance(prob, cfg);
    int guard = 0;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break; // double resolution reached
        double dm = evaluate_mismatch(prob, mid, cfg).determinant;
        if (dm == 0.0) {
            return mid;
        }
        if (sgn(dm) == sgn(dlo)) {
            lo = mid;
            dlo = dm;
        } else {
            hi = mid;
        }
        if (++guard > 300) {
            throw numerical_error("solve: bisection failed to converge");
        }
    }
    return 0.5 * (lo + hi);
}

double simpson_nonuniform(const std::vector<double>& x, const std::vector<double>& f)
{
    const std::size_t n = x.size();
    double total = 0.0;
    std::size_t i = 0;
    while (i + 2 < n) {
        double h0 = x[i + 1] - x[i];
        double h1 = x[i + 2] - x[i + 1];
        double s = h0 + h1;
        total += s / 6.0 *
                 ((2.0 - h1 / h0) * f[i] + (s * s / (h0 * h1)) * f[i + 1] +
                  (2.0 - h0 / h1) * f[i + 2]);
        i += 2;
    }
    if (i + 1 < n) {
        total += 0.5 * (x[i + 1] - x[i]) * (f[i] + f[i + 1]);
    }
    return total;
}

struct CountedNodes {
    int n1_half = 0, n2_half = 0; // half-line counts
    int n1 = 0, n2 = 0;           // convention counts (full line for d = 1)
};

CountedNodes count_solution_nodes(const ProblemSpec& prob, const Trajectory& tr)
{
    CountedNodes c;
    c.n1_half = count_nodes(tr.psi1, tr.r, count_domain::half_line);
    c.n2_half = count_nodes(tr.psi2, tr.r, count_domain::half_line);
    if (prob.dimension == 1) {
        bool u1_even = prob.sector == parity_sector::u1_even;
        c.n1 = u1_even ? 2 * c.n1_half : 2 * c.n1_half + 1;
        c.n2 = u1_even ? 2 * c.n2_half + 1 : 2 * c.n2_half;
    } else {
        c.n1 = c.n1_half;
        c.n2 = c.n2_half;
    }
    return c;
}

} // namespace

RadialSolution solve_bracket(const ProblemSpec& prob, const EnergyBracket& bracket,
                             const ShootingConfig& cfg)
{
    cfg.check();
    double E = bisect_energy(prob, bracket, cfg);

    MatchGeometry g = match_geometry(prob, E, cfg);
    OriginState origin = origin_conditions(prob, E, g.eps);
    ode::vec2 tail = tail_conditions(prob, E, g.r_max);

    double refine = cfg.grid_refine;
    for (int attempt = 0;; ++attempt) {
        IntegrateOptions io;
        io.rtol = cfg.rtol;
        io.atol = cfg.atol;
        io.grid_refine = refine;

        Trajectory left = integrate(prob, E, origin.epsilon, g.r_match, origin.y, io);
        Trajectory right = integrate(prob, E, g.r_max, g.r_match, tail, io);

        double l1 = left.psi1.back(), l2 = left.psi2.back();
        double r1 = right.psi1.front(), r2 = right.psi2.front();
        double rr = r1 * r1 + r2 * r2;
        if (!(rr > 0)) {
            throw numerical_error("solve: inward solution vanished at the match radius");
        }
        double s = (l1 * r1 + l2 * r2) / rr;
        double lnorm = std::hypot(l1, l2);
        double residual =
            lnorm > 0 ? std::hypot(l1 - s * r1, l2 - s * r2) / lnorm
                      : std::numeric_limits<double>::infinity();

        RadialSolution sol;
        sol.problem = prob;
        sol.energy = E;
        sol.matching_residual = residual;
        sol.r_match = g.r_match;
        sol.r_c = g.r_c;
        sol.beta = tail_beta(prob.mass, E);
        sol.k_d = prob.dimension > 1 ? prob.k_d()
                                     : std::numeric_limits<double>::quiet_NaN();
        sol.origin_eps = origin.epsilon;

        Trajectory& tr = sol.trajectory;
        tr.r = left.r;
        tr.psi1 = left.psi1;
        tr.psi2 = left.psi2;
        tr.scale_log = left.scale_log;
        for (std::size_t i = 1; i < right.r.size(); ++i) {
            tr.r.push_back(right.r[i]);
            tr.psi1.push_back(s * right.psi1[i]);
            tr.psi2.push_back(s * right.psi2[i]);
        }

        std::vector<double> density(tr.size());
        for (std::size_t i = 0; i < tr.size(); ++i) {
            density[i] = tr.psi1[i] * tr.psi1[i] + tr.psi2[i] * tr.psi2[i];
        }
        double norm = simpson_nonuniform(tr.r, density);
        if (prob.dimension == 1) {
            norm *= 2.0; // full-line norm by parity
        }
        if (!(norm > 0) || !std::isfinite(norm)) {
            throw numerical_error("solve: normalization integral is not positive");
        }
        double inv = 1.0 / std::sqrt(norm);
        for (std::size_t i = 0; i < tr.size(); ++i) {
            tr.psi1[i] *= inv;
            tr.psi2[i] *= inv;
            density[i] *= inv * inv;
        }
        double recheck = simpson_nonuniform(tr.r, density);
        if (prob.dimension == 1) recheck *= 2.0;
        sol.norm_error = std::abs(recheck - 1.0);

        try {
            CountedNodes c = count_solution_nodes(prob, tr);
            sol.n1 = c.n1;
            sol.n2 = c.n2;
        } catch (const ambiguous_node_error&) {
            if (attempt >= 3) throw;
            refine *= 2.0; // grid too coarse near a crossing
            continue;
        }
        return sol;
    }
}

namespace {

struct LabelMap {
    // Maps a requested convention label (full-line n1 for d = 1) to the
    // half-line scan label, or reports it unreachable in this sector.
    static std::optional<int> to_half(const ProblemSpec& prob, int n1)
    {
        if (prob.dimension > 1) {
            return n1;
        }
        bool even_sector = prob.sector == parity_sector::u1_even;
        bool even_label = (n1 % 2) == 0;
        if (even_sector != even_label) {
            return std::nullopt; // parity mismatch: no such state in this sector
        }
        return even_sector ? n1 / 2 : (n1 - 1) / 2;
    }

    static int to_convention(const ProblemSpec& prob, int half)
    {
        if (prob.dimension > 1) return half;
        return prob.sector == parity_sector::u1_even ? 2 * half : 2 * half + 1;
    }
};

} // namespace

RadialSolution solve_state_from_scan(const ProblemSpec& prob, int target_n1,
                                     const SpectrumScan& scan, const ShootingConfig& cfg)
{
    if (target_n1 < 0) {
        throw spec_error("solve_state: target node count must be nonnegative");
    }
    if (!scan.monotone) {
        throw numerical_error("solve_state: scan node counts are not monotone (" +
                              scan.diagnostic + ")");
    }

    auto available = [&]() {
        std::vector<int> out;
        for (const auto& b : scan.brackets) {
            out.push_back(LabelMap::to_convention(prob, b.label));
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    };

    std::optional<int> half = LabelMap::to_half(prob, target_n1);
    if (!half) {
        std::ostringstream os;
        os << "no state with n1 = " << target_n1 << " exists in the "
           << (prob.sector == parity_sector::u1_even ? "u1-even" : "u1-odd")
           << " sector (label parity mismatch)";
        throw state_not_found_error(os.str(), available());
    }

    // Prefer exactly-labelled brackets but also try off-by-one labels:
    // counts sampled at bracket edges can lag the eigenvalue. Every
    // candidate is verified by recounting the assembled state.
    std::vector<const EnergyBracket*> candidates;
    for (int delta : {0, -1, +1}) {
        for (const auto& b : scan.brackets) {
            if (b.label == *half + delta) {
                candidates.push_back(&b);
            }
        }
    }

    std::optional<RadialSolution> found;
    for (const EnergyBracket* b : candidates) {
        RadialSolution sol = solve_bracket(prob, *b, cfg);
        if (sol.n1 == target_n1) {
            if (found && std::abs(found->energy - sol.energy) >
                             100.0 * energy_tolerance(prob, cfg)) {
                std::ostringstream os;
                os << "two distinct states carry the label n1 = " << target_n1 << " (E = "
                   << found->energy << " and " << sol.energy << ")";
                throw numerical_error(os.str());
            }
            if (!found) found = std::move(sol);
        }
    }
    if (found) return *found;

    std::ostringstream os;
    os << "no bound state with n1 = " << target_n1 << " found";
    throw state_not_found_error(os.str(), available());
}

RadialSolution solve_state(const ProblemSpec& prob, int target_n1, const ShootingConfig& cfg)
{
    ValidationReport rep = validate(prob.potential, default_validation_grid(prob.mass));
    if (!rep.pass()) {
        throw spec_error("potential fails the bound-state hypotheses: " + rep.detail);
    }
    SpectrumScan scan = spectrum_scan(prob, cfg);
    return solve_state_from_scan(prob, target_n1, scan, cfg);
}

std::vector<RadialSolution> solve_spectrum(const ProblemSpec& prob, const ShootingConfig& cfg)
{
    ValidationReport rep = validate(prob.potential, default_validation_grid(prob.mass));
    if (!rep.pass()) {
        throw spec_error("potential fails the bound-state hypotheses: " + rep.detail);
    }
    SpectrumScan scan = spectrum_scan(prob, cfg);
    if (!scan.monotone) {
        throw numerical_error("spectrum: scan node counts are not monotone (" + scan.diagnostic +
                              ")");
    }
    std::vector<RadialSolution> out;
    for (const auto& b : scan.brackets) {
        if (out.size() >= static_cast<std::size_t>(cfg.max_states)) break;
        out.push_back(solve_bracket(prob, b, cfg));
    }
    std::sort(out.begin(), out.end(),
              [](const RadialSolution& a, const RadialSolution& b) { return a.energy < b.energy; });
    return out;
}

double coulomb_oracle(int d, double j, int tau, double v, int n_r, double m)
{
    double k = k_index(d, j, tau);
    if (!(v > 0) || !(m > 0)) {
        throw spec_error("coulomb_oracle: v and m must be positive");
    }
    if (!(v < std::abs(k))) {
        throw supercritical_error("coulomb_oracle: v >= |k_d| has no real indicial exponent");
    }
    if (n_r < 0 || (n_r == 0 && k > 0)) {
        throw spec_error("coulomb_oracle: the n_r = 0 state exists only for k_d < 0");
    }
    double gamma = std::sqrt(k * k - v * v);
    double q = v / (n_r + gamma);
    return m / std::sqrt(1.0 + q * q);
}

} // namespace dirac
