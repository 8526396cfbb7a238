#include "dirac/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace dirac {

namespace {

constexpr double kSignificance = 1e-8; // relative sample significance

int sgn(double x) { return (x > 0) - (x < 0); }

double wrap_to_pi(double a)
{
    constexpr double pi = std::numbers::pi;
    while (a > pi) a -= 2 * pi;
    while (a < -pi) a += 2 * pi;
    return a;
}

std::vector<std::size_t> significant_indices(std::span<const double> values, double threshold)
{
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::abs(values[i]) >= threshold) idx.push_back(i);
    }
    return idx;
}

double peak(std::span<const double> values)
{
    double m = 0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

} // namespace

std::string verdict_name(clause_verdict v)
{
    switch (v) {
        case clause_verdict::pass: return "pass";
        case clause_verdict::fail: return "fail";
        case clause_verdict::not_applicable: return "not_applicable";
    }
    return "?";
}

int count_nodes(std::span<const double> values, std::span<const double> radii,
                count_domain domain)
{
    if (values.size() != radii.size() || values.size() < 2) {
        throw spec_error("count_nodes: need matching value/radius arrays");
    }
    double vmax = peak(values);
    int half = 0;
    if (vmax > 0) {
        double thr = kSignificance * vmax;
        auto sig = significant_indices(values, thr);
        if (!sig.empty()) {
            // Interior runs of >= 2 negligible samples mean the grid cannot
            // distinguish a crossing from a tangency.
            std::size_t run = 0;
            for (std::size_t i = sig.front(); i <= sig.back(); ++i) {
                if (std::abs(values[i]) < thr) {
                    if (++run >= 2) {
                        std::ostringstream os;
                        os << "ambiguous nodes: consecutive negligible samples near r = "
                           << radii[i];
                        throw ambiguous_node_error(os.str());
                    }
                } else {
                    run = 0;
                }
            }
            int last = 0;
            for (std::size_t i : sig) {
                int s = sgn(values[i]);
                if (last != 0 && s != last) ++half;
                last = s;
            }
        }
    }
    switch (domain) {
        case count_domain::half_line: return half;
        case count_domain::full_line_even: return 2 * half;
        case count_domain::full_line_odd: return 2 * half + 1;
    }
    return half;
}

std::vector<double> node_radii(std::span<const double> values, std::span<const double> radii)
{
    std::vector<double> out;
    double vmax = peak(values);
    if (vmax == 0) return out;
    auto sig = significant_indices(values, kSignificance * vmax);
    for (std::size_t k = 0; k + 1 < sig.size(); ++k) {
        std::size_t a = sig[k], b = sig[k + 1];
        if (sgn(values[a]) != sgn(values[b])) {
            double va = std::abs(values[a]), vb = std::abs(values[b]);
            out.push_back(radii[a] + (radii[b] - radii[a]) * va / (va + vb));
        }
    }
    return out;
}

bool NodalReport::theorem_pass() const
{
    auto it = clauses.find("theorem");
    return it != clauses.end() && it->second == clause_verdict::pass;
}

bool NodalReport::all_pass() const
{
    for (const auto& [name, v] : clauses) {
        if (v == clause_verdict::fail) return false;
    }
    return true;
}

namespace {

double local_spacing(const std::vector<double>& r, double at)
{
    auto hi = std::upper_bound(r.begin(), r.end(), at);
    if (hi == r.begin() || hi == r.end()) {
        return r.size() > 1 ? r[1] - r[0] : 0.0;
    }
    std::size_t i = static_cast<std::size_t>(hi - r.begin());
    return r[i] - r[i - 1];
}

struct Crossing {
    double r;
    int component;  // 1 or 2
    double dphi;    // unwrapped angle change across the crossing interval
};

std::vector<Crossing> find_crossings(const Trajectory& tr, const std::vector<double>& phi,
                                     int component)
{
    const std::vector<double>& vals = component == 1 ? tr.psi1 : tr.psi2;
    std::vector<Crossing> out;
    double vmax = peak(vals);
    if (vmax == 0) return out;
    auto sig = significant_indices(vals, kSignificance * vmax);
    for (std::size_t k = 0; k + 1 < sig.size(); ++k) {
        std::size_t a = sig[k], b = sig[k + 1];
        if (sgn(vals[a]) != sgn(vals[b])) {
            double va = std::abs(vals[a]), vb = std::abs(vals[b]);
            double rn = tr.r[a] + (tr.r[b] - tr.r[a]) * va / (va + vb);
            out.push_back({rn, component, phi[b] - phi[a]});
        }
    }
    return out;
}

} // namespace

OrbitTrace orbit_trace(const RadialSolution& sol)
{
    const Trajectory& tr = sol.trajectory;
    const ProblemSpec& prob = sol.problem;
    if (tr.size() < 3) {
        throw spec_error("orbit_trace: trajectory too short");
    }

    OrbitTrace ot;
    ot.r = tr.r;
    ot.psi1 = tr.psi1;
    ot.psi2 = tr.psi2;

    const std::size_t n = tr.size();
    ot.phi.resize(n);
    ot.phi[0] = std::atan2(tr.psi2[0], tr.psi1[0]);
    for (std::size_t i = 1; i < n; ++i) {
        double raw = std::atan2(tr.psi2[i], tr.psi1[i]);
        double prev = std::atan2(tr.psi2[i - 1], tr.psi1[i - 1]);
        ot.phi[i] = ot.phi[i - 1] + wrap_to_pi(raw - prev);
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    double p1max = peak(tr.psi1);
    double thr1 = kSignificance * p1max;
    ot.rho.resize(n, nan);
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(tr.psi1[i]) >= thr1 && thr1 > 0) {
            ot.rho[i] = tr.psi2[i] / tr.psi1[i];
        }
    }

    ot.riccati_residual.resize(n, nan);
    if (prob.dimension > 1) {
        double k = prob.k_d();
        for (std::size_t i = 1; i + 1 < n; ++i) {
            double rm = ot.rho[i - 1], r0 = ot.rho[i], rp = ot.rho[i + 1];
            if (std::isnan(rm) || std::isnan(r0) || std::isnan(rp)) continue;
            double h1 = tr.r[i] - tr.r[i - 1];
            double h2 = tr.r[i + 1] - tr.r[i];
            double drho = -h2 / (h1 * (h1 + h2)) * rm + (h2 - h1) / (h1 * h2) * r0 +
                          h1 / (h2 * (h1 + h2)) * rp;
            double radius = tr.r[i];
            double W1v = w1(prob, sol.energy, radius);
            double W2v = w2(prob, sol.energy, radius);
            double rhs = 2.0 * k * r0 / radius - W2v - W1v * r0 * r0;
            ot.riccati_residual[i] = std::abs(drho - rhs);
        }
    }

    // Axis crossings inside the node region, with the local angle change.
    std::vector<Crossing> crossings;
    for (int comp : {1, 2}) {
        auto c = find_crossings(tr, ot.phi, comp);
        crossings.insert(crossings.end(), c.begin(), c.end());
    }
    std::sort(crossings.begin(), crossings.end(),
              [](const Crossing& a, const Crossing& b) { return a.r < b.r; });
    if (sol.r_c) {
        double rc = *sol.r_c;
        std::erase_if(crossings, [&](const Crossing& c) {
            return c.r > rc + 2.0 * local_spacing(tr.r, c.r);
        });
    }

    ot.crossings = static_cast<int>(crossings.size());
    if (crossings.empty()) {
        ot.rotation = clause_verdict::not_applicable;
        ot.rotation_detail = "no axis crossings in the node region";
        return ot;
    }

    int neg = 0, pos = 0;
    for (const auto& c : crossings) {
        if (c.dphi < 0) ++neg;
        if (c.dphi > 0) ++pos;
    }
    std::ostringstream os;
    if (prob.dimension > 1) {
        bool clockwise = (neg == ot.crossings);
        ot.rotation = clockwise ? clause_verdict::pass : clause_verdict::fail;
        os << (clockwise ? "clockwise" : (pos == ot.crossings ? "counterclockwise" : "mixed"))
           << " at " << ot.crossings << " crossing(s)";
    } else {
        ot.rotation = clause_verdict::not_applicable;
        os << (pos == ot.crossings ? "counterclockwise"
                                   : (neg == ot.crossings ? "clockwise" : "mixed"))
           << " at " << ot.crossings << " crossing(s) (informational for d = 1)";
    }
    ot.rotation_detail = os.str();
    return ot;
}

NodalReport verify_structure(const RadialSolution& sol)
{
    const ProblemSpec& prob = sol.problem;
    const Trajectory& tr = sol.trajectory;
    const bool d1 = prob.dimension == 1;

    NodalReport rep;
    rep.n1 = sol.n1;
    rep.n2 = sol.n2;
    rep.theorem_expected_n2 = (d1 || sol.k_d > 0) ? sol.n1 + 1 : sol.n1;

    auto set = [&](const std::string& name, clause_verdict v, const std::string& detail) {
        rep.clauses[name] = v;
        rep.details[name] = detail;
    };

    {
        std::ostringstream os;
        os << "n1 = " << rep.n1 << ", n2 = " << rep.n2 << ", expected n2 = "
           << rep.theorem_expected_n2;
        set("theorem",
            rep.n2 == rep.theorem_expected_n2 ? clause_verdict::pass : clause_verdict::fail,
            os.str());
    }

    rep.psi1_nodes = node_radii(tr.psi1, tr.r);
    rep.psi2_nodes = node_radii(tr.psi2, tr.r);

    {
        bool ok = true;
        std::ostringstream os;
        if (!sol.r_c) {
            ok = rep.psi1_nodes.empty() && rep.psi2_nodes.empty();
            os << (ok ? "W2 < 0 everywhere and no nodes"
                      : "nodes present although W2 never changes sign");
        } else {
            double rc = *sol.r_c;
            double worst = 0;
            for (const auto* list : {&rep.psi1_nodes, &rep.psi2_nodes}) {
                for (double rn : *list) {
                    double slack = 2.0 * local_spacing(tr.r, rn);
                    worst = std::max(worst, rn - rc);
                    if (rn > rc + slack) ok = false;
                }
            }
            os << "max(node radius - r_c) = " << worst << ", r_c = " << rc;
        }
        set("node_region", ok ? clause_verdict::pass : clause_verdict::fail, os.str());
    }

    {
        struct Tagged {
            double r;
            int comp;
        };
        std::vector<Tagged> merged;
        for (double r : rep.psi1_nodes) merged.push_back({r, 1});
        for (double r : rep.psi2_nodes) merged.push_back({r, 2});
        std::sort(merged.begin(), merged.end(),
                  [](const Tagged& a, const Tagged& b) { return a.r < b.r; });
        bool ok = true;
        for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
            if (merged[i].comp == merged[i + 1].comp) ok = false;
        }
        std::string first_comp_note;
        if (d1 && !merged.empty()) {
            // On the full line the origin node belongs to the odd component,
            // so the first interior node must belong to the even one.
            int even_comp = (prob.sector == parity_sector::u1_even) ? 1 : 2;
            if (merged.front().comp != even_comp) {
                ok = false;
                first_comp_note = "; first interior node is not the even component's";
            }
        }
        std::ostringstream os;
        os << merged.size() << " node(s) merged" << (ok ? ", strictly alternating" : ", clash")
           << first_comp_note;
        set("alternation", ok ? clause_verdict::pass : clause_verdict::fail, os.str());
    }

    {
        bool ok = false;
        std::ostringstream os;
        if (!d1) {
            int s = sgn(tr.psi1.front()) * sgn(tr.psi2.front());
            ok = (s == sgn(sol.k_d)) && s != 0;
            os << "sign(psi1 psi2) = " << s << " at r = " << tr.r.front() << ", sign(k_d) = "
               << sgn(sol.k_d);
        } else {
            double m1 = peak(tr.psi1), m2 = peak(tr.psi2);
            bool even_sector = prob.sector == parity_sector::u1_even;
            const auto& vanishing = even_sector ? tr.psi2 : tr.psi1;
            const auto& standing = even_sector ? tr.psi1 : tr.psi2;
            double vthr = kSignificance * (even_sector ? m2 : m1);
            bool origin_zero = std::abs(vanishing.front()) <= vthr;
            bool origin_nonzero = std::abs(standing.front()) > kSignificance * (even_sector ? m1 : m2);
            std::size_t i = 0;
            while (i < vanishing.size() && std::abs(vanishing[i]) <= vthr) ++i;
            bool slope_ok = false;
            if (i < vanishing.size()) {
                int s_rising = sgn(vanishing[i]);
                int s_stand = sgn(standing.front());
                // u1 even: u2'(0) = W2(0) u1(0) with W2(0) > 0 -> same signs;
                // u1 odd:  u1'(0) = -W1(0) u2(0) -> opposite signs.
                slope_ok = even_sector ? (s_rising == s_stand) : (s_rising == -s_stand);
            }
            ok = origin_zero && origin_nonzero && slope_ok;
            os << (even_sector ? "u1(0) != 0, u2(0) = 0" : "u1(0) = 0, u2(0) != 0")
               << (ok ? " with the expected leaving sign" : " pattern violated");
        }
        set("origin_signs", ok ? clause_verdict::pass : clause_verdict::fail, os.str());
    }

    {
        int s = sgn(tr.psi1.back()) * sgn(tr.psi2.back());
        bool ok = d1 ? (s > 0) : (s < 0);
        std::ostringstream os;
        os << "sign(psi1 psi2) = " << s << " at r = " << tr.r.back() << " (expected "
           << (d1 ? "> 0" : "< 0") << ")";
        set("infinity_signs", ok ? clause_verdict::pass : clause_verdict::fail, os.str());
    }

    {
        OrbitTrace ot = orbit_trace(sol);
        set("orbit_rotation", d1 ? clause_verdict::not_applicable : ot.rotation,
            ot.rotation_detail);
    }

    return rep;
}

} // namespace dirac
