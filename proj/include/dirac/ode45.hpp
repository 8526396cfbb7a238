#ifndef DIRAC_ODE45_HPP
#define DIRAC_ODE45_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include "dirac/errors.hpp"

namespace dirac::ode {

using vec2 = std::array<double, 2>;

inline vec2 operator+(const vec2& a, const vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline vec2 operator-(const vec2& a, const vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline vec2 operator*(double s, const vec2& a) { return {s * a[0], s * a[1]}; }
inline double norm2(const vec2& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1]); }
inline double amax(const vec2& a) { return std::max(std::abs(a[0]), std::abs(a[1])); }

struct Options {
    double rtol = 1e-10;
    /// Interpreted relative to the running solution magnitude, not absolutely.
    double atol = 1e-14;
    /// Rescale the state by 1/max|y| past this threshold. Valid for linear
    /// homogeneous systems only (the scaled function is again a solution).
    double rescale_threshold = std::numeric_limits<double>::infinity();
    double initial_step = 0.0; // 0 = choose automatically
    /// Cap on |h|; 0 = unlimited. Ties interpolant accuracy to an output
    /// grid when derivative quantities are read off dense samples.
    double max_step = 0.0;
    long max_steps = 4000000;
};

/// One accepted step with its quartic dense-output interpolant.
struct StepView {
    double t0 = 0, t1 = 0;
    vec2 y0{}, y1{};
    vec2 rc1{}, rc2{}, rc3{}, rc4{}, rc5{};

    /// State at t0 + s (t1 - t0), s in [0, 1].
    vec2 eval(double s) const
    {
        double s1 = 1.0 - s;
        vec2 out;
        for (int i = 0; i < 2; ++i) {
            out[i] = rc1[i] + s * (rc2[i] + s1 * (rc3[i] + s * (rc4[i] + s1 * rc5[i])));
        }
        return out;
    }
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

template <class RHS>
double initial_step_guess(RHS&& f, double t0, const vec2& y0, const vec2& f0, double dir,
                          double span, double rtol, double atol)
{
    double ymag = std::max(amax(y0), 1e-300);
    double sc = atol * ymag + rtol * ymag;
    double d0 = norm2(y0) / sc;
    double d1n = norm2(f0) / sc;
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 * span : 0.01 * (d0 / d1n);
    h0 = std::min(h0, span);

    vec2 y1 = y0 + (dir * h0) * f0;
    vec2 f1;
    f(t0 + dir * h0, y1, f1);
    double d2 = norm2(f1 - f0) / sc / h0;
    double m = std::max(d1n, d2);
    double h1 = (m <= 1e-15) ? std::max(1e-6 * span, h0 * 1e-3)
                             : std::pow(0.01 / m, 0.2);
    return dir * std::min({100.0 * h0, h1, span});
}

} // namespace detail

/// Adaptive Dormand-Prince 5(4) for a two-component first-order system.
///
/// Integrates y' = f(t, y) from t0 to t1 (either direction). After every
/// accepted step `on_step(const StepView&)` is invoked; when the state is
/// renormalized `on_rescale(factor)` fires so collectors can rescale stored
/// history. Returns the accumulated log of all rescale factors (so the true
/// solution is exp(-scale_log) times the final state).
template <class RHS, class StepFn, class RescaleFn>
double integrate(RHS&& f, double t0, vec2& y, double t1, const Options& opt, StepFn&& on_step,
                 RescaleFn&& on_rescale)
{
    using namespace detail;
    if (!(t1 != t0)) {
        throw spec_error("ode45: empty integration interval");
    }
    const double dir = (t1 > t0) ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    double scale_log = 0.0;

    vec2 k1, k2, k3, k4, k5, k6, k7, ynew, yerr;
    double t = t0;
    f(t, y, k1);

    double h = opt.initial_step != 0.0
                   ? dir * std::min(std::abs(opt.initial_step), span)
                   : initial_step_guess(f, t0, y, k1, dir, span, opt.rtol, opt.atol);
    if (opt.max_step > 0 && std::abs(h) > opt.max_step) {
        h = dir * opt.max_step;
    }

    const double hmin_abs = 1e-14 * span;
    long nstep = 0;
    bool last = false;

    while (!last) {
        if (++nstep > opt.max_steps) {
            throw integration_failure("ode45: step limit exceeded at t = " + std::to_string(t), t);
        }
        if (dir * (t + h - t1) >= 0.0) {
            h = t1 - t;
            last = true;
        }
        if (std::abs(h) < hmin_abs || std::abs(h) < 4.0 * std::numeric_limits<double>::epsilon() * std::abs(t)) {
            throw integration_failure("ode45: step size underflow at t = " + std::to_string(t), t);
        }

        vec2 yt;
        for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * a21 * k1[i];
        f(t + c2 * h, yt, k2);
        for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(t + c3 * h, yt, k3);
        for (int i = 0; i < 2; ++i) yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(t + c4 * h, yt, k4);
        for (int i = 0; i < 2; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(t + c5 * h, yt, k5);
        for (int i = 0; i < 2; ++i)
            yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        f(t + h, yt, k6);
        for (int i = 0; i < 2; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        f(t + h, ynew, k7);
        for (int i = 0; i < 2; ++i)
            yerr[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);

        double ymag = std::max({amax(y), amax(ynew), 1e-300});
        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            double sc = opt.atol * ymag + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            sc = std::max(sc, 1e-300);
            double q = yerr[i] / sc;
            err += q * q;
        }
        err = std::sqrt(0.5 * err);

        if (err <= 1.0) {
            StepView sv;
            sv.t0 = t;
            sv.t1 = t + h;
            sv.y0 = y;
            sv.y1 = ynew;
            for (int i = 0; i < 2; ++i) {
                double ydiff = ynew[i] - y[i];
                double bspl = h * k1[i] - ydiff;
                sv.rc1[i] = y[i];
                sv.rc2[i] = ydiff;
                sv.rc3[i] = bspl;
                sv.rc4[i] = ydiff - h * k7[i] - bspl;
                sv.rc5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                                 d7 * k7[i]);
            }
            on_step(sv);

            t += h;
            y = ynew;
            k1 = k7; // FSAL

            double m = amax(y);
            if (m > opt.rescale_threshold) {
                double s = 1.0 / m;
                y[0] *= s;
                y[1] *= s;
                k1[0] *= s; // derivative of a scaled solution of a linear system
                k1[1] *= s;
                scale_log += std::log(m);
                on_rescale(s);
            }

            double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
            fac = std::min(5.0, std::max(0.2, fac));
            h *= fac;
            if (opt.max_step > 0 && std::abs(h) > opt.max_step) {
                h = dir * opt.max_step;
            }
        } else {
            double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
            h *= std::min(1.0, fac);
            last = false;
        }
        if (dir * h <= 0) {
            throw integration_failure("ode45: direction loss at t = " + std::to_string(t), t);
        }
    }
    return scale_log;
}

/// Convenience overload without rescale notification.
template <class RHS, class StepFn>
double integrate(RHS&& f, double t0, vec2& y, double t1, const Options& opt, StepFn&& on_step)
{
    return integrate(f, t0, y, t1, opt, on_step, [](double) {});
}

} // namespace dirac::ode

#endif
