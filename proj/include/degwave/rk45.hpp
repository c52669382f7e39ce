#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

#include "degwave/errors.hpp"

namespace degwave {

template <std::size_t N>
using State = std::array<double, N>;

struct StepperOptions {
    double tol = 1e-10;                 // atol = rtol = tol
    double h_init = 0.0;                // 0 -> choose automatically
    double h_max = 0.0;                 // 0 -> unlimited
    std::size_t max_steps = 20'000'000;
    double interp_error_factor = 10.0;  // linear interpolation between emitted
                                        // samples stays below factor * tol
    std::size_t max_substeps = 64;
};

enum class IntegrationOutcome { ReachedEnd, StoppedByObserver };

namespace detail {

template <std::size_t N>
inline bool all_finite(const State<N>& y) {
    for (double v : y)
        if (!std::isfinite(v)) return false;
    return true;
}

// Dormand-Prince 5(4) coefficients, FSAL form.
struct Dopri5Coeffs {
    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                            a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                            a65 = -5103.0 / 18656.0;
    static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0,
                            a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                            a76 = 11.0 / 84.0;
    static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                            c5 = 8.0 / 9.0;
    // y5 - y4, applied to the stages.
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                            e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                            e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    // dense-output weights
    static constexpr double d1 = -12715105075.0 / 11282082432.0;
    static constexpr double d3 = 87487479700.0 / 32700410799.0;
    static constexpr double d4 = -10690763975.0 / 1880347072.0;
    static constexpr double d5 = 701980252875.0 / 199316789632.0;
    static constexpr double d6 = -1453857185.0 / 822651844.0;
    static constexpr double d7 = 69997945.0 / 29380423.0;
};

// One Dormand-Prince step from (t, y) with step h. k[0] must hold f(t, y) on
// entry; on exit k[6] = f(t+h, y_new) (FSAL). Returns the weighted RMS error.
template <std::size_t N, typename Field>
double dopri5_step(Field& f, double t, const State<N>& y, double h,
                   State<N> k[7], State<N>& y_new, double tol) {
    using C = Dopri5Coeffs;
    State<N> tmp;

    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * C::a21 * k[0][i];
    k[1] = f(t + C::c2 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (C::a31 * k[0][i] + C::a32 * k[1][i]);
    k[2] = f(t + C::c3 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (C::a41 * k[0][i] + C::a42 * k[1][i] + C::a43 * k[2][i]);
    k[3] = f(t + C::c4 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (C::a51 * k[0][i] + C::a52 * k[1][i] + C::a53 * k[2][i] +
                             C::a54 * k[3][i]);
    k[4] = f(t + C::c5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (C::a61 * k[0][i] + C::a62 * k[1][i] + C::a63 * k[2][i] +
                             C::a64 * k[3][i] + C::a65 * k[4][i]);
    k[5] = f(t + h, tmp);
    for (std::size_t i = 0; i < N; ++i)
        y_new[i] = y[i] + h * (C::a71 * k[0][i] + C::a73 * k[2][i] + C::a74 * k[3][i] +
                               C::a75 * k[4][i] + C::a76 * k[5][i]);
    k[6] = f(t + h, y_new);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double e = h * (C::e1 * k[0][i] + C::e3 * k[2][i] + C::e4 * k[3][i] +
                              C::e5 * k[4][i] + C::e6 * k[5][i] + C::e7 * k[6][i]);
        const double sk = tol + tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        err += (e / sk) * (e / sk);
    }
    return std::sqrt(err / static_cast<double>(N));
}

// Fourth-order dense output over one accepted step.
template <std::size_t N>
struct DenseInterp {
    State<N> rc1, rc2, rc3, rc4, rc5;

    void build(const State<N>& y0, const State<N>& y1, const State<N> k[7], double h) {
        using C = Dopri5Coeffs;
        for (std::size_t i = 0; i < N; ++i) {
            const double ydiff = y1[i] - y0[i];
            const double bspl = h * k[0][i] - ydiff;
            rc1[i] = y0[i];
            rc2[i] = ydiff;
            rc3[i] = bspl;
            rc4[i] = ydiff - h * k[6][i] - bspl;
            rc5[i] = h * (C::d1 * k[0][i] + C::d3 * k[2][i] + C::d4 * k[3][i] +
                          C::d5 * k[4][i] + C::d6 * k[5][i] + C::d7 * k[6][i]);
        }
    }

    State<N> eval(double theta) const {
        State<N> y;
        const double th1 = 1.0 - theta;
        for (std::size_t i = 0; i < N; ++i)
            y[i] = rc1[i] +
                   theta * (rc2[i] + th1 * (rc3[i] + theta * (rc4[i] + th1 * rc5[i])));
        return y;
    }
};

}  // namespace detail

// Adaptive Dormand-Prince 5(4) with PI step-size control. The observer is
// called for every emitted sample, (t0, y0) first; samples are dense enough
// that linear interpolation between them stays below
// interp_error_factor * tol. Observer returns false to stop.
template <std::size_t N, typename Field, typename Observer>
IntegrationOutcome integrate_dopri5(Field&& field, double t0, const State<N>& y0,
                                    double t_end, const StepperOptions& opt,
                                    Observer&& observer) {
    if (!detail::all_finite(y0)) throw NonFiniteState("integrate: non-finite initial state");
    if (t_end == t0) {
        observer(t0, y0);
        return IntegrationOutcome::ReachedEnd;
    }
    const double dir = (t_end > t0) ? 1.0 : -1.0;

    State<N> y = y0;
    State<N> k[7];
    k[0] = field(t0, y);
    if (!detail::all_finite(k[0]))
        throw NonFiniteState("integrate: vector field non-finite at initial state");

    if (!observer(t0, y)) return IntegrationOutcome::StoppedByObserver;

    // initial step from the scale of y and f
    double h;
    if (opt.h_init > 0.0) {
        h = opt.h_init;
    } else {
        double ny = 0.0, nf = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            ny = std::max(ny, std::abs(y[i]));
            nf = std::max(nf, std::abs(k[0][i]));
        }
        h = 0.01 * (1.0 + ny) / (1.0 + nf);
        h = std::min(h, std::abs(t_end - t0));
    }
    if (opt.h_max > 0.0) h = std::min(h, opt.h_max);

    constexpr double beta = 0.04;
    constexpr double expo1 = 0.2 - beta * 0.75;
    constexpr double safe = 0.9;
    constexpr double fac1 = 0.2;   // max shrink per step: 5x
    constexpr double fac2 = 10.0;  // max growth per step: 10x
    double facold = 1e-4;
    bool last_rejected = false;

    double t = t0;
    for (std::size_t step = 0; step < opt.max_steps; ++step) {
        const double remaining = std::abs(t_end - t);
        bool final_step = false;
        if (h >= remaining) {
            h = remaining;
            final_step = true;
        }
        if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0))
            throw StepSizeUnderflow("integrate: step size underflow; field is stiff or singular");

        State<N> y_new;
        const double err = detail::dopri5_step<N>(field, t, y, dir * h, k, y_new, opt.tol);

        if (!(err <= 1.0) || !detail::all_finite(y_new)) {
            // reject (including NaN error estimates)
            const double fac11 = std::isfinite(err) ? std::pow(err, expo1) : fac2;
            h /= std::min(1.0 / fac1, fac11 / safe);
            last_rejected = true;
            continue;
        }

        // accept; emit dense samples so linear interpolation error stays small
        detail::DenseInterp<N> dense;
        dense.build(y, y_new, k, dir * h);

        double curvature = 0.0;  // max_i |y''| / scale_i, estimated from slope change
        for (std::size_t i = 0; i < N; ++i) {
            const double sk = 1.0 + std::max(std::abs(y[i]), std::abs(y_new[i]));
            curvature = std::max(curvature, std::abs(k[6][i] - k[0][i]) / (h * sk));
        }
        std::size_t n_sub = 1;
        // 8 h^2 from the interpolation bound, halved for slack in the
        // end-slope curvature estimate
        const double budget = 4.0 * opt.interp_error_factor * opt.tol;
        if (curvature > 0.0) {
            const double h_sub = std::sqrt(budget / curvature);
            if (h_sub < h)
                n_sub = std::min<std::size_t>(
                    opt.max_substeps, static_cast<std::size_t>(std::ceil(h / h_sub)));
        }

        const double t_new = final_step ? t_end : t + dir * h;
        bool stop = false;
        for (std::size_t j = 1; j <= n_sub && !stop; ++j) {
            if (j < n_sub) {
                const double theta = static_cast<double>(j) / static_cast<double>(n_sub);
                stop = !observer(t + dir * h * theta, dense.eval(theta));
            } else {
                stop = !observer(t_new, y_new);
            }
        }
        if (stop) return IntegrationOutcome::StoppedByObserver;
        if (final_step) return IntegrationOutcome::ReachedEnd;

        t = t_new;
        y = y_new;
        k[0] = k[6];  // FSAL

        const double fac11 = std::pow(std::max(err, 1e-30), expo1);
        double fac = fac11 / std::pow(facold, beta);
        fac = std::max(1.0 / fac2, std::min(1.0 / fac1, fac / safe));
        double h_new = h / fac;
        if (last_rejected) h_new = std::min(h_new, h);  // no growth right after a rejection
        last_rejected = false;
        facold = std::max(err, 1e-4);
        h = h_new;
        if (opt.h_max > 0.0) h = std::min(h, opt.h_max);
    }
    throw std::runtime_error("integrate: step budget exhausted");
}

namespace detail {

// Fixed-step driver used by the order-of-convergence tests.
template <std::size_t N, typename Field>
State<N> dopri5_fixed(Field&& field, double t0, State<N> y, double t1, int n_steps) {
    const double h = (t1 - t0) / n_steps;
    State<N> k[7];
    k[0] = field(t0, y);
    for (int s = 0; s < n_steps; ++s) {
        State<N> y_new;
        dopri5_step<N>(field, t0 + s * h, y, h, k, y_new, 1.0);
        y = y_new;
        k[0] = k[6];
    }
    return y;
}

}  // namespace detail

}  // namespace degwave
