#include "degwave/lambert_w.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace degwave {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Series around the branch point x = -1/e in q = +-sqrt(2(e*x + 1)):
//   W = -1 + q - q^2/3 + 11 q^3/72 - 43 q^4/540 + 769 q^5/17280 - 221 q^6/8505
double branch_point_series(double q) {
    return -1.0 +
           q * (1.0 +
                q * (-1.0 / 3.0 +
                     q * (11.0 / 72.0 +
                          q * (-43.0 / 540.0 +
                               q * (769.0 / 17280.0 + q * (-221.0 / 8505.0))))));
}

// Halley iteration on f(y) = y e^y - x. Converges cubically from the seeds
// below; the step tolerance matches a couple of ulps in y.
// lo/hi keep the iterates inside the open branch range, away from the
// derivative zero at y = -1.
double halley(double x, double y, double lo, double hi) {
    for (int it = 0; it < 50; ++it) {
        const double ey = std::exp(y);
        const double f = y * ey - x;
        // conditioning floor: f itself carries ~eps*|x| of rounding noise, so
        // once |f| is at that level the iterate cannot be improved (this is
        // what terminates near the branch point, where f' -> 0)
        if (std::abs(f) <= 8.0 * kEps * std::abs(x)) return y;
        const double fp = ey * (y + 1.0);
        const double denom = fp - (y + 2.0) * f / (2.0 * (y + 1.0));
        const double step = f / denom;
        y -= step;
        if (y < lo) y = lo;
        if (y > hi) y = hi;
        if (std::abs(step) <= 4.0 * kEps * (1.0 + std::abs(y))) return y;
    }
    throw std::runtime_error("lambert_w: Halley iteration did not converge");
}

double principal(double x) {
    const double min_x = -std::exp(-1.0);
    if (x == min_x) return -1.0;
    const double d = x - min_x;  // = x + 1/e >= 0
    if (d < 1e-6) return branch_point_series(std::sqrt(2.0 * std::exp(1.0) * d));
    if (x > 1e150) return detail::lambert_w0_log_arg(std::log(x));

    double seed;
    if (x < -0.25) {
        seed = branch_point_series(std::sqrt(2.0 * std::exp(1.0) * d));
    } else if (x <= std::exp(1.0)) {
        seed = std::min(x, 1.0);
    } else {
        const double l1 = std::log(x), l2 = std::log(l1);
        seed = l1 - l2 + l2 / l1;
    }
    return halley(x, seed, -1.0 + 1e-12, std::numeric_limits<double>::infinity());
}

double lower(double x) {
    const double min_x = -std::exp(-1.0);
    if (x == min_x) return -1.0;
    const double d = x - min_x;
    if (d < 1e-6) return branch_point_series(-std::sqrt(2.0 * std::exp(1.0) * d));

    double seed;
    if (x > -0.27) {
        const double l1 = std::log(-x), l2 = std::log(-l1);
        seed = l1 - l2 + l2 / l1;
    } else {
        seed = branch_point_series(-std::sqrt(2.0 * std::exp(1.0) * d));
    }
    return halley(x, seed, -std::numeric_limits<double>::infinity(), -1.0 - 1e-12);
}

}  // namespace

double lambert_w(WBranch branch, double x) {
    if (!std::isfinite(x)) throw std::domain_error("lambert_w: non-finite argument");
    const double min_x = -std::exp(-1.0);
    if (x < min_x)
        throw std::domain_error("lambert_w: x = " + std::to_string(x) +
                                " is below the branch point -1/e");
    if (branch == WBranch::Lower && x >= 0.0)
        throw std::domain_error("lambert_w: lower branch requires x < 0");
    return branch == WBranch::Principal ? principal(x) : lower(x);
}

double lambert_w_residual(double y, double x) {
    // y e^y without overflow: go through exp(y + log y) once y e^y could
    // exceed double range.
    double yey;
    if (y > 1.0) {
        yey = std::exp(y + std::log(y));
    } else {
        yey = y * std::exp(y);
    }
    return std::abs(yey - x) / std::max(1.0, std::abs(x));
}

namespace detail {

double lambert_w0_log_arg(double t) {
    // Solve y + log y = t (Newton; g' = 1 + 1/y).
    double y = (t > 2.0) ? t - std::log(t) : 1.0;
    for (int it = 0; it < 32; ++it) {
        const double g = y + std::log(y) - t;
        const double step = g * y / (y + 1.0);
        y -= step;
        if (std::abs(step) <= 2.0 * kEps * (1.0 + std::abs(y))) break;
    }
    return y;
}

}  // namespace detail

}  // namespace degwave
