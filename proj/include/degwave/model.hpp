#pragma once

#include <cmath>
#include <stdexcept>

namespace degwave {

// Parameters (p, c, delta) of the traveling-wave problem for
//   u_t = u^p (u_xx + u) - delta * u.
// p is a positive even integer, c > 0 is the wave speed, delta is 0 or 1.
class ModelParams {
public:
    ModelParams(int p, double c, int delta) : p_(p), c_(c), delta_(delta) {
        if (p < 2 || p % 2 != 0)
            throw std::invalid_argument("ModelParams: p must be a positive even integer");
        if (!std::isfinite(c) || c <= 0.0)
            throw std::invalid_argument("ModelParams: c must be positive and finite");
        if (delta != 0 && delta != 1)
            throw std::invalid_argument("ModelParams: delta must be 0 or 1");
    }

    int p() const { return p_; }
    double c() const { return c_; }
    int delta() const { return delta_; }

private:
    int p_;
    double c_;
    int delta_;
};

// A point of the planar wave system: phi is the profile value, psi its derivative.
struct PhaseState {
    double phi = 0.0;
    double psi = 0.0;
};

// x^n for small non-negative integer n. Used instead of std::pow so the serial
// and parallel kernels share one exactly-reproducible code path.
inline double pow_int(double x, int n) {
    double r = 1.0;
    double b = x;
    for (int m = n; m > 0; m >>= 1) {
        if (m & 1) r *= b;
        b *= b;
    }
    return r;
}

}  // namespace degwave
