#pragma once

#include <stdexcept>

namespace degwave {

// Real branches of the Lambert W function, the inverse of y -> y * e^y.
//   Principal (W0): defined on [-1/e, inf), range [-1, inf)
//   Lower (W-1):    defined on [-1/e, 0),  range (-inf, -1]
enum class WBranch { Principal, Lower };

// Evaluate the requested branch. The result y satisfies y*e^y = x with
// relative residual below 1e-13 * max(1, |x|) away from the conditioning
// limit (|x| beyond ~1e150 the identity itself is condition-limited).
// Throws std::domain_error outside the branch domain.
double lambert_w(WBranch branch, double x);

// |y e^y - x| / max(1, |x|), evaluated overflow-safely.
double lambert_w_residual(double y, double x);

namespace detail {

// W0(e^t) for t >= 2, evaluated without forming e^t. Used where the argument
// of W grows like e^{|s|} and would overflow double.
double lambert_w0_log_arg(double t);

}  // namespace detail

}  // namespace degwave
