#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "degwave/lambert_w.hpp"
#include "test_util.hpp"

using degwave::lambert_w;
using degwave::lambert_w_residual;
using degwave::WBranch;

namespace {

// Independent oracle: bisection on the defining identity. For x > 0 the
// principal branch solves y + log y = log x (monotone in y > 0); otherwise
// bisect y e^y - x directly on the monotone piece of the branch.
double bisect_w(WBranch branch, double x) {
    double lo, hi;
    auto g = [&](double y) { return y * std::exp(y) - x; };
    if (branch == WBranch::Principal && x > 0.0) {
        lo = 1e-320;
        hi = 710.0;
        auto h = [&](double y) { return y + std::log(y) - std::log(x); };
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (h(mid) < 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
    if (branch == WBranch::Principal) {
        lo = -1.0;
        hi = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) < 0.0 ? lo : hi) = mid;  // y e^y increasing on [-1, 0]
        }
        return 0.5 * (lo + hi);
    }
    lo = -745.0;
    hi = -1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? hi : lo) = mid;  // y e^y decreasing on (-inf, -1]
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("principal branch pins trivial values") {
    CHECK(lambert_w(WBranch::Principal, 0.0) == 0.0);
    CHECK(lambert_w(WBranch::Principal, std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
    const double bp = -std::exp(-1.0);
    CHECK(lambert_w(WBranch::Principal, bp) == -1.0);
    CHECK(lambert_w(WBranch::Lower, bp) == -1.0);
}

TEST_CASE("W0(1) matches the bisection oracle") {
    const double oracle = bisect_w(WBranch::Principal, 1.0);
    CHECK(std::abs(oracle - 0.5671432904097838) < 1e-15);
    CHECK(std::abs(lambert_w(WBranch::Principal, 1.0) - oracle) < 1e-15);
}

TEST_CASE("both branches match the oracle across their domains") {
    for (double x : {-0.367879, -0.35, -0.2, -0.05, -1e-4, 1e-6, 0.3, 2.0, 10.0,
                     1e4, 1e12, 1e100}) {
        if (x < -std::exp(-1.0)) continue;
        const double y = lambert_w(WBranch::Principal, x);
        const double o = bisect_w(WBranch::Principal, x);
        CHECK(std::abs(y - o) <= 1e-12 * (1.0 + std::abs(o)));
    }
    for (double x : {-0.367879, -0.36, -0.3, -0.1, -1e-3, -1e-8, -1e-30, -1e-300}) {
        const double y = lambert_w(WBranch::Lower, x);
        const double o = bisect_w(WBranch::Lower, x);
        CHECK(std::abs(y - o) <= 1e-12 * (1.0 + std::abs(o)));
    }
}

TEST_CASE("defining identity holds to 1e-13 on log-spaced sweeps") {
    double worst = 0.0;
    for (double x : testutil::log_spaced(1e-12, 1e12, 4000))
        worst = std::max(worst, lambert_w_residual(lambert_w(WBranch::Principal, x), x));
    for (double m : testutil::log_spaced(1e-12, std::exp(-1.0) * (1.0 - 1e-12), 4000))
        worst = std::max(worst, lambert_w_residual(lambert_w(WBranch::Lower, -m), -m));
    CHECK(worst <= 1e-13);
}

TEST_CASE("inequalities: W0 > 0 for x > 0 and W0(x) < log x for x > e") {
    for (double x : testutil::log_spaced(1e-10, 1e10, 2000)) {
        const double y = lambert_w(WBranch::Principal, x);
        CHECK(y > 0.0);
        if (x > std::exp(1.0)) CHECK(y < std::log(x));
    }
}

TEST_CASE("monotonicity along each branch") {
    double prev = -2.0;
    for (double x : testutil::log_spaced(1e-10, 1e10, 2000)) {
        const double y = lambert_w(WBranch::Principal, x);
        CHECK(y > prev);
        prev = y;
    }
    // the sweep walks x = -m downward from near 0- to the branch point; W-1 is
    // strictly decreasing in x, so y must increase along it
    prev = 0.0;
    bool first = true;
    for (double m : testutil::log_spaced(1e-12, std::exp(-1.0) * (1.0 - 1e-9), 2000)) {
        const double y = lambert_w(WBranch::Lower, -m);
        if (!first) CHECK(y > prev);
        prev = y;
        first = false;
    }
}

TEST_CASE("round trip W(y e^y) = y") {
    testutil::Rng rng(0x5eedULL);
    for (int i = 0; i < 2000; ++i) {
        const double y = rng.uniform(-0.999, 300.0);
        const double x = y * std::exp(y);
        if (x < -std::exp(-1.0)) continue;
        const double back = lambert_w(WBranch::Principal, x);
        CHECK(std::abs(back - y) <= 1e-12 * (1.0 + std::abs(y)));
    }
    for (int i = 0; i < 2000; ++i) {
        const double y = -rng.log_uniform(1.0 + 1e-9, 100.0);
        const double x = y * std::exp(y);
        const double back = lambert_w(WBranch::Lower, x);
        CHECK(std::abs(back - y) <= 1e-12 * std::abs(y));
    }
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(lambert_w(WBranch::Principal, -0.4), std::domain_error);
    CHECK_THROWS_AS(lambert_w(WBranch::Lower, -0.4), std::domain_error);
    CHECK_THROWS_AS(lambert_w(WBranch::Lower, 0.0), std::domain_error);
    CHECK_THROWS_AS(lambert_w(WBranch::Lower, 0.5), std::domain_error);
    CHECK_THROWS_AS(lambert_w(WBranch::Principal,
                              std::numeric_limits<double>::quiet_NaN()),
                    std::domain_error);
}

TEST_CASE("near the branch point the series path stays accurate") {
    for (double d : {1e-12, 1e-9, 1e-7, 9e-7}) {
        const double x = -std::exp(-1.0) + d;
        const double y0 = lambert_w(WBranch::Principal, x);
        const double ym = lambert_w(WBranch::Lower, x);
        CHECK(y0 >= -1.0);
        CHECK(ym <= -1.0);
        CHECK(lambert_w_residual(y0, x) <= 1e-13);
        CHECK(lambert_w_residual(ym, x) <= 1e-13);
    }
}

TEST_CASE("log-argument helper agrees with the direct evaluation") {
    for (double t : {2.0, 5.0, 20.0, 100.0, 600.0}) {
        const double direct = lambert_w(WBranch::Principal, std::exp(t));
        const double via_log = degwave::detail::lambert_w0_log_arg(t);
        CHECK(std::abs(direct - via_log) <= 1e-12 * direct);
    }
    // beyond double range for e^t
    const double y = degwave::detail::lambert_w0_log_arg(1e6);
    CHECK(std::abs(y + std::log(y) - 1e6) <= 1e-9 * 1e6);
}
