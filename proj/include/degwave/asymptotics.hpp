#pragma once

#include <utility>
#include <vector>

#include "degwave/model.hpp"

namespace degwave {

// Data of the substitution w(s) = phi(s)^{-p}, which turns the reduced flow
// into w' = A + B/w and leads to the Lambert-W closed form
//   phi(s) = [ -B (W0(E(s)) + 1) / A ]^{-1/p},
//   log E(s) = C2 - 1 - (A^2/B) s.
// A = -p/c < 0 and B = p(c^2+1)/c^3 > 0; C1 anchors w(0) = phi0^{-p} and
// C2 = log(-A/B) - (A^2 C1 + B)/B + 1. E(s) > 0 for all s, so the principal
// branch applies: W(E) + 1 = -A w / B > 0 identifies W0.
struct WTransform {
    ModelParams params;
    double phi0;
    double A;
    double B;
    double C1;
    double C2;
};

// Requires phi0 > 0 with phi0^p < c^2/(c^2+1), i.e. (A/B) w0 + 1 < 0.
WTransform make_w_transform(const ModelParams& params, double phi0);

// log E(s); E itself overflows double for s << 0, so everything downstream
// works in log form.
double w_transform_log_E(const WTransform& wt, double s);

// Closed-form phi(s); phi(0) = phi0, decreasing to 0 as s -> -inf and
// increasing to (c^2/(c^2+1))^{1/p} as s -> +inf.
double phi_of_s(const WTransform& wt, double s);

// ds/dxi = phi^{-p} = -B (W0(E(s)) + 1) / A; always positive.
double ds_dxi(const WTransform& wt, double s);

// xi(s) = integral of 1/(ds/dxi) from 0 to s, by adaptive quadrature, for each
// target (targets must be <= 0 and strictly decreasing). xi(0) = 0. Returns
// (s, xi) pairs; xi is strictly decreasing and unbounded below, with
// xi(s)/log(-s) -> 1/A = -c/p (the approach is logarithmic in |s|: the offset
// log(A^2/|A w0 + B|) / log|s| decays only as 1/log|s|).
std::vector<std::pair<double, double>> verify_xi_divergence(
    const WTransform& wt, const std::vector<double>& s_targets);

// Exact xi(phi) relation of the reduced flow:
//   xi + C3 = (c/p) log | phi^p / ((c^2+1) phi^p - c^2) |,  xi(phi0) = 0.
// phi and phi0 must lie on the same side of the singular value
// phi^p = c^2/(c^2+1).
double xi_of_phi(const ModelParams& params, double phi0, double phi);

// The closed-form tail profile: mu < 0 depends on the anchor phi0, and
//   phi(xi) = ( mu c^2 / (mu (c^2+1) - e^{-(p/c) xi}) )^{1/p}.
struct AsymptoticProfile {
    ModelParams params;
    double phi0;
    double mu;   // -|phi0^p / ((c^2+1) phi0^p - c^2)|, negative
    double C3;   // negative for admissible phi0
};

// Requires 0 < phi0 < (c^2/(c^2+2))^{1/p} (the band up to (c^2/(c^2+1))^{1/p}
// flips the sign of C3 and is rejected).
AsymptoticProfile make_profile(const ModelParams& params, double phi0);

// (c^2/(c^2+2))^{1/p}
double profile_phi0_upper_bound(const ModelParams& params);

// Profile value; evaluated in the overflow-safe product form
//   phi = (|mu| c^2)^{1/p} e^{xi/c} (1 + |mu|(c^2+1) e^{p xi / c})^{-1/p}.
// The denominator never vanishes for mu < 0, so there is no finite
// singularity; phi is strictly increasing with range (0, (c^2/(c^2+1))^{1/p}).
double phi_of_xi(const AsymptoticProfile& profile, double xi);

// First-order tail (-mu)^{1/p} c^{2/p} e^{xi/c}; phi_of_xi / leading_order -> 1
// as xi -> -inf. Meaningful for xi < 0.
double leading_order(const AsymptoticProfile& profile, double xi);

}  // namespace degwave
