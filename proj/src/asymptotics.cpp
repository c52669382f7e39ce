#include "degwave/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

#include "degwave/errors.hpp"
#include "degwave/lambert_w.hpp"
#include "degwave/quadrature.hpp"

namespace degwave {

namespace {

// W0(E) from log E, switching to the log-argument solver once E would be
// inaccurate or overflow as a double.
double w0_from_log(double log_E) {
    if (log_E < 30.0) return lambert_w(WBranch::Principal, std::exp(log_E));
    return detail::lambert_w0_log_arg(log_E);
}

}  // namespace

WTransform make_w_transform(const ModelParams& params, double phi0) {
    if (!(phi0 > 0.0))
        throw std::invalid_argument("make_w_transform: phi0 must be positive");
    const double c = params.c();
    const double p = static_cast<double>(params.p());
    const double A = -p / c;
    const double B = p * (c * c + 1.0) / (c * c * c);

    const double w0 = pow_int(1.0 / phi0, params.p());
    const double u = A * w0 / B + 1.0;  // must be negative: phi0^p < c^2/(c^2+1)
    if (!(u < 0.0))
        throw std::invalid_argument(
            "make_w_transform: phi0^p must be below c^2/(c^2+1) (w0 too small)");

    // L = E(0) = -(1 + A w0 / B) e^{-(A w0 / B + 1)}; computed in logs because
    // the exponent grows like w0.
    const double log_L = std::log(-u) - u;
    const double C2 = log_L + 1.0;
    const double C1 = (B / (A * A)) * (std::log(-A / B) - C2);
    return {params, phi0, A, B, C1, C2};
}

double w_transform_log_E(const WTransform& wt, double s) {
    return wt.C2 - 1.0 - (wt.A * wt.A / wt.B) * s;
}

double phi_of_s(const WTransform& wt, double s) {
    const double W = w0_from_log(w_transform_log_E(wt, s));
    // -B (W + 1) / A = B (W + 1) / |A| > 0
    const double w = -wt.B * (W + 1.0) / wt.A;
    return std::pow(w, -1.0 / wt.params.p());
}

double ds_dxi(const WTransform& wt, double s) {
    const double W = w0_from_log(w_transform_log_E(wt, s));
    return -wt.B * (W + 1.0) / wt.A;
}

std::vector<std::pair<double, double>> verify_xi_divergence(
    const WTransform& wt, const std::vector<double>& s_targets) {
    if (s_targets.empty())
        throw std::invalid_argument("verify_xi_divergence: no targets");
    for (std::size_t i = 0; i < s_targets.size(); ++i) {
        if (s_targets[i] > 0.0)
            throw std::invalid_argument("verify_xi_divergence: targets must be <= 0");
        if (i > 0 && s_targets[i] >= s_targets[i - 1])
            throw std::invalid_argument(
                "verify_xi_divergence: targets must be strictly decreasing");
    }
    auto integrand = [&](double s) { return 1.0 / ds_dxi(wt, s); };

    std::vector<std::pair<double, double>> out;
    out.reserve(s_targets.size());
    double xi = 0.0;
    double s_prev = 0.0;
    for (double s : s_targets) {
        // xi(s) = xi(s_prev) + integral_{s_prev}^{s} phi^p du  (negative increment)
        xi += adaptive_simpson_rel(integrand, s_prev, s, 1e-11);
        out.emplace_back(s, xi);
        s_prev = s;
    }
    return out;
}

double xi_of_phi(const ModelParams& params, double phi0, double phi) {
    const double c = params.c();
    const double c2 = params.c() * params.c();
    const double p = static_cast<double>(params.p());
    if (!(phi > 0.0) || !(phi0 > 0.0))
        throw std::invalid_argument("xi_of_phi: phi and phi0 must be positive");

    const double den = (c2 + 1.0) * pow_int(phi, params.p()) - c2;
    const double den0 = (c2 + 1.0) * pow_int(phi0, params.p()) - c2;
    if (den == 0.0 || den0 == 0.0)
        throw SingularityError("xi_of_phi: phi^p = c^2/(c^2+1) is singular");
    if ((den > 0.0) != (den0 > 0.0))
        throw std::domain_error(
            "xi_of_phi: phi and phi0 straddle the singular value c^2/(c^2+1)");

    return c * (std::log(phi) - std::log(phi0)) +
           (c / p) * (std::log(std::abs(den0)) - std::log(std::abs(den)));
}

double profile_phi0_upper_bound(const ModelParams& params) {
    const double c2 = params.c() * params.c();
    return std::pow(c2 / (c2 + 2.0), 1.0 / params.p());
}

AsymptoticProfile make_profile(const ModelParams& params, double phi0) {
    if (!(phi0 > 0.0) || !(phi0 < profile_phi0_upper_bound(params)))
        throw std::invalid_argument(
            "make_profile: phi0 outside (0, (c^2/(c^2+2))^{1/p})");
    const double c2 = params.c() * params.c();
    const double p = static_cast<double>(params.p());
    const double phi0_p = pow_int(phi0, params.p());
    const double mu = -std::abs(phi0_p / ((c2 + 1.0) * phi0_p - c2));
    const double C3 = (params.c() / p) * std::log(-mu);
    return {params, phi0, mu, C3};
}

double phi_of_xi(const AsymptoticProfile& profile, double xi) {
    const double c = profile.params.c();
    const double c2 = c * c;
    const double p = static_cast<double>(profile.params.p());
    const double m = -profile.mu;  // |mu|
    if (xi >= 0.0) {
        const double e = std::exp(-p * xi / c);  // <= 1, underflow benign
        return std::pow(m * c2 / (m * (c2 + 1.0) + e), 1.0 / p);
    }
    // xi < 0: product form (|mu| c^2)^{1/p} e^{xi/c} (1 + |mu|(c^2+1) e^{p xi/c})^{-1/p}
    const double lead = std::pow(m * c2, 1.0 / p) * std::exp(xi / c);
    const double corr = m * (c2 + 1.0) * std::exp(p * xi / c);
    return lead * std::pow(1.0 + corr, -1.0 / p);
}

double leading_order(const AsymptoticProfile& profile, double xi) {
    const double c = profile.params.c();
    const double p = static_cast<double>(profile.params.p());
    return std::pow(-profile.mu, 1.0 / p) * std::pow(c, 2.0 / p) * std::exp(xi / c);
}

}  // namespace degwave
