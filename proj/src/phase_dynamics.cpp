#include "degwave/phase_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "degwave/center_manifold.hpp"
#include "degwave/errors.hpp"
#include "degwave/rk45.hpp"

namespace degwave {

namespace {

// Non-throwing xi-field for use inside integration stages; phi = 0 yields inf
// components, which the stepper treats as a rejected step.
State<2> xi_field_raw(const ModelParams& params, const State<2>& y) {
    const double phi = y[0], psi = y[1];
    const double phi_p = pow_int(phi, params.p());
    return {psi, (-params.c() * psi + params.delta() * phi) / phi_p - phi};
}

State<2> s_field_raw(const ModelParams& params, const State<2>& y) {
    const double phi = y[0], psi = y[1];
    const double phi_p = pow_int(phi, params.p());
    return {phi_p * psi, -params.c() * psi - phi_p * phi + params.delta() * phi};
}

std::vector<PhaseState> stop_equilibria(const ModelParams& params, TimeParam which) {
    std::vector<PhaseState> eq;
    if (which == TimeParam::S) eq.push_back({0.0, 0.0});
    if (params.delta() == 1) {
        eq.push_back({1.0, 0.0});
        eq.push_back({-1.0, 0.0});
    }
    return eq;
}

bool near_any_equilibrium(const std::vector<PhaseState>& eqs, double phi, double psi) {
    for (const auto& e : eqs)
        if (std::max(std::abs(phi - e.phi), std::abs(psi - e.psi)) < kEquilibriumRadius)
            return true;
    return false;
}

std::array<std::complex<double>, 2> eigenvalues_2x2(const std::array<std::array<double, 2>, 2>& j) {
    const double tr = j[0][0] + j[1][1];
    const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    const double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        return {std::complex<double>((tr + r) / 2.0, 0.0),
                std::complex<double>((tr - r) / 2.0, 0.0)};
    }
    const double r = std::sqrt(-disc);
    return {std::complex<double>(tr / 2.0, r / 2.0),
            std::complex<double>(tr / 2.0, -r / 2.0)};
}

}  // namespace

PhaseState vector_field_xi(const ModelParams& params, const PhaseState& state) {
    if (state.phi == 0.0)
        throw SingularityError("vector_field_xi: phi = 0 is the degeneracy line");
    const auto d = xi_field_raw(params, {state.phi, state.psi});
    return {d[0], d[1]};
}

PhaseState vector_field_s(const ModelParams& params, const PhaseState& state) {
    const auto d = s_field_raw(params, {state.phi, state.psi});
    return {d[0], d[1]};
}

std::vector<EquilibriumInfo> equilibria(const ModelParams& params) {
    const double c = params.c();
    const double p = static_cast<double>(params.p());
    std::vector<EquilibriumInfo> out;

    // E_O, an equilibrium of the desingularized system only.
    {
        EquilibriumInfo e;
        e.location = {0.0, 0.0};
        e.jacobian = {{{0.0, 0.0}, {static_cast<double>(params.delta()), -c}}};
        e.eigenvalues = eigenvalues_2x2(e.jacobian);
        e.classification = EquilibriumClass::CenterDegenerate;
        out.push_back(e);
    }
    if (params.delta() == 1) {
        const double D = c * c - 4.0 * p;
        for (double sign : {1.0, -1.0}) {
            EquilibriumInfo e;
            e.location = {sign, 0.0};
            e.jacobian = {{{0.0, 1.0}, {-p, -c}}};
            e.eigenvalues = eigenvalues_2x2(e.jacobian);
            e.classification =
                D < 0.0 ? EquilibriumClass::SpiralSink : EquilibriumClass::NodeSink;
            e.repeated_eigenvalues = (D == 0.0);
            out.push_back(e);
        }
    }
    return out;
}

Orbit integrate(const ModelParams& params, TimeParam which, const PhaseState& start,
                std::pair<double, double> t_span, double tol,
                const IntegrateOptions& opts) {
    if (!(tol > 0.0)) throw std::invalid_argument("integrate: tol must be positive");
    if (which == TimeParam::Xi && start.phi == 0.0)
        throw SingularityError("integrate: Xi-mode start on the degeneracy line phi = 0");

    StepperOptions sopt;
    sopt.tol = tol;
    sopt.max_steps = opts.max_steps;
    sopt.h_max = opts.h_max;
    sopt.h_init = opts.h_init;

    const auto eqs = stop_equilibria(params, which);

    Orbit orbit;
    orbit.param = which;
    orbit.reason = TerminationReason::ReachedTimeEnd;

    auto observer = [&](double t, const State<2>& y) {
        orbit.samples.push_back({t, {y[0], y[1]}});
        if (near_any_equilibrium(eqs, y[0], y[1])) {
            orbit.reason = TerminationReason::Equilibrium;
            return false;
        }
        if (which == TimeParam::Xi && std::abs(y[0]) < kPhiFloorXi) {
            orbit.reason = TerminationReason::PhiFloor;
            return false;
        }
        return true;
    };

    const State<2> y0{start.phi, start.psi};
    if (which == TimeParam::Xi) {
        auto f = [&](double, const State<2>& y) { return xi_field_raw(params, y); };
        try {
            integrate_dopri5<2>(f, t_span.first, y0, t_span.second, sopt, observer);
        } catch (const StepSizeUnderflow&) {
            // the degeneracy line makes the xi-field stiff like phi^{-p}, so
            // steps die out on approach to it well before |phi| = kPhiFloorXi
            // can be sampled. An underflow close to the line is that approach,
            // not a failure.
            const double phi_last =
                orbit.samples.empty() ? start.phi : orbit.samples.back().state.phi;
            if (std::abs(phi_last) < 1e-3) {
                orbit.reason = TerminationReason::PhiFloor;
                return orbit;
            }
            throw;
        }
    } else {
        auto f = [&](double, const State<2>& y) { return s_field_raw(params, y); };
        integrate_dopri5<2>(f, t_span.first, y0, t_span.second, sopt, observer);
    }
    return orbit;
}

Orbit recover_xi(const ModelParams& params, const Orbit& orbit, const XiAnchor& anchor) {
    if (orbit.param != TimeParam::S)
        throw std::invalid_argument("recover_xi: orbit must be S-parameterized");
    if (orbit.samples.empty()) throw std::invalid_argument("recover_xi: empty orbit");
    if (!anchor.index && !anchor.phi)
        throw std::invalid_argument("recover_xi: missing anchor");

    const std::size_t n = orbit.samples.size();
    std::vector<double> xi(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double f0 = pow_int(orbit.samples[i - 1].state.phi, params.p());
        const double f1 = pow_int(orbit.samples[i].state.phi, params.p());
        xi[i] = xi[i - 1] +
                0.5 * (f0 + f1) * (orbit.samples[i].t - orbit.samples[i - 1].t);
    }

    std::size_t idx;
    if (anchor.index) {
        idx = *anchor.index;
        if (idx >= n) throw std::invalid_argument("recover_xi: anchor index out of range");
    } else {
        idx = 0;
        double best = std::abs(orbit.samples[0].state.phi - *anchor.phi);
        for (std::size_t i = 1; i < n; ++i) {
            const double d = std::abs(orbit.samples[i].state.phi - *anchor.phi);
            if (d < best) {
                best = d;
                idx = i;
            }
        }
    }
    const double shift = xi[idx];
    for (double& v : xi) v -= shift;

    Orbit out = orbit;
    out.xi_values = std::move(xi);
    return out;
}

double connecting_phi0_upper_bound(const ModelParams& params) {
    const double c2 = params.c() * params.c();
    return std::pow(c2 / (c2 + 2.0), 1.0 / params.p());
}

Orbit connecting_orbit(const ModelParams& params, double phi0, double tol,
                       const ConnectingOrbitOptions& opts) {
    if (params.delta() != 1)
        throw std::invalid_argument("connecting_orbit: requires delta = 1");
    const double bound = connecting_phi0_upper_bound(params);
    if (!(phi0 > 0.0) || !(phi0 < bound))
        throw std::invalid_argument(
            "connecting_orbit: phi0 outside (0, (c^2/(c^2+2))^{1/p})");
    if (!(tol > 0.0)) throw std::invalid_argument("connecting_orbit: tol must be positive");

    const double c = params.c();
    const int p = params.p();
    const double pd = static_cast<double>(p);

    const double tail_min = opts.tail_phi_min.value_or(phi0 * 1e-4);
    if (!(tail_min > 0.0) || !(tail_min < phi0))
        throw std::invalid_argument("connecting_orbit: tail_phi_min must lie in (0, phi0)");

    // Explicit stepping of the planar system is stability-limited to
    // h ~ 3/c by the transverse contraction rate c, and the crawl from phi_sw
    // up to O(1) takes s ~ (c/p) phi_sw^{-p}. Pick the handover point so the
    // planar leg fits the step budget.
    const double h_stab = 3.0 / c;
    const double span_budget =
        static_cast<double>(opts.planar_step_budget) * h_stab;
    double phi_switch = std::pow(c / (pd * span_budget), 1.0 / pd);
    phi_switch = std::max(phi_switch, tail_min);
    phi_switch = std::min(phi_switch, cm_validity_radius(params));
    phi_switch = std::min(phi_switch, phi0);  // keep the anchor on the planar leg
    // (phi0 < (c^2/(c^2+2))^{1/p} can exceed the manifold validity radius, in
    // which case the planar leg simply starts lower and passes through phi0.)
    if (phi_switch < tail_min) phi_switch = tail_min;

    std::vector<double> s_all, xi_all;
    std::vector<PhaseState> st_all;

    // --- center-manifold tail: d phi / d xi' = h(phi), d s / d xi' = phi^{-p} ---
    if (tail_min < phi_switch) {
        auto f = [&](double, const State<2>& y) -> State<2> {
            const double phi = y[0];
            return {cm_graph(params, phi), 1.0 / pow_int(phi, p)};
        };
        StepperOptions sopt;
        sopt.tol = tol;
        sopt.max_steps = 4'000'000;

        std::vector<double> t_tail, s_tail, phi_tail;
        auto observer = [&](double t, const State<2>& y) {
            t_tail.push_back(t);
            phi_tail.push_back(y[0]);
            s_tail.push_back(y[1]);
            return y[0] > tail_min;
        };
        const double xi_span = 1.5 * c * std::log(phi_switch / tail_min) + 10.0 * c + 10.0;
        integrate_dopri5<2>(f, 0.0, State<2>{phi_switch, 0.0}, -xi_span, sopt, observer);
        if (phi_tail.back() > tail_min)
            throw std::runtime_error("connecting_orbit: tail integration fell short");

        // emitted deepest-last; walk back up, skipping j = 0 (the handover
        // point, re-emitted as the planar leg's first sample)
        for (std::size_t j = phi_tail.size(); j-- > 1;) {
            xi_all.push_back(t_tail[j]);
            s_all.push_back(s_tail[j]);
            st_all.push_back({phi_tail[j], cm_graph(params, phi_tail[j])});
        }
    }

    // --- planar leg from the handover point, forward in s ---
    TerminationReason reason = TerminationReason::ReachedTimeEnd;
    {
        auto f = [&](double, const State<3>& y) -> State<3> {
            const double phi = y[0], psi = y[1];
            const double phi_p = pow_int(phi, p);
            return {phi_p * psi, -c * psi - phi_p * phi + phi, phi_p};
        };
        StepperOptions sopt;
        sopt.tol = tol;
        sopt.h_max = h_stab;
        sopt.max_steps = opts.planar_step_budget * 4;

        const double crawl = (c / pd) * pow_int(1.0 / phi_switch, p);
        const double s_end = 1.05 * crawl + opts.s_forward_margin * (1.0 + 1.0 / c);

        auto observer = [&](double t, const State<3>& y) {
            s_all.push_back(t);
            xi_all.push_back(y[2]);
            st_all.push_back({y[0], y[1]});
            if (std::max(std::abs(y[0] - 1.0), std::abs(y[1])) < kEquilibriumRadius) {
                reason = TerminationReason::Equilibrium;
                return false;
            }
            return true;
        };
        const State<3> y0{phi_switch, cm_graph(params, phi_switch), 0.0};
        integrate_dopri5<3>(f, 0.0, y0, s_end, sopt, observer);
    }

    // --- anchor xi = 0 at phi = phi0 (first upward crossing) ---
    std::size_t i = 0;
    while (i < st_all.size() && st_all[i].phi < phi0) ++i;
    if (i == 0 || i == st_all.size())
        throw std::runtime_error("connecting_orbit: orbit does not pass through phi0");
    double xi0;
    if (st_all[i].phi == phi0) {
        xi0 = xi_all[i];
    } else {
        const double l0 = std::log(st_all[i - 1].phi), l1 = std::log(st_all[i].phi);
        const double w = (std::log(phi0) - l0) / (l1 - l0);
        xi0 = xi_all[i - 1] + w * (xi_all[i] - xi_all[i - 1]);
    }
    for (double& v : xi_all) v -= xi0;

    Orbit orbit;
    orbit.param = TimeParam::S;
    orbit.reason = reason;
    orbit.samples.reserve(s_all.size());
    for (std::size_t j = 0; j < s_all.size(); ++j)
        orbit.samples.push_back({s_all[j], st_all[j]});
    orbit.xi_values = std::move(xi_all);
    return orbit;
}

double orbit_phi_at_xi(const Orbit& orbit, double xi) {
    if (!orbit.xi_values)
        throw std::invalid_argument("orbit_phi_at_xi: orbit has no recovered xi values");
    const auto& xs = *orbit.xi_values;
    if (xs.empty() || xi < xs.front() || xi > xs.back())
        throw std::invalid_argument("orbit_phi_at_xi: xi outside the orbit's range");
    const auto it = std::lower_bound(xs.begin(), xs.end(), xi);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin());
    if (xs[i] == xi) return orbit.samples[i].state.phi;
    const double l0 = std::log(orbit.samples[i - 1].state.phi);
    const double l1 = std::log(orbit.samples[i].state.phi);
    const double w = (xi - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return std::exp(l0 + w * (l1 - l0));
}

}  // namespace degwave
