#include "degwave/center_manifold.hpp"

#include <cmath>
#include <stdexcept>

namespace degwave {

CenterManifoldModel make_center_manifold(const ModelParams& params) {
    if (params.delta() != 1)
        throw std::invalid_argument("make_center_manifold: requires delta = 1");
    const double c = params.c();
    const double k = (c * c + 1.0) / (c * c * c);
    return {params, -k, {1.0 / c, -k}};
}

PhaseState to_eigenbasis(const ModelParams& params, const PhaseState& state) {
    if (params.delta() != 1)
        throw std::invalid_argument("to_eigenbasis: requires delta = 1");
    // T = (v1 v2) with v1 = (c, 1), v2 = (0, 1); T^{-1} = [[1/c, 0], [-1/c, 1]].
    const double c = params.c();
    return {state.phi / c, state.psi - state.phi / c};
}

PhaseState from_eigenbasis(const ModelParams& params, const PhaseState& tilde) {
    if (params.delta() != 1)
        throw std::invalid_argument("from_eigenbasis: requires delta = 1");
    const double c = params.c();
    return {c * tilde.phi, tilde.phi + tilde.psi};
}

double cm_graph(const ModelParams& params, double phi) {
    const double c = params.c();
    const double k = (c * c + 1.0) / (c * c * c);
    return phi / c - k * pow_int(phi, params.p() + 1);
}

double cm_validity_radius(const ModelParams& params) {
    const double c2 = params.c() * params.c();
    return 0.5 * std::pow(c2 / (c2 + 1.0), 1.0 / params.p());
}

double reduced_flow(const ModelParams& params, double phi) {
    const double c = params.c();
    const double k = (c * c + 1.0) / (c * c * c);
    const double phi_p1 = pow_int(phi, params.p() + 1);
    return phi_p1 / c - k * phi_p1 * pow_int(phi, params.p());
}

std::vector<std::pair<double, double>> cm_residual(const ModelParams& params,
                                                   const Orbit& orbit) {
    if (orbit.param != TimeParam::S)
        throw std::invalid_argument("cm_residual: orbit must be S-parameterized");
    if (orbit.samples.empty()) throw std::invalid_argument("cm_residual: empty orbit");
    std::vector<std::pair<double, double>> out;
    out.reserve(orbit.samples.size());
    for (const auto& s : orbit.samples) {
        if (s.state.phi <= 0.0) continue;
        out.emplace_back(s.state.phi,
                         std::abs(s.state.psi - cm_graph(params, s.state.phi)));
    }
    return out;
}

}  // namespace degwave
