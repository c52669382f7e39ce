#pragma once

#include <utility>
#include <vector>

#include "degwave/model.hpp"
#include "degwave/phase_dynamics.hpp"

namespace degwave {

// Local model of the center manifold at E_O (delta = 1), in the original
// (phi, psi) coordinates:
//   graph:        psi = h(phi) = phi/c - ((c^2+1)/c^3) phi^{p+1}
//   reduced flow: dphi/ds     = phi^{p+1}/c - ((c^2+1)/c^3) phi^{2p+1}
// Truncated exactly at the printed orders; higher corrections are not kept.
struct CenterManifoldModel {
    ModelParams params;
    double graph_coefficient;                   // coefficient of phi^{p+1} in h
    std::pair<double, double> flow_coefficients;  // phi^{p+1} and phi^{2p+1} terms
};

CenterManifoldModel make_center_manifold(const ModelParams& params);

// Change to the eigenbasis of the s-system at E_O, columns v1 = (c, 1),
// v2 = (0, 1); returns T^{-1} (phi, psi). Requires delta = 1.
PhaseState to_eigenbasis(const ModelParams& params, const PhaseState& state);
PhaseState from_eigenbasis(const ModelParams& params, const PhaseState& tilde);

// psi on the manifold graph. Quantitatively meaningful for
// |phi| <= cm_validity_radius(params); outside that the caller is expected to
// treat values as extrapolation (checked by CLI consumers, not enforced here).
double cm_graph(const ModelParams& params, double phi);

// Half the distance to the reduced flow's spurious zero, (c^2/(c^2+1))^{1/p}/2.
double cm_validity_radius(const ModelParams& params);

// dphi/ds of the reduced one-dimensional flow; positive for
// 0 < phi^p < c^2/(c^2+1).
double reduced_flow(const ModelParams& params, double phi);

// Per-sample |psi - h(phi)| along an S-orbit, restricted to phi > 0 samples.
// Returns (phi, residual) pairs. Throws on an empty orbit.
std::vector<std::pair<double, double>> cm_residual(const ModelParams& params,
                                                   const Orbit& orbit);

}  // namespace degwave
