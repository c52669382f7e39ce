#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "degwave/model.hpp"

namespace degwave {

// Which time parameterization a trajectory lives in: the original wave
// coordinate xi, or the rescaled time s with ds/dxi = phi^{-p}. The rescaling
// removes the phi = 0 singularity without changing solution curves.
enum class TimeParam { Xi, S };

enum class TerminationReason { ReachedTimeEnd, Equilibrium, PhiFloor };

struct OrbitSample {
    double t;
    PhaseState state;
};

struct Orbit {
    TimeParam param = TimeParam::S;
    std::vector<OrbitSample> samples;
    // Present on S-orbits once the wave coordinate has been recovered;
    // aligned with samples, strictly increasing wherever phi > 0.
    std::optional<std::vector<double>> xi_values;
    TerminationReason reason = TerminationReason::ReachedTimeEnd;
};

enum class EquilibriumClass { SpiralSink, NodeSink, CenterDegenerate };

struct EquilibriumInfo {
    PhaseState location;
    std::array<std::array<double, 2>, 2> jacobian;
    std::array<std::complex<double>, 2> eigenvalues;
    EquilibriumClass classification;
    bool repeated_eigenvalues = false;
};

// Right-hand side of the xi-parameterized system
//   phi' = psi,  psi' = -c phi^{-p} psi - phi + delta phi^{1-p}.
// Throws SingularityError on the degeneracy line phi = 0.
PhaseState vector_field_xi(const ModelParams& params, const PhaseState& state);

// Right-hand side of the desingularized s-system
//   phi' = phi^p psi,  psi' = -c psi - phi^{p+1} + delta phi.
PhaseState vector_field_s(const ModelParams& params, const PhaseState& state);

// Bounded equilibria with Jacobians and sink/center classification.
// delta = 1: E_O = (0,0) (of the s-system) and +-E_delta = (+-1, 0) (of the
// xi-system, classified by the sign of D = c^2 - 4p). delta = 0: E_O only.
std::vector<EquilibriumInfo> equilibria(const ModelParams& params);

// Equilibrium-convergence detection radius (max norm) and the phi floor below
// which Xi-mode integration stops instead of approaching the phi^{-p}
// singularity. Both are fixed, not per-call knobs.
inline constexpr double kEquilibriumRadius = 1e-12;
inline constexpr double kPhiFloorXi = 1e-8;

struct IntegrateOptions {
    std::size_t max_steps = 20'000'000;
    double h_max = 0.0;
    double h_init = 0.0;
};

// Adaptive Dormand-Prince 5(4) orbit integration with dense sampling (linear
// interpolation between samples keeps error below 10x tol). Stops early at an
// equilibrium or, in Xi mode, when |phi| falls below kPhiFloorXi; t_span may
// run backward.
Orbit integrate(const ModelParams& params, TimeParam which, const PhaseState& start,
                std::pair<double, double> t_span, double tol,
                const IntegrateOptions& opts = {});

// Anchor for xi recovery: either an explicit sample index or "the sample where
// phi is closest to this value".
struct XiAnchor {
    std::optional<std::size_t> index;
    std::optional<double> phi;
};

// Fill xi_values on an S-orbit by cumulative trapezoid quadrature of phi^p
// over s, normalized so xi(anchor) = 0.
Orbit recover_xi(const ModelParams& params, const Orbit& orbit, const XiAnchor& anchor);

struct ConnectingOrbitOptions {
    // deepest phi the tail is extended to (default: phi0 * 1e-4)
    std::optional<double> tail_phi_min;
    // step budget for the planar leg; sets where the center-manifold tail
    // hands over to the full system
    std::size_t planar_step_budget = 2'000'000;
    double s_forward_margin = 500.0;
};

// The orbit connecting E_O (backward) to E_delta (forward), for delta = 1 and
// 0 < phi0 < (c^2/(c^2+2))^{1/p}. Returned in S parameterization with
// xi_values filled and xi = 0 anchored at phi = phi0.
//
// Construction: below a switch value phi_sw the trajectory is the unique
// center-manifold branch through E_O, so it is generated by the reduced flow
// and lifted with the manifold graph; from (phi_sw, h(phi_sw)) upward the full
// planar system is integrated forward in s. Backward full-system integration
// is not used in the tail: the transverse mode of E_O contracts at rate c
// forward, so backward time amplifies any off-manifold offset by e^{c|s|} and
// the seed discrepancy (order phi^{2p+1}) would destroy the orbit within
// |s| = O(log(1/phi0)/c), far short of the tail's O(phi0^{-p}) span.
Orbit connecting_orbit(const ModelParams& params, double phi0, double tol,
                       const ConnectingOrbitOptions& opts = {});

// Admissibility bound (c^2/(c^2+2))^{1/p} for the anchor value phi0.
double connecting_phi0_upper_bound(const ModelParams& params);

// phi on the orbit at a given xi (log-linear interpolation on the recovered
// xi grid). Throws if xi_values are missing or xi is outside the covered range.
double orbit_phi_at_xi(const Orbit& orbit, double xi);

}  // namespace degwave
