#pragma once

#include <span>
#include <utility>
#include <vector>

#include "degwave/asymptotics.hpp"
#include "degwave/model.hpp"
#include "degwave/phase_dynamics.hpp"

namespace degwave {

struct Grid1D {
    Grid1D(double x_min_, double x_max_, int nx_);
    double x_min;
    double x_max;
    int nx;
    double dx;
    double x(int i) const { return x_min + dx * i; }
};

struct FieldState {
    double time = 0.0;
    std::vector<double> values;
};

struct FrontSpeedEstimate {
    double level;
    double speed;
    double fit_residual;  // RMS residual of the linear fit
    std::vector<std::pair<double, double>> samples;  // (time, crossing position)
};

enum class Parallelism { Serial, OpenMP };

// Initial condition u(0, x) = phi(x): the orbit profile (linear interpolation
// on its recovered xi grid) over the orbit's range, the closed-form tail on
// the far left, the plateau 1 on the far right. Throws if the grid does not
// contain the transition region or the orbit/profile anchors disagree.
FieldState init_wave(const ModelParams& params, const AsymptoticProfile& profile,
                     const Orbit& orbit, const Grid1D& grid);

// Semi-discrete right-hand side: second-order central interior stencil
//   u_i^p ((u_{i-1} - 2u_i + u_{i+1})/dx^2 + u_i) - delta u_i,
// boundary nodes pinned (du/dt = 0). Every node is a pure function of the
// input field, so the OpenMP and serial paths agree bitwise.
void rhs(const ModelParams& params, const Grid1D& grid, const FieldState& field,
         std::span<double> out, Parallelism par = Parallelism::OpenMP);
std::vector<double> rhs(const ModelParams& params, const Grid1D& grid,
                        const FieldState& field, Parallelism par = Parallelism::OpenMP);

// Serial reference kernel, kept as the comparison baseline for the parallel
// path (tests assert bitwise equality; tools/bench_pde_rhs times both).
void rhs_serial(const ModelParams& params, const Grid1D& grid, const FieldState& field,
                std::span<double> out);

struct SimulateOptions {
    int snapshot_stride = 200;
    Parallelism parallelism = Parallelism::OpenMP;
};

struct SimulationResult {
    std::vector<FieldState> snapshots;  // initial state, every stride-th step, final
    long clamp_count = 0;
    long steps = 0;
};

// Classical RK4 in time with dt = safety * dx^2 / max(1, max_i u_i^p)
// recomputed every step. Negative values are clamped to 0 and counted; throws
// BlowUpError once max u > 2.
SimulationResult simulate(const ModelParams& params, const Grid1D& grid,
                          const FieldState& initial, double t_end, double safety,
                          const SimulateOptions& opts = {});

// Level-crossing front tracker: one crossing per snapshot required, position
// by linear interpolation, speed by least squares over (time, position).
FrontSpeedEstimate measure_front_speed(const std::vector<FieldState>& snapshots,
                                       const Grid1D& grid, double level);

}  // namespace degwave
