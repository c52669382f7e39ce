#include "degwave/pde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "degwave/errors.hpp"

namespace degwave {

Grid1D::Grid1D(double x_min_, double x_max_, int nx_)
    : x_min(x_min_), x_max(x_max_), nx(nx_), dx((x_max_ - x_min_) / (nx_ - 1)) {
    if (!(x_min_ < x_max_)) throw std::invalid_argument("Grid1D: x_min must be < x_max");
    if (nx_ < 3) throw std::invalid_argument("Grid1D: nx must be >= 3");
}

FieldState init_wave(const ModelParams& params, const AsymptoticProfile& profile,
                     const Orbit& orbit, const Grid1D& grid) {
    if (params.p() != profile.params.p() || params.c() != profile.params.c() ||
        params.delta() != profile.params.delta())
        throw std::invalid_argument("init_wave: params disagree with the profile's");
    if (!orbit.xi_values)
        throw std::invalid_argument("init_wave: orbit has no recovered xi values");
    const auto& xs = *orbit.xi_values;
    if (xs.size() < 2) throw std::invalid_argument("init_wave: orbit too short");

    // the orbit and the profile must be anchored to the same phi0
    const double phi_at_0 = orbit_phi_at_xi(orbit, 0.0);
    if (std::abs(phi_at_0 - profile.phi0) > 1e-6 * profile.phi0)
        throw std::invalid_argument("init_wave: orbit and profile anchors disagree");

    FieldState field;
    field.time = 0.0;
    field.values.resize(grid.nx);
    std::size_t hint = 1;
    for (int i = 0; i < grid.nx; ++i) {
        const double xi = grid.x(i);
        double u;
        if (xi < xs.front()) {
            u = phi_of_xi(profile, xi);
        } else if (xi >= xs.back()) {
            u = 1.0;
        } else {
            while (hint < xs.size() && xs[hint] < xi) ++hint;
            const double w = (xi - xs[hint - 1]) / (xs[hint] - xs[hint - 1]);
            u = orbit.samples[hint - 1].state.phi +
                w * (orbit.samples[hint].state.phi - orbit.samples[hint - 1].state.phi);
        }
        field.values[i] = std::max(u, 0.0);
    }

    if (field.values.front() > 0.01 || field.values.back() < 0.99)
        throw std::invalid_argument("init_wave: grid does not cover the transition region");

    // seam continuity: orbit edge values against their analytic extensions
    const double left_gap =
        std::abs(orbit.samples.front().state.phi - phi_of_xi(profile, xs.front()));
    const double right_gap = std::abs(orbit.samples.back().state.phi - 1.0);
    if (left_gap > 1e-6 || right_gap > 1e-6)
        throw std::runtime_error("init_wave: seams exceed the 1e-6 continuity budget");
    return field;
}

namespace {

inline double node_rhs(const double* u, int i, double inv_dx2, int p, int delta) {
    const double lap = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_dx2;
    return pow_int(u[i], p) * (lap + u[i]) - delta * u[i];
}

}  // namespace

void rhs_serial(const ModelParams& params, const Grid1D& grid, const FieldState& field,
                std::span<double> out) {
    const int n = grid.nx;
    if (static_cast<int>(field.values.size()) != n || static_cast<int>(out.size()) != n)
        throw std::invalid_argument("rhs: size mismatch");
    const double inv_dx2 = 1.0 / (grid.dx * grid.dx);
    const double* u = field.values.data();
    out[0] = 0.0;
    out[n - 1] = 0.0;
    for (int i = 1; i < n - 1; ++i)
        out[i] = node_rhs(u, i, inv_dx2, params.p(), params.delta());
}

void rhs(const ModelParams& params, const Grid1D& grid, const FieldState& field,
         std::span<double> out, Parallelism par) {
    if (par == Parallelism::Serial) {
        rhs_serial(params, grid, field, out);
        return;
    }
    const int n = grid.nx;
    if (static_cast<int>(field.values.size()) != n || static_cast<int>(out.size()) != n)
        throw std::invalid_argument("rhs: size mismatch");
    const double inv_dx2 = 1.0 / (grid.dx * grid.dx);
    const double* u = field.values.data();
    double* o = out.data();
    const int p = params.p();
    const int delta = params.delta();
    o[0] = 0.0;
    o[n - 1] = 0.0;
    // every node is independent; no reductions, so the partition cannot
    // change the results
#pragma omp parallel for schedule(static)
    for (int i = 1; i < n - 1; ++i) o[i] = node_rhs(u, i, inv_dx2, p, delta);
}

std::vector<double> rhs(const ModelParams& params, const Grid1D& grid,
                        const FieldState& field, Parallelism par) {
    std::vector<double> out(grid.nx);
    rhs(params, grid, field, out, par);
    return out;
}

SimulationResult simulate(const ModelParams& params, const Grid1D& grid,
                          const FieldState& initial, double t_end, double safety,
                          const SimulateOptions& opts) {
    if (!(t_end > 0.0)) throw std::invalid_argument("simulate: t_end must be positive");
    if (!(safety > 0.0) || safety > 0.5)
        throw std::invalid_argument("simulate: safety must be in (0, 0.5]");
    const int n = grid.nx;
    if (static_cast<int>(initial.values.size()) != n)
        throw std::invalid_argument("simulate: field/grid size mismatch");

    SimulationResult result;
    FieldState state = initial;
    result.snapshots.push_back(state);

    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    FieldState stage;
    stage.values.resize(n);

    const bool omp = opts.parallelism == Parallelism::OpenMP;
    auto eval = [&](const std::vector<double>& u, std::vector<double>& k) {
        stage.values = u;
        rhs(params, grid, stage, k, opts.parallelism);
    };

    double t = 0.0;
    long step = 0;
    while (t < t_end) {
        double u_max = 0.0;
        for (double v : state.values) u_max = std::max(u_max, v);
        if (!std::isfinite(u_max))
            throw NonFiniteState("simulate: non-finite field at t = " + std::to_string(t));
        if (u_max > 2.0)
            throw BlowUpError("simulate: blow-up guard (max u > 2) at t = " + std::to_string(t), t);

        double dt = safety * grid.dx * grid.dx / std::max(1.0, pow_int(u_max, params.p()));
        if (t + dt > t_end) dt = t_end - t;

        const auto& u = state.values;
        eval(u, k1);
#pragma omp parallel for schedule(static) if (omp)
        for (int i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
        eval(tmp, k2);
#pragma omp parallel for schedule(static) if (omp)
        for (int i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
        eval(tmp, k3);
#pragma omp parallel for schedule(static) if (omp)
        for (int i = 0; i < n; ++i) tmp[i] = u[i] + dt * k3[i];
        eval(tmp, k4);

        long clamped = 0;
#pragma omp parallel for schedule(static) reduction(+ : clamped) if (omp)
        for (int i = 0; i < n; ++i) {
            double v = u[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (v < 0.0) {
                v = 0.0;
                ++clamped;
            }
            state.values[i] = v;
        }
        result.clamp_count += clamped;
        t += dt;
        state.time = t;
        ++step;

        if (step % opts.snapshot_stride == 0 || t >= t_end)
            result.snapshots.push_back(state);
    }
    result.steps = step;
    return result;
}

FrontSpeedEstimate measure_front_speed(const std::vector<FieldState>& snapshots,
                                       const Grid1D& grid, double level) {
    if (snapshots.size() < 3)
        throw std::invalid_argument("measure_front_speed: need at least 3 snapshots");

    FrontSpeedEstimate est;
    est.level = level;
    for (const auto& snap : snapshots) {
        const auto& u = snap.values;
        int found = -1;
        int count = 0;
        for (int i = 0; i + 1 < grid.nx; ++i) {
            const bool up = u[i] < level && u[i + 1] >= level;
            const bool down = u[i] >= level && u[i + 1] < level;
            if (up || down) {
                ++count;
                found = i;
            }
        }
        if (count == 0)
            throw std::domain_error("measure_front_speed: snapshot does not cross the level");
        if (count > 1)
            throw std::domain_error("measure_front_speed: multiple level crossings");
        const double x = grid.x(found) +
                         grid.dx * (level - u[found]) / (u[found + 1] - u[found]);
        est.samples.emplace_back(snap.time, x);
    }

    // least squares x = a + speed * t
    const std::size_t m = est.samples.size();
    double st = 0, sx = 0, stt = 0, stx = 0;
    for (const auto& [t, x] : est.samples) {
        st += t;
        sx += x;
        stt += t * t;
        stx += t * x;
    }
    const double md = static_cast<double>(m);
    const double denom = md * stt - st * st;
    est.speed = denom != 0.0 ? (md * stx - st * sx) / denom : 0.0;
    const double a = (sx - est.speed * st) / md;
    double rss = 0.0;
    for (const auto& [t, x] : est.samples) {
        const double r = x - (a + est.speed * t);
        rss += r * r;
    }
    est.fit_residual = std::sqrt(rss / md);
    return est;
}

}  // namespace degwave
