#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "degwave/center_manifold.hpp"
#include "degwave/phase_dynamics.hpp"
#include "test_util.hpp"

using namespace degwave;

TEST_CASE("eigenbasis transform") {
    const ModelParams c1(2, 1.0, 1);
    auto t = to_eigenbasis(c1, {0.0, 0.0});
    CHECK(t.phi == 0.0);
    CHECK(t.psi == 0.0);
    t = to_eigenbasis(c1, {1.0, 1.0});
    CHECK(t.phi == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(t.psi == doctest::Approx(0.0).epsilon(1e-15));

    const ModelParams c2(2, 2.0, 1);
    t = to_eigenbasis(c2, {2.0, 1.0});
    CHECK(t.phi == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(t.psi == doctest::Approx(0.0).epsilon(1e-15));

    CHECK_THROWS_AS(to_eigenbasis(ModelParams(2, 1.0, 0), {1.0, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("transform round trip is the identity") {
    testutil::Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const ModelParams params(2, rng.log_uniform(0.1, 10.0), 1);
        const PhaseState st{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
        const auto back = from_eigenbasis(params, to_eigenbasis(params, st));
        CHECK(std::abs(back.phi - st.phi) <= 1e-15 * (1.0 + std::abs(st.phi)));
        CHECK(std::abs(back.psi - st.psi) <= 1e-14 * (1.0 + std::abs(st.psi)));
    }
}

TEST_CASE("graph values") {
    const ModelParams p21(2, 1.0, 1);
    CHECK(cm_graph(p21, 0.0) == 0.0);
    CHECK(cm_graph(p21, 0.1) == doctest::Approx(0.098).epsilon(1e-14));
    const ModelParams p42(4, 2.0, 1);
    CHECK(cm_graph(p42, 0.1) == doctest::Approx(0.04999375).epsilon(1e-14));
}

TEST_CASE("reduced flow values") {
    const ModelParams p21(2, 1.0, 1);
    CHECK(reduced_flow(p21, 0.0) == 0.0);
    CHECK(reduced_flow(p21, 0.1) == doctest::Approx(0.00098).epsilon(1e-14));
    // zero of the flow at phi^p = c^2/(c^2+1)
    CHECK(std::abs(reduced_flow(p21, std::sqrt(0.5))) < 1e-16);
    // positive below that zero
    for (double phi : {0.01, 0.1, 0.3, 0.6}) CHECK(reduced_flow(p21, phi) > 0.0);
}

TEST_CASE("model coefficients") {
    const auto model = make_center_manifold(ModelParams(2, 1.0, 1));
    CHECK(model.graph_coefficient == doctest::Approx(-2.0));
    CHECK(model.flow_coefficients.first == doctest::Approx(1.0));
    CHECK(model.flow_coefficients.second == doctest::Approx(-2.0));
    CHECK_THROWS_AS(make_center_manifold(ModelParams(2, 1.0, 0)), std::invalid_argument);
}

TEST_CASE("tilde form of the graph matches -c^{p-2}(c^2+1) phi~^{p+1}") {
    for (double c : {0.5, 1.0, 2.0, 3.0})
        for (int p : {2, 4}) {
            const ModelParams params(p, c, 1);
            const double coeff = -std::pow(c, p - 2) * (c * c + 1.0);
            for (double phit : {1e-2, 1e-3}) {
                const double phi = c * phit;
                const auto tilde = to_eigenbasis(params, {phi, cm_graph(params, phi)});
                CHECK(tilde.phi == doctest::Approx(phit).epsilon(1e-13));
                const double expected = coeff * std::pow(phit, p + 1);
                // psi - phi/c cancels phi~^p digits, so the achievable ratio
                // accuracy is ~ eps / (|coeff| phi~^p)
                const double cond = 16.0 * std::numeric_limits<double>::epsilon() /
                                    (std::abs(coeff) * std::pow(phit, p));
                CHECK(tilde.psi / expected ==
                      doctest::Approx(1.0).epsilon(std::max(1e-9, cond)));
            }
        }
}

TEST_CASE("tangency: h(phi)/phi -> 1/c") {
    for (double c : {0.5, 1.0, 4.0}) {
        const ModelParams params(2, c, 1);
        CHECK(cm_graph(params, 1e-7) / 1e-7 ==
              doctest::Approx(1.0 / c).epsilon(1e-12));
    }
}

TEST_CASE("flow consistency: reduced_flow = phi^p * h(phi) at the kept orders") {
    testutil::Rng rng(11);
    for (int i = 0; i < 300; ++i) {
        const int p = 2 * (1 + static_cast<int>(rng.next_u64() % 2));
        const ModelParams params(p, rng.log_uniform(0.3, 4.0), 1);
        const double phi = rng.log_uniform(1e-3, 1e-1);
        const double gap =
            std::abs(reduced_flow(params, phi) - pow_int(phi, p) * cm_graph(params, phi));
        CHECK(gap <= 1.0 * std::pow(phi, 2 * p + 2) + 1e-18);
    }
}

TEST_CASE("validity radius") {
    const ModelParams p21(2, 1.0, 1);
    CHECK(cm_validity_radius(p21) == doctest::Approx(0.5 * std::sqrt(0.5)));
}

TEST_CASE("residual of an orbit lying exactly on the graph is zero") {
    const ModelParams params(2, 1.0, 1);
    Orbit orbit;
    orbit.param = TimeParam::S;
    for (int i = 1; i <= 10; ++i) {
        const double phi = 0.01 * i;
        orbit.samples.push_back({static_cast<double>(i), {phi, cm_graph(params, phi)}});
    }
    for (const auto& [phi, r] : cm_residual(params, orbit)) CHECK(r == 0.0);
}

TEST_CASE("residual of a single off-graph sample") {
    const ModelParams params(2, 1.0, 1);
    Orbit orbit;
    orbit.param = TimeParam::S;
    orbit.samples.push_back({0.0, {0.1, 0.5}});
    const auto res = cm_residual(params, orbit);
    REQUIRE(res.size() == 1);
    CHECK(res[0].second == doctest::Approx(0.402).epsilon(1e-13));

    Orbit empty;
    empty.param = TimeParam::S;
    CHECK_THROWS_AS(cm_residual(params, empty), std::invalid_argument);
}

TEST_CASE("residual/phi^{p+2} stays bounded above along the connecting orbit") {
    const ModelParams params(2, 1.0, 1);
    ConnectingOrbitOptions opts;
    opts.tail_phi_min = 5e-4;
    const auto orbit = connecting_orbit(params, 0.1, 1e-11, opts);
    double bound = 0.0;
    for (const auto& [phi, r] : cm_residual(params, orbit)) {
        if (phi < 1e-3 || phi > 1e-1) continue;
        bound = std::max(bound, r / std::pow(phi, params.p() + 2));
    }
    CHECK(bound > 0.0);
    CHECK(bound < 10.0);  // the graph coefficient scale is O(1), so K stays small
}

TEST_CASE("off-manifold transients decay like e^{-cs} down to the truncation gap") {
    const ModelParams params(2, 1.0, 1);
    const double phi0 = 0.05, delta0 = 1e-3;
    const PhaseState start{phi0, cm_graph(params, phi0) + delta0};
    const auto orbit = integrate(params, TimeParam::S, start, {0.0, 6.0}, 1e-12);
    const auto res = cm_residual(params, orbit);

    auto residual_at = [&](double s_target) {
        std::size_t best = 0;
        for (std::size_t i = 0; i < orbit.samples.size(); ++i)
            if (std::abs(orbit.samples[i].t - s_target) <
                std::abs(orbit.samples[best].t - s_target))
                best = i;
        return res[best].second;
    };
    const double r1 = residual_at(0.5);
    const double r2 = residual_at(4.0);
    const double rate = std::log(r1 / r2) / 3.5;
    CHECK(rate == doctest::Approx(params.c()).epsilon(0.15));

    // by s = 14 the transient (delta0 e^{-cs} ~ 1e-9) has fallen below the
    // truncation gap of the kept graph orders, which scales like phi^{2p+1}
    const auto tail = integrate(params, TimeParam::S, start, {0.0, 14.0}, 1e-12);
    const auto tres = cm_residual(params, tail);
    const double floor_gap = tres.back().second;
    const double phi_end = tail.samples.back().state.phi;
    const double gap_scale = std::pow(phi_end, 2 * params.p() + 1);
    CHECK(floor_gap > 0.1 * gap_scale);
    CHECK(floor_gap < 100.0 * gap_scale);
}
