#include "doctest.h"

#include <random>

#include "pfaff/integrate.hpp"
#include "pfaff/reservoir.hpp"
#include "pfaff/zoo.hpp"

using namespace pfaff;

TEST_CASE("reservoir_increment: trapezoidal Stieltjes rule") {
    // g = b p integrated against x, b = 0.1
    ReservoirSpec spec{[](const Vec& x) { return 0.1 * x[1]; }, 0, 0.0};
    const PhaseState a{0.0, {0.0, 1.0}};
    const PhaseState b{0.1, {0.05, 0.9}};
    CHECK(reservoir_increment(spec, a, b) == doctest::Approx(0.00475).epsilon(1e-15));

    // no displacement in the integration coordinate: increment vanishes
    const PhaseState c{0.2, {0.05, 0.4}};
    CHECK(reservoir_increment(spec, b, c) == 0.0);

    ReservoirSpec bad{[](const Vec&) { return 1.0; }, 5, 0.0};
    CHECK_THROWS_AS(reservoir_increment(bad, a, b), DimensionError);
    CHECK_THROWS_AS(reservoir_increment(spec, a, PhaseState{0.0, {1.0, 2.0, 3.0}}),
                    DimensionError);
}

TEST_CASE("accumulate: exact for integrands affine along straight segments") {
    // path x(t) = (t, 2t): w = int x1 dx0 = t^2 exactly, and the trapezoid
    // rule is exact because the integrand is affine on each segment
    Trajectory traj;
    for (int k = 0; k <= 40; ++k) {
        const double t = 0.05 * k;
        traj.t.push_back(t);
        traj.x.push_back({t, 2.0 * t});
    }
    ReservoirSpec spec{[](const Vec& x) { return x[1]; }, 0, 0.25};
    const auto series = accumulate({spec}, traj);
    REQUIRE(series.size() == 1);
    REQUIRE(series[0].size() == traj.size());
    CHECK(series[0][0] == 0.25);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double t = traj.t[k];
        CHECK(series[0][k] == doctest::Approx(0.25 + t * t).epsilon(1e-14));
    }

    Trajectory tiny;
    tiny.t = {0.0};
    tiny.x = {{1.0, 1.0}};
    CHECK_THROWS_AS(accumulate({spec}, tiny), Error);
}

TEST_CASE("pfaffian components and exactness flags") {
    ZooEntry vdp = build("vdp");  // eps = 0.5
    const Vec k = vdp.invariant.pfaffian_components({0.0, 1.0});
    CHECK(k[0] == doctest::Approx(-0.5).epsilon(1e-15));  // x - eps(1-x^2)p
    CHECK(k[1] == doctest::Approx(1.0).epsilon(1e-15));

    const PfaffianForm form = vdp.invariant.to_pfaffian();
    CHECK(!form.exact);
    CHECK(!form.potential.has_value());
    const Vec k2 = form.components_at({0.0, 1.0});
    CHECK(k2[0] == k[0]);
    CHECK(k2[1] == k[1]);

    // conservative system: dK = dH is exact and carries the potential
    ZooEntry lvc = build("lv_canonical");
    const PfaffianForm exact = lvc.invariant.to_pfaffian();
    CHECK(exact.exact);
    REQUIRE(exact.potential.has_value());
    CHECK((*exact.potential)({0.3, -0.2}) ==
          doctest::Approx((*lvc.sys.hamiltonian)({0.3, -0.2})).epsilon(1e-15));
}

TEST_CASE("pfaffian_contract: dK annihilates the flow direction") {
    std::mt19937 rng(99);
    for (const auto& name : zoo_names()) {
        ZooEntry z = build(name);
        CAPTURE(name);
        for (int trial = 0; trial < 25; ++trial) {
            Vec x(z.sys.dim);
            for (int i = 0; i < z.sys.dim; ++i) {
                std::uniform_real_distribution<double> u(z.sample_lo[i], z.sample_hi[i]);
                x[i] = u(rng);
            }
            const PhaseState s{0.0, x};
            const Vec f = z.sys.field(x);
            const double scale =
                std::max(norm(f) * norm(z.invariant.pfaffian_components(x)), 1.0);
            CHECK(std::abs(pfaffian_contract(*z.sys.pfaffian, s, f)) / scale <= 1e-12);
        }
    }

    ZooEntry vdp = build("vdp");
    CHECK_THROWS_AS(pfaffian_contract(*vdp.sys.pfaffian, {0.0, {1.0}}, {1.0}),
                    DimensionError);
}

TEST_CASE("effective_K: drift of K = H + sum w along a damped oscillator run") {
    ZooEntry z = build("damped_oscillator");  // b = 0.1
    IntegrateOptions opt;
    opt.reservoirs = z.invariant.reservoirs;
    opt.potential = &*z.invariant.potential;
    opt.record_div = false;
    Trajectory traj = integrate(z.sys, {0.0, {1.0, 0.0}}, {Method::rk4, 1e-3}, 10.0, opt);
    REQUIRE(!traj.aborted());

    const KSeries ks = effective_K(z.invariant, traj);
    CHECK(ks.initial == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ks.max_drift <= 1e-6);
    // matches the series the integrator co-recorded
    REQUIRE(traj.series_K.size() == ks.series.size());
    for (std::size_t k = 0; k < ks.series.size(); ++k)
        CHECK(traj.series_K[k] == doctest::Approx(ks.series[k]).epsilon(1e-15));

    // H alone decays: the reservoir carries away a visible share of the energy
    CHECK(traj.series_H.back() < 0.4);

    // effective_K also accumulates from scratch when the trajectory carries
    // no reservoir series
    Trajectory bare;
    bare.t = traj.t;
    bare.x = traj.x;
    const KSeries ks2 = effective_K(z.invariant, bare);
    CHECK(ks2.max_drift == doctest::Approx(ks.max_drift).epsilon(1e-12));
}

TEST_CASE("k_field reproduces the flow under the sign convention dK = (-f2, f1)") {
    std::mt19937 rng(2);
    for (const auto& name : zoo_names()) {
        ZooEntry z = build(name);
        if (z.sys.dim % 2 != 0) {
            CHECK_THROWS_AS(k_field(z.invariant, {0.0, Vec(z.sys.dim, 1.0)}),
                            DimensionError);
            continue;
        }
        CAPTURE(name);
        // robertson_reduced pairs dK with -J instead of J
        const double sign = (name == "robertson_reduced") ? -1.0 : 1.0;
        for (int trial = 0; trial < 25; ++trial) {
            Vec x(z.sys.dim);
            for (int i = 0; i < z.sys.dim; ++i) {
                std::uniform_real_distribution<double> u(z.sample_lo[i], z.sample_hi[i]);
                x[i] = u(rng);
            }
            const Vec v = k_field(z.invariant, {0.0, x});
            const Vec f = z.sys.field(x);
            const double scale = std::max(norm(f), 1.0);
            CHECK(norm(v - sign * f) / scale <= 1e-12);
        }
    }

    ZooEntry two = build("two_reservoir");  // d = e = 0.1
    const Vec v = k_field(two.invariant, {0.0, {1.0, 1.0}});
    CHECK(v[0] == doctest::Approx(1.1).epsilon(1e-15));
    CHECK(v[1] == doctest::Approx(-1.1).epsilon(1e-15));
}
