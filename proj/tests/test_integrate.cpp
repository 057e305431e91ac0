#include "doctest.h"

#include <cmath>

#include "pfaff/integrate.hpp"
#include "pfaff/zoo.hpp"

using namespace pfaff;

namespace {

SystemDef harmonic() {
    SystemDef sys;
    sys.dim = 2;
    sys.field = [](const Vec& x) { return Vec{x[1], -x[0]}; };
    sys.hamiltonian = ScalarField{
        [](const Vec& x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); },
        [](const Vec& x) { return Vec{x[0], x[1]}; }};
    sys.skew = SkewField::canonical(2);
    return sys;
}

}  // namespace

TEST_CASE("step_rk4: scalar exponential, one step") {
    SystemDef sys;
    sys.dim = 1;
    sys.field = [](const Vec& x) { return Vec{x[0]}; };
    const PhaseState out = step_rk4(sys, {0.0, {1.0}}, 0.1);
    // 1 + h + h^2/2 + h^3/6 + h^4/24
    CHECK(out.x[0] == doctest::Approx(1.1051708333333333).epsilon(1e-16));
    CHECK(out.t == 0.1);
    CHECK_THROWS_AS(step_rk4(sys, {0.0, {1.0}}, 0.0), Error);
}

TEST_CASE("step_rk4: stage points respect the domain guard") {
    SystemDef sys;
    sys.dim = 1;
    sys.field = [](const Vec&) { return Vec{-1.0}; };
    sys.domain_guard = SystemDef::nonneg_guard();
    CHECK_THROWS_AS(step_rk4(sys, {0.0, {1e-4}}, 0.1), DomainError);
    CHECK_THROWS_AS(step_rk4(sys, {0.0, {-1.0}}, 0.1), DomainError);
    CHECK_NOTHROW(step_rk4(sys, {0.0, {1.0}}, 0.1));
}

TEST_CASE("step_implicit_midpoint: exact rational map on linear problems") {
    SystemDef sys;
    sys.dim = 1;
    sys.field = [](const Vec& x) { return Vec{-x[0]}; };
    IntegratorConfig cfg{Method::implicit_midpoint, 0.1};
    const PhaseState out = step_implicit_midpoint(sys, {0.0, {1.0}}, 0.1, cfg);
    // (1 + h lambda / 2) / (1 - h lambda / 2) with lambda = -1
    CHECK(out.x[0] == doctest::Approx(0.95 / 1.05).epsilon(1e-13));
}

TEST_CASE("implicit midpoint preserves quadratic invariants to round-off") {
    const SystemDef sys = harmonic();
    IntegratorConfig cfg{Method::implicit_midpoint, 0.01};
    IntegrateOptions opt;
    opt.potential = &*sys.hamiltonian;
    opt.record_div = false;
    Trajectory traj = integrate(sys, {0.0, {1.0, 0.0}}, cfg, 10.0, opt);
    REQUIRE(!traj.aborted());
    double drift = 0.0;
    for (double h : traj.series_H) drift = std::max(drift, std::abs(h - 0.5));
    CHECK(drift <= 1e-12);
}

TEST_CASE("newton solver failure surfaces as ConvergenceError") {
    SystemDef sys;
    sys.dim = 1;
    sys.field = [](const Vec& x) { return Vec{x[0] * x[0] * x[0]}; };
    IntegratorConfig cfg{Method::implicit_midpoint, 0.5, 1e-12, 1};
    CHECK_THROWS_AS(step_implicit_midpoint(sys, {0.0, {1.0}}, 0.5, cfg), ConvergenceError);
}

TEST_CASE("discrete gradient: H preserved exactly on the Poisson LV system") {
    ZooEntry lv = build("lv");
    IntegratorConfig cfg{Method::discrete_gradient, 0.01};
    IntegrateOptions opt;
    opt.potential = &*lv.sys.hamiltonian;
    opt.record_div = false;
    Trajectory traj = integrate(lv.sys, {0.0, {1.5, 0.5}}, cfg, 50.0, opt);
    REQUIRE(!traj.aborted());
    const double m0 = traj.series_H.front();
    double drift = 0.0;
    for (double m : traj.series_H) drift = std::max(drift, std::abs(m - m0));
    CHECK(drift <= 1e-12);

    // the same run under RK4 drifts measurably more
    Trajectory rk = integrate(lv.sys, {0.0, {1.5, 0.5}}, {Method::rk4, 0.01}, 50.0, opt);
    double rk_drift = 0.0;
    for (double m : rk.series_H) rk_drift = std::max(rk_drift, std::abs(m - m0));
    CHECK(rk_drift > 100.0 * drift);
}

TEST_CASE("discrete gradient: configuration errors") {
    SystemDef bare;
    bare.dim = 2;
    bare.field = [](const Vec& x) { return Vec{x[1], -x[0]}; };
    IntegratorConfig cfg{Method::discrete_gradient, 0.01};
    CHECK_THROWS_AS(step_discrete_gradient(bare, {0.0, {1.0, 0.0}}, 0.01, cfg), ConfigError);

    bare.skew = SkewField::canonical(2);  // still no H and no dK
    CHECK_THROWS_AS(step_discrete_gradient(bare, {0.0, {1.0, 0.0}}, 0.01, cfg), ConfigError);
}

TEST_CASE("discrete gradient: midpoint Pfaffian fallback keeps linear Casimirs") {
    ZooEntry rob = build("robertson");
    const SystemDef sys = rob.poisson_form();  // constant Poisson E, dK only
    REQUIRE(!sys.hamiltonian);
    REQUIRE(sys.pfaffian);
    IntegratorConfig cfg{Method::discrete_gradient, 1e-3};
    Trajectory traj = integrate(sys, {0.0, {0.6, 0.3, 0.1}}, cfg, 1.0, {});
    REQUIRE(!traj.aborted());
    double drift = 0.0;
    for (const Vec& x : traj.x) drift = std::max(drift, std::abs(x[0] + x[1] + x[2] - 1.0));
    CHECK(drift <= 1e-13);

    // and it still follows the Robertson flow (2nd-order accurate)
    Trajectory ref = integrate(rob.sys, {0.0, {0.6, 0.3, 0.1}}, {Method::rk4, 1e-3}, 1.0, {});
    CHECK(norm_inf(traj.x.back() - ref.x.back()) <= 1e-5);
}

TEST_CASE("integrate: sampling grid, diagnostics, and abort handling") {
    ZooEntry z = build("damped_oscillator");  // b = 0.1
    IntegrateOptions opt;
    opt.reservoirs = z.invariant.reservoirs;
    opt.potential = &*z.invariant.potential;
    Trajectory traj = integrate(z.sys, {0.0, {1.0, 0.0}}, {Method::rk4, 0.1}, 1.0, opt);
    REQUIRE(traj.size() == 11);
    CHECK(traj.t.front() == 0.0);
    CHECK(traj.t.back() == 1.0);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        CHECK(traj.series_div[k] == -0.1);  // analytic divergence
        CHECK(traj.series_K[k] ==
              doctest::Approx(traj.series_H[k] + traj.reservoirs[0][k]).epsilon(1e-15));
    }

    CHECK_THROWS_AS(integrate(z.sys, {0.0, {1.0, 0.0}}, {Method::rk4, 0.1}, -1.0, opt), Error);
    CHECK_THROWS_AS(integrate(z.sys, {0.0, {1.0}}, {Method::rk4, 0.1}, 1.0, opt),
                    DimensionError);

    // a run that leaves the domain keeps its partial trajectory plus an error
    SystemDef dec;
    dec.dim = 1;
    dec.field = [](const Vec&) { return Vec{-1.0}; };
    dec.domain_guard = SystemDef::nonneg_guard();
    Trajectory part = integrate(dec, {0.0, {0.25}}, {Method::rk4, 0.1}, 1.0, {});
    CHECK(part.aborted());
    CHECK(part.size() >= 2);
    CHECK(part.size() < 11);
    CHECK(part.error.find("domain") != std::string::npos);
}

TEST_CASE("convergence_order: quadrature-limited order, saturation for exact schemes") {
    ZooEntry vdp = build("vdp");
    IntegratorConfig cfg{Method::rk4, 0.0};
    const OrderEstimate est = convergence_order(vdp.sys, {0.0, {2.0, 0.0}}, vdp.invariant,
                                                cfg, {0.02, 0.01, 0.005}, 2.0);
    CHECK(!est.saturated);
    // K-drift is dominated by the 2nd-order reservoir quadrature
    CHECK(est.order > 1.6);
    CHECK(est.order < 2.6);

    // implicit midpoint on the harmonic oscillator: drift sits at round-off
    SystemDef sys = harmonic();
    EffectiveInvariant inv;
    inv.dim = 2;
    inv.potential = sys.hamiltonian;
    IntegratorConfig mid{Method::implicit_midpoint, 0.0};
    const OrderEstimate sat =
        convergence_order(sys, {0.0, {1.0, 0.0}}, inv, mid, {0.1, 0.05, 0.025}, 1.0);
    CHECK(sat.saturated);

    CHECK_THROWS_AS(
        convergence_order(sys, {0.0, {1.0, 0.0}}, inv, mid, {0.1, 0.05}, 1.0), Error);
    CHECK_THROWS_AS(
        convergence_order(sys, {0.0, {1.0, 0.0}}, inv, mid, {0.1, 0.05, 0.03}, 1.0), Error);
}
