#include "doctest.h"

#include <random>

#include "pfaff/skew.hpp"
#include "pfaff/zoo.hpp"

using namespace pfaff;

TEST_CASE("zoo catalogue and parameter validation") {
    CHECK(zoo_names().size() == 9);
    for (const auto& name : zoo_names()) {
        ZooEntry z = build(name);
        CHECK(z.name == name);
        CHECK(z.sys.dim >= 2);
        CHECK(static_cast<int>(z.sample_lo.size()) == z.sys.dim);
        CHECK(z.invariant.dim == z.sys.dim);
        CHECK(z.sys.pfaffian.has_value());
    }

    CHECK_THROWS_AS(build("lorenz"), ConfigError);
    CHECK_THROWS_AS(zoo_schema("lorenz"), ConfigError);
    CHECK_THROWS_AS(build("vdp", {{"eps", -1.0}}), ConfigError);
    CHECK_THROWS_AS(build("vdp", {{"epsilon", 0.5}}), ConfigError);
    CHECK(build("vdp").params.at("eps") == 0.5);
    CHECK(build("damped_oscillator", {{"b", 0.3}}).params.at("b") == 0.3);
}

TEST_CASE("damped oscillator and two-reservoir decompositions") {
    ZooEntry d = build("damped_oscillator", {{"b", 0.25}});
    const Vec f = d.sys.field({1.0, 2.0});
    CHECK(f[0] == 2.0);
    CHECK(f[1] == doctest::Approx(-1.5));
    CHECK(d.sys.analytic_div({0.0, 0.0}) == -0.25);
    // dK = (x + b p) dx + p dp
    const Vec k = d.invariant.pfaffian_components({1.0, 2.0});
    CHECK(k[0] == doctest::Approx(1.5));
    CHECK(k[1] == 2.0);

    ZooEntry two = build("two_reservoir", {{"d", 0.2}, {"e", -0.1}});
    const Vec g = two.sys.field({1.0, 1.0});
    CHECK(g[0] == doctest::Approx(0.9));
    CHECK(g[1] == doctest::Approx(-1.2));
    CHECK(two.invariant.reservoirs.size() == 2);
}

TEST_CASE("vdp: reservoir sign convention gives pdot = -K_x identically") {
    ZooEntry z = build("vdp", {{"eps", 0.8}});
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Vec x{u(rng), u(rng)};
        const Vec f = z.sys.field(x);
        const Vec k = z.invariant.pfaffian_components(x);
        CHECK(f[0] == doctest::Approx(k[1]).epsilon(1e-14));   // xdot = K_p
        CHECK(f[1] == doctest::Approx(-k[0]).epsilon(1e-14));  // pdot = -K_x
    }
}

TEST_CASE("brusselator: potential plus two reservoirs, positivity guard") {
    ZooEntry z = build("brusselator");  // a = 1, b = 3
    const Vec f = z.sys.field({1.0, 1.0});
    CHECK(f[0] == -2.0);
    CHECK(f[1] == 2.0);
    CHECK(!z.sys.in_domain({-0.1, 1.0}));
    CHECK(z.sys.analytic_div({1.0, 1.0}) == doctest::Approx(2.0 - 3.0 - 1.0 - 1.0));
    const Vec k = z.invariant.pfaffian_components({1.0, 1.0});
    CHECK(k[0] == doctest::Approx(-f[1]).epsilon(1e-14));
    CHECK(k[1] == doctest::Approx(f[0]).epsilon(1e-14));
}

TEST_CASE("lv: Poisson form, log transform, canonical twin") {
    ZooEntry lv = build("lv", {{"alpha", 2.0}, {"beta", 0.5}});
    // fixed point at (beta, 1/alpha)
    const Vec f = lv.sys.field({0.5, 0.5});
    CHECK(f[0] == 0.0);
    CHECK(f[1] == 0.0);
    CHECK(skew_gradient_residual(lv.sys, {1.0, 1.5}) <= 1e-12);

    // log transform conjugates the flows
    ZooEntry lvc = build("lv_canonical", {{"alpha", 2.0}, {"beta", 0.5}});
    const Vec uv{1.2, 0.7};
    const PhaseState qp = lv_log_transform({0.0, uv});
    const Vec fc = lvc.sys.field(qp.x);
    const Vec fuv = lv.sys.field(uv);
    CHECK(fc[0] == doctest::Approx(fuv[0] / uv[0]).epsilon(1e-14));
    CHECK(fc[1] == doctest::Approx(fuv[1] / uv[1]).epsilon(1e-14));
    // and the Hamiltonians agree pointwise
    CHECK((*lv.sys.hamiltonian)(uv) == doctest::Approx((*lvc.sys.hamiltonian)(qp.x)).epsilon(1e-14));

    // round trip
    const PhaseState back = lv_exp_transform(qp);
    CHECK(back.x[0] == doctest::Approx(uv[0]).epsilon(1e-14));
    CHECK(back.x[1] == doctest::Approx(uv[1]).epsilon(1e-14));
    CHECK_THROWS_AS(lv_log_transform({0.0, {0.0, 1.0}}), DomainError);
    CHECK_THROWS_AS(lv_log_transform({0.0, {1.0}}), DimensionError);

    // standalone dK for the unit-parameter system: J dK = f
    const PfaffianForm form = lv_pfaffian_K();
    ZooEntry unit = build("lv");
    const Vec k = form.components_at({1.5, 0.5});
    const Vec g = unit.sys.field({1.5, 0.5});
    CHECK(k[1] == doctest::Approx(g[0]).epsilon(1e-14));
    CHECK(-k[0] == doctest::Approx(g[1]).epsilon(1e-14));
}

TEST_CASE("robertson: two structural readings of one network") {
    ZooEntry z = build("robertson");
    const Vec f = z.sys.field({1.0, 1.0, 1.0});
    CHECK(f[0] == 0.0);
    CHECK(f[1] == -1.0);
    CHECK(f[2] == 1.0);
    CHECK(!z.skew_is_poisson);

    // mass-action skew reproduces f via B grad(x+y+z) but violates Jacobi
    CHECK(skew_gradient_residual(z.sys, {0.7, 0.2, 0.1}) <= 1e-12);
    CHECK(check_jacobi(*z.sys.skew, {0.0, {1.0, 1.0, 1.0}}, 1e-5).normalized() > 1e-6);

    // constant Poisson structure drives the same flow through dK
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.1, 1.5);
    for (int trial = 0; trial < 30; ++trial) {
        const Vec x{u(rng), u(rng), u(rng)};
        const Vec k = z.invariant.pfaffian_components(x);
        const Vec ek = matvec(z.structure->eval(x), k);
        const Vec fx = z.sys.field(x);
        CHECK(norm(ek - fx) <= 1e-12 * std::max(norm(fx), 1.0));
    }
    CHECK(check_jacobi(*z.structure, {0.0, {1.0, 1.0, 1.0}}, 1e-5).raw <= 1e-12);
    CHECK(verify_casimir(*z.structure, *z.casimir, {{0.0, {0.3, 0.3, 0.4}}}).confirmed());
    REQUIRE(z.reduction.has_value());
    CHECK(z.reduction->eliminated_index == 0);
}

TEST_CASE("robertson_reduced: frozen leaf field and domain guard") {
    ZooEntry z = build("robertson_reduced");  // unit rates, m0 = 1
    const Vec f = z.sys.field({0.5, 0.25});
    CHECK(f[0] == doctest::Approx(-0.125).epsilon(1e-15));
    CHECK(f[1] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(z.sys.in_domain({0.5, 0.25}));
    CHECK(!z.sys.in_domain({0.7, 0.4}));  // leaves x = m0 - y - z >= 0
    CHECK(!z.sys.in_domain({-0.1, 0.2}));

    // dK paired with -J: ydot = -K_z, zdot = K_y
    const Vec k = z.invariant.pfaffian_components({0.5, 0.25});
    CHECK(f[0] == doctest::Approx(-k[1]).epsilon(1e-14));
    CHECK(f[1] == doctest::Approx(k[0]).epsilon(1e-14));
}

TEST_CASE("rosenzweig: functional responses and parameter handling") {
    CHECK(holling_response(2.0, 1) == 2.0);
    CHECK(holling_response(1.0, 2) == 0.5);
    CHECK(holling_response(1.0, 3) == 0.5);
    CHECK(holling_response(3.0, 3) == doctest::Approx(0.9));
    CHECK_THROWS_AS(holling_response(1.0, 4), ConfigError);

    // default: exponential growth (K = inf), type 1
    ZooEntry z = build("rosenzweig");
    const Vec f = z.sys.field({1.0, 1.0});
    CHECK(f[0] == 0.0);   // u - v u
    CHECK(f[1] == 0.0);   // v(-1 + u)

    ZooEntry cap = build("rosenzweig", {{"K", 4.0}});
    const Vec g = cap.sys.field({2.0, 1.0});
    CHECK(g[0] == doctest::Approx(-1.0));  // 2(1 - 1/2) - 2
    CHECK(g[1] == doctest::Approx(1.0));

    ZooEntry sat = build("rosenzweig", {{"holling", 2.0}});
    const Vec s = sat.sys.field({1.0, 1.0});
    CHECK(s[0] == doctest::Approx(0.5));
    CHECK(s[1] == doctest::Approx(-0.5));

    CHECK_THROWS_AS(build("rosenzweig", {{"holling", 2.5}}), ConfigError);
    CHECK_THROWS_AS(build("rosenzweig", {{"holling", 4.0}}), ConfigError);
}

TEST_CASE("poisson_form: structure-driven variant drops H, keeps dK") {
    ZooEntry z = build("robertson");
    const SystemDef p = z.poisson_form();
    CHECK(!p.hamiltonian.has_value());
    REQUIRE(p.skew.has_value());
    // skew slot now holds the constant Poisson matrix
    CHECK(p.skew->eval({1.0, 1.0, 1.0})(0, 1) == 1.0);
    CHECK(p.pfaffian.has_value());
}
