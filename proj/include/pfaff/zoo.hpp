#ifndef PFAFF_ZOO_HPP
#define PFAFF_ZOO_HPP

// Built-in example systems with their effective-invariant decompositions,
// skew structures, Casimirs, and coordinate transforms.
//
// Sign convention throughout: dK components are (-f_2, f_1) in canonical 2D,
// so xdot = K_p, pdot = -K_x and the contraction dK(f) vanishes identically.

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "pfaff/core.hpp"
#include "pfaff/reservoir.hpp"
#include "pfaff/skew.hpp"

namespace pfaff {

using Params = std::map<std::string, double>;

struct ParamSpec {
    double def = 0.0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

using ParamSchema = std::map<std::string, ParamSpec>;

struct ZooEntry {
    std::string name;
    Params params;                       // resolved values
    SystemDef sys;                       // field + whatever structure applies
    EffectiveInvariant invariant;        // dK = d(potential) + reservoirs
    std::optional<SkewField> structure;  // Poisson structure paired with dK
    std::optional<ScalarField> casimir;  // w.r.t. `structure`
    std::optional<CasimirSpec> reduction;
    bool skew_is_poisson = true;  // false: sys.skew known to violate Jacobi
    Vec sample_lo, sample_hi;     // box for random valid states

    /// System variant driven by the Pfaffian through `structure`
    /// (xdot = B dK), for the discrete-gradient integrator.
    SystemDef poisson_form() const {
        SystemDef s = sys;
        s.skew = structure;
        s.hamiltonian.reset();
        return s;
    }
};

inline std::vector<std::string> zoo_names() {
    return {"damped_oscillator", "two_reservoir", "vdp", "brusselator", "lv",
            "lv_canonical", "robertson", "robertson_reduced", "rosenzweig"};
}

inline ParamSchema zoo_schema(const std::string& name) {
    const double inf = std::numeric_limits<double>::infinity();
    if (name == "damped_oscillator") return {{"b", {0.1, 0.0, inf}}};
    if (name == "two_reservoir") return {{"d", {0.1, -inf, inf}}, {"e", {0.1, -inf, inf}}};
    if (name == "vdp") return {{"eps", {0.5, 0.0, inf}}};
    if (name == "brusselator") return {{"a", {1.0, 1e-12, inf}}, {"b", {3.0, 1e-12, inf}}};
    if (name == "lv" || name == "lv_canonical")
        return {{"alpha", {1.0, 1e-12, inf}}, {"beta", {1.0, 1e-12, inf}}};
    if (name == "robertson")
        return {{"a", {1.0, 1e-12, inf}}, {"b", {1.0, 1e-12, inf}}, {"c", {1.0, 1e-12, inf}}};
    if (name == "robertson_reduced")
        return {{"a", {1.0, 1e-12, inf}}, {"b", {1.0, 1e-12, inf}},
                {"c", {1.0, 1e-12, inf}}, {"m0", {1.0, 1e-12, inf}}};
    if (name == "rosenzweig")
        return {{"r", {1.0, 1e-12, inf}}, {"K", {inf, 1e-12, inf}},
                {"alpha", {1.0, 1e-12, inf}}, {"beta", {1.0, 1e-12, inf}},
                {"holling", {1.0, 1.0, 3.0}}};
    throw ConfigError("unknown system name '" + name + "'");
}

namespace detail {

inline Params resolve_params(const std::string& name, const Params& given) {
    const ParamSchema schema = zoo_schema(name);
    Params out;
    for (const auto& [key, spec] : schema) out[key] = spec.def;
    for (const auto& [key, value] : given) {
        auto it = schema.find(key);
        if (it == schema.end())
            throw ConfigError(name + ": unknown parameter '" + key + "'");
        if (!(value >= it->second.lo && value <= it->second.hi))
            throw ConfigError(name + ": parameter '" + key + "' = " +
                              std::to_string(value) + " out of admissible range");
        out[key] = value;
    }
    return out;
}

}  // namespace detail

/// Holling functional response: linear, saturating, or sigmoid (unit
/// half-saturation for types 2 and 3).
inline double holling_response(double u, int type) {
    switch (type) {
        case 1: return u;
        case 2: return u / (1.0 + u);
        case 3: return u * u / (1.0 + u * u);
        default: throw ConfigError("holling_response: type must be 1, 2 or 3");
    }
}

/// (u,v) -> (ln u, ln v), mapping the LV Poisson system to canonical form.
inline PhaseState lv_log_transform(const PhaseState& s) {
    if (s.dim() != 2) throw DimensionError("lv_log_transform: expects dimension 2");
    if (!(s.x[0] > 0.0) || !(s.x[1] > 0.0))
        throw DomainError("lv_log_transform: non-positive concentration");
    return {s.t, {std::log(s.x[0]), std::log(s.x[1])}};
}

inline PhaseState lv_exp_transform(const PhaseState& s) {
    if (s.dim() != 2) throw DimensionError("lv_exp_transform: expects dimension 2");
    return {s.t, {std::exp(s.x[0]), std::exp(s.x[1])}};
}

/// dK = v(beta - u) du + u(1 - alpha v) dv; J dK reproduces the LV field.
inline PfaffianForm lv_pfaffian_K(double alpha = 1.0, double beta = 1.0) {
    PfaffianForm form;
    form.dim = 2;
    form.components = {
        [beta](const Vec& x) { return x[1] * (beta - x[0]); },
        [alpha](const Vec& x) { return x[0] * (1.0 - alpha * x[1]); },
    };
    return form;
}

inline ZooEntry build(const std::string& name, const Params& given = {}) {
    ZooEntry z;
    z.name = name;
    z.params = detail::resolve_params(name, given);
    const Params& p = z.params;

    if (name == "damped_oscillator") {
        const double b = p.at("b");
        z.sys.dim = 2;
        z.sys.field = [b](const Vec& x) { return Vec{x[1], -x[0] - b * x[1]}; };
        z.sys.analytic_div = [b](const Vec&) { return -b; };
        z.invariant.dim = 2;
        z.invariant.potential = ScalarField{
            [](const Vec& x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); },
            [](const Vec& x) { return Vec{x[0], x[1]}; }};
        z.invariant.reservoirs = {{[b](const Vec& x) { return b * x[1]; }, 0, 0.0}};
        z.structure = SkewField::canonical(2);
        z.sample_lo = {-2, -2};
        z.sample_hi = {2, 2};
    } else if (name == "two_reservoir") {
        const double D = p.at("d"), E = p.at("e");
        z.sys.dim = 2;
        z.sys.field = [D, E](const Vec& x) { return Vec{x[1] + E, -x[0] - D}; };
        z.sys.analytic_div = [](const Vec&) { return 0.0; };
        z.invariant.dim = 2;
        z.invariant.potential = ScalarField{
            [](const Vec& x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); },
            [](const Vec& x) { return Vec{x[0], x[1]}; }};
        z.invariant.reservoirs = {{[D](const Vec&) { return D; }, 0, 0.0},
                                  {[E](const Vec&) { return E; }, 1, 0.0}};
        z.structure = SkewField::canonical(2);
        z.sample_lo = {-2, -2};
        z.sample_hi = {2, 2};
    } else if (name == "vdp") {
        const double eps = p.at("eps");
        z.sys.dim = 2;
        z.sys.field = [eps](const Vec& x) {
            return Vec{x[1], -x[0] + eps * (1.0 - x[0] * x[0]) * x[1]};
        };
        z.sys.analytic_div = [eps](const Vec& x) { return eps * (1.0 - x[0] * x[0]); };
        z.invariant.dim = 2;
        z.invariant.potential = ScalarField{
            [](const Vec& x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]); },
            [](const Vec& x) { return Vec{x[0], x[1]}; }};
        // integrand -eps (1 - x^2) p, so pdot = -K_x holds identically
        z.invariant.reservoirs = {
            {[eps](const Vec& x) { return -eps * (1.0 - x[0] * x[0]) * x[1]; }, 0, 0.0}};
        z.structure = SkewField::canonical(2);
        z.sample_lo = {-2.5, -3};
        z.sample_hi = {2.5, 3};
    } else if (name == "brusselator") {
        const double a = p.at("a"), b = p.at("b");
        z.sys.dim = 2;
        z.sys.field = [a, b](const Vec& x) {
            const double xx = x[0], yy = x[1];
            return Vec{a + xx * xx * yy - b * xx - xx, b * xx - xx * xx * yy};
        };
        z.sys.analytic_div = [b](const Vec& x) {
            return 2.0 * x[0] * x[1] - b - 1.0 - x[0] * x[0];
        };
        z.sys.domain_guard = SystemDef::nonneg_guard();
        z.invariant.dim = 2;
        // exact part a y - (1/2) b x^2
        z.invariant.potential = ScalarField{
            [a, b](const Vec& x) { return a * x[1] - 0.5 * b * x[0] * x[0]; },
            [a, b](const Vec& x) { return Vec{-b * x[0], a}; }};
        z.invariant.reservoirs = {
            {[](const Vec& x) { return x[0] * x[0] * x[1]; }, 0, 0.0},
            {[b](const Vec& x) {
                 return x[0] * x[0] * x[1] - b * x[0] - x[0];
             }, 1, 0.0}};
        z.structure = SkewField::canonical(2);
        z.sample_lo = {0.1, 0.1};
        z.sample_hi = {3, 5};
    } else if (name == "lv") {
        const double alpha = p.at("alpha"), beta = p.at("beta");
        z.sys.dim = 2;
        z.sys.field = [alpha, beta](const Vec& x) {
            const double u = x[0], v = x[1];
            return Vec{u - alpha * u * v, -beta * v + u * v};
        };
        z.sys.analytic_div = [alpha, beta](const Vec& x) {
            return 1.0 - beta - alpha * x[1] + x[0];
        };
        z.sys.domain_guard = SystemDef::nonneg_guard();
        SkewField b;
        b.dim = 2;
        b.eval = [](const Vec& x) {
            Mat m(2, 2);
            m(0, 1) = x[0] * x[1];
            m(1, 0) = -x[0] * x[1];
            return m;
        };
        z.sys.skew = b;
        z.sys.hamiltonian = ScalarField{
            [alpha, beta](const Vec& x) {
                return beta * std::log(x[0]) + std::log(x[1]) - x[0] - alpha * x[1];
            },
            [alpha, beta](const Vec& x) {
                return Vec{beta / x[0] - 1.0, 1.0 / x[1] - alpha};
            }};
        z.invariant.dim = 2;
        z.invariant.reservoirs = {
            {[beta](const Vec& x) { return x[1] * (beta - x[0]); }, 0, 0.0},
            {[alpha](const Vec& x) { return x[0] * (1.0 - alpha * x[1]); }, 1, 0.0}};
        z.structure = SkewField::canonical(2);
        z.sample_lo = {0.2, 0.2};
        z.sample_hi = {3, 3};
    } else if (name == "lv_canonical") {
        const double alpha = p.at("alpha"), beta = p.at("beta");
        z.sys.dim = 2;
        z.sys.field = [alpha, beta](const Vec& x) {
            return Vec{1.0 - alpha * std::exp(x[1]), -beta + std::exp(x[0])};
        };
        z.sys.analytic_div = [](const Vec&) { return 0.0; };
        z.sys.skew = SkewField::canonical(2);
        z.sys.hamiltonian = ScalarField{
            [alpha, beta](const Vec& x) {
                return x[1] - alpha * std::exp(x[1]) + beta * x[0] - std::exp(x[0]);
            },
            [alpha, beta](const Vec& x) {
                return Vec{beta - std::exp(x[0]), 1.0 - alpha * std::exp(x[1])};
            }};
        z.invariant.dim = 2;
        z.invariant.potential = z.sys.hamiltonian;
        z.structure = z.sys.skew;
        z.sample_lo = {-1.5, -1.5};
        z.sample_hi = {1.5, 1.5};
    } else if (name == "robertson") {
        const double a = p.at("a"), b = p.at("b"), c = p.at("c");
        z.sys.dim = 3;
        z.sys.field = [a, b, c](const Vec& s) {
            const double x = s[0], y = s[1], zz = s[2];
            return Vec{-a * x + c * y * zz, a * x - b * y * y - c * y * zz, b * y * y};
        };
        z.sys.analytic_div = [a, b, c](const Vec& s) {
            return -a - 2.0 * b * s[1] - c * s[2];
        };
        z.sys.domain_guard = SystemDef::nonneg_guard();
        // mass-action structure matrix (skew, not Poisson)
        SkewField bm;
        bm.dim = 3;
        bm.eval = [a, b, c](const Vec& s) {
            const double x = s[0], y = s[1], zz = s[2];
            Mat m(3, 3);
            m(0, 1) = c * y * zz + b * y * y;
            m(0, 2) = -a * x - b * y * y;
            m(1, 2) = a * x;
            m(1, 0) = -m(0, 1);
            m(2, 0) = -m(0, 2);
            m(2, 1) = -m(1, 2);
            return m;
        };
        z.sys.skew = bm;
        z.sys.hamiltonian = ScalarField{
            [](const Vec& s) { return s[0] + s[1] + s[2]; },
            [](const Vec&) { return Vec{1, 1, 1}; }};
        z.skew_is_poisson = false;
        // constant structure E_ij = sum_k eps_ijk, a genuine Poisson matrix
        Mat e(3, 3);
        e(0, 1) = 1; e(0, 2) = -1;
        e(1, 0) = -1; e(1, 2) = 1;
        e(2, 0) = 1; e(2, 1) = -1;
        z.structure = SkewField::constant(e);
        z.casimir = z.sys.hamiltonian;
        z.invariant.dim = 3;
        // K = -(1/2) a x^2 - (1/3) b y^3 - a int x dy - int (b y^2 + c y z) dz
        z.invariant.potential = ScalarField{
            [a, b](const Vec& s) {
                return -0.5 * a * s[0] * s[0] - b * s[1] * s[1] * s[1] / 3.0;
            },
            [a, b](const Vec& s) { return Vec{-a * s[0], -b * s[1] * s[1], 0.0}; }};
        z.invariant.reservoirs = {
            {[a](const Vec& s) { return -a * s[0]; }, 1, 0.0},
            {[b, c](const Vec& s) { return -(b * s[1] * s[1] + c * s[1] * s[2]); }, 2, 0.0}};
        z.reduction = CasimirSpec{*z.casimir, 1.0, 0};
        z.sample_lo = {0.1, 0.1, 0.1};
        z.sample_hi = {2, 2, 2};
    } else if (name == "robertson_reduced") {
        const double a = p.at("a"), b = p.at("b"), c = p.at("c"), m0 = p.at("m0");
        const double mu = a * m0;
        z.sys.dim = 2;  // coordinates (y, z) on the leaf x = m0 - y - z
        z.sys.field = [a, b, c, mu](const Vec& s) {
            const double y = s[0], zz = s[1];
            return Vec{mu - a * y - a * zz - b * y * y - c * y * zz, b * y * y};
        };
        z.sys.analytic_div = [a, b, c](const Vec& s) { return -a - 2.0 * b * s[0] - c * s[1]; };
        z.sys.domain_guard = [m0](const Vec& s) {
            return s[0] >= 0.0 && s[1] >= 0.0 && m0 - s[0] - s[1] >= 0.0;
        };
        z.invariant.dim = 2;
        // K = -mu z + (1/2) a z^2 + (1/3) b y^3 + int (a y + b y^2 + c y z) dz;
        // here ydot = -K_z, zdot = K_y, so dK is paired with -J.
        z.invariant.potential = ScalarField{
            [a, b, mu](const Vec& s) {
                return -mu * s[1] + 0.5 * a * s[1] * s[1] + b * s[0] * s[0] * s[0] / 3.0;
            },
            [a, b, mu](const Vec& s) { return Vec{b * s[0] * s[0], -mu + a * s[1]}; }};
        z.invariant.reservoirs = {
            {[a, b, c](const Vec& s) {
                 return a * s[0] + b * s[0] * s[0] + c * s[0] * s[1];
             }, 1, 0.0}};
        Mat mj(2, 2);
        mj(0, 1) = -1;
        mj(1, 0) = 1;
        z.structure = SkewField::constant(mj);
        z.sample_lo = {0.05, 0.05};
        z.sample_hi = {0.45, 0.45};
    } else if (name == "rosenzweig") {
        const double r = p.at("r"), Kcap = p.at("K");
        const double alpha = p.at("alpha"), beta = p.at("beta");
        const int type = static_cast<int>(p.at("holling"));
        if (p.at("holling") != 1.0 && p.at("holling") != 2.0 && p.at("holling") != 3.0)
            throw ConfigError("rosenzweig: holling type must be 1, 2 or 3");
        auto field = [r, Kcap, alpha, beta, type](const Vec& s) {
            const double u = s[0], v = s[1];
            const double logistic = std::isinf(Kcap) ? r * u : r * u * (1.0 - u / Kcap);
            const double h = holling_response(u, type);
            return Vec{logistic - v * h, v * (-beta + alpha * h)};
        };
        z.sys.dim = 2;
        z.sys.field = field;
        z.sys.domain_guard = SystemDef::nonneg_guard();
        z.invariant.dim = 2;
        z.invariant.reservoirs = {
            {[field](const Vec& s) { return -field(s)[1]; }, 0, 0.0},
            {[field](const Vec& s) { return field(s)[0]; }, 1, 0.0}};
        z.structure = SkewField::canonical(2);
        z.sample_lo = {0.2, 0.2};
        z.sample_hi = {3, 3};
    } else {
        throw ConfigError("unknown system name '" + name + "'");
    }

    // every entry carries its dK as a PfaffianForm on the SystemDef
    z.sys.pfaffian = z.invariant.to_pfaffian();
    return z;
}

}  // namespace pfaff

#endif
