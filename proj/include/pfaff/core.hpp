#ifndef PFAFF_CORE_HPP
#define PFAFF_CORE_HPP

// Phase-space primitives: states, scalar fields with finite-difference
// gradient fallback, system definitions, canonical bracket, divergence.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pfaff/errors.hpp"
#include "pfaff/linalg.hpp"

namespace pfaff {

struct PhaseState {
    double t = 0.0;
    Vec x;

    int dim() const { return static_cast<int>(x.size()); }

    void validate() const {
        if (x.empty()) throw DimensionError("PhaseState: dimension must be >= 1");
        if (!std::isfinite(t) || !all_finite(x))
            throw DomainError("PhaseState: non-finite coordinate");
    }
};

namespace detail {

/// 4th-order central difference step, scaled to the coordinate magnitude.
inline double fd_step(double xi) { return 1e-5 * (1.0 + std::abs(xi)); }

template <class F>
double central_diff4(const F& f, Vec x, int i) {
    const double h = fd_step(x[i]);
    const double xi = x[i];
    x[i] = xi + 2 * h; const double f2p = f(x);
    x[i] = xi + h;     const double f1p = f(x);
    x[i] = xi - h;     const double f1m = f(x);
    x[i] = xi - 2 * h; const double f2m = f(x);
    return (-f2p + 8 * f1p - 8 * f1m + f2m) / (12 * h);
}

}  // namespace detail

/// Real function on phase space. When no analytic gradient is supplied,
/// gradient() falls back to 4th-order central differences.
struct ScalarField {
    std::function<double(const Vec&)> eval;
    std::function<Vec(const Vec&)> grad;  // optional

    double operator()(const Vec& x) const { return eval(x); }

    Vec gradient(const Vec& x) const {
        if (grad) return grad(x);
        Vec g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            g[i] = detail::central_diff4(eval, x, static_cast<int>(i));
        return g;
    }
};

/// State-dependent skew-symmetric structure matrix B(x).
struct SkewField {
    int dim = 0;
    std::function<Mat(const Vec&)> eval;

    Mat operator()(const Vec& x) const { return eval(x); }

    static SkewField constant(Mat m) {
        SkewField b;
        b.dim = m.rows;
        b.eval = [m = std::move(m)](const Vec&) { return m; };
        return b;
    }

    /// Canonical symplectic structure J on R^{2n}: J (K_x, K_p) = (K_p, -K_x).
    static SkewField canonical(int dim) {
        if (dim % 2 != 0) throw DimensionError("canonical structure needs even dimension");
        Mat j(dim, dim);
        const int n = dim / 2;
        for (int i = 0; i < n; ++i) {
            j(i, n + i) = 1.0;
            j(n + i, i) = -1.0;
        }
        return constant(std::move(j));
    }
};

/// One-form dK = sum_i K_i(x) dx^i. Possibly non-exact ("Pfaffian"): in that
/// case it is not the differential of any state function and only line
/// integrals along trajectories are meaningful.
struct PfaffianForm {
    int dim = 0;
    std::vector<std::function<double(const Vec&)>> components;
    bool exact = false;
    std::optional<ScalarField> potential;  // set when exact

    Vec components_at(const Vec& x) const {
        Vec k(components.size());
        for (std::size_t i = 0; i < components.size(); ++i) k[i] = components[i](x);
        return k;
    }
};

/// Autonomous vector field with whatever structure is known about it.
struct SystemDef {
    int dim = 0;
    std::function<Vec(const Vec&)> field;
    std::optional<ScalarField> hamiltonian;  // first integral H with f = B grad H
    std::optional<SkewField> skew;           // B in f = B grad H
    std::optional<PfaffianForm> pfaffian;    // dK of the effective invariant
    std::function<bool(const Vec&)> domain_guard;       // default: all of R^d
    std::function<double(const Vec&)> analytic_div;     // optional exact divergence

    bool in_domain(const Vec& x) const { return !domain_guard || domain_guard(x); }

    Vec eval_field(const Vec& x) const {
        if (static_cast<int>(x.size()) != dim)
            throw DimensionError("SystemDef: state dimension mismatch");
        return field(x);
    }

    /// Guard accepting componentwise x_i >= 0 (concentration systems).
    static std::function<bool(const Vec&)> nonneg_guard() {
        return [](const Vec& x) {
            for (double v : x)
                if (v < 0.0) return false;
            return true;
        };
    }
};

/// Time-stamped integration output. Reservoir series are indexed
/// [reservoir][sample]; diagnostic series are empty when unavailable.
struct Trajectory {
    std::vector<double> t;
    std::vector<Vec> x;
    std::vector<std::vector<double>> reservoirs;
    std::vector<double> series_H;
    std::vector<double> series_K;
    std::vector<double> series_div;
    std::string error;  // nonempty if the run aborted; samples up to the abort are kept

    std::size_t size() const { return t.size(); }
    bool aborted() const { return !error.empty(); }
};

// --- Operations -------------------------------------------------------------

/// Canonical Poisson bracket {f,g} = sum_i (df/dx^i dg/dp_i - df/dp_i dg/dx^i)
/// with coordinates ordered (x^1..x^n, p_1..p_n).
inline double poisson_bracket(const ScalarField& f, const ScalarField& g,
                              const PhaseState& s) {
    const int d = s.dim();
    if (d % 2 != 0) throw DimensionError("poisson_bracket: odd dimension");
    const int n = d / 2;
    const Vec gf = f.gradient(s.x);
    const Vec gg = g.gradient(s.x);
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        sum += gf[i] * gg[n + i] - gf[n + i] * gg[i];
    return sum;
}

/// X_H = (dH/dp, -dH/dx) on canonically ordered coordinates.
inline Vec hamiltonian_field(const ScalarField& H, const PhaseState& s) {
    const int d = s.dim();
    if (d % 2 != 0) throw DimensionError("hamiltonian_field: odd dimension");
    const int n = d / 2;
    const Vec g = H.gradient(s.x);
    Vec v(d);
    for (int i = 0; i < n; ++i) {
        v[i] = g[n + i];
        v[n + i] = -g[i];
    }
    return v;
}

/// Divergence of the vector field at s: analytic when the system carries one,
/// otherwise 4th-order central differences with step h_fd per coordinate.
inline double divergence(const SystemDef& sys, const PhaseState& s, double h_fd) {
    if (h_fd <= 0) throw Error("divergence: h_fd must be positive");
    if (!sys.in_domain(s.x))
        throw DomainError("divergence: state outside domain");
    if (sys.analytic_div) return sys.analytic_div(s.x);
    double div = 0.0;
    for (int i = 0; i < sys.dim; ++i) {
        Vec x = s.x;
        const double xi = x[i];
        auto probe = [&](double off) {
            x[i] = xi + off;
            if (!sys.in_domain(x))
                throw DomainError("divergence: finite-difference probe left domain", i);
            return sys.field(x)[i];
        };
        const double f2p = probe(2 * h_fd), f1p = probe(h_fd);
        const double f1m = probe(-h_fd), f2m = probe(-2 * h_fd);
        div += (-f2p + 8 * f1p - 8 * f1m + f2m) / (12 * h_fd);
    }
    return div;
}

/// Residual of f = B grad H at one state, relative to |f| (absolute when f ~ 0).
inline double skew_gradient_residual(const SystemDef& sys, const Vec& x) {
    if (!sys.hamiltonian || !sys.skew)
        throw ConfigError("skew_gradient_residual: system lacks B or H");
    const Vec f = sys.field(x);
    const Vec bh = matvec(sys.skew->eval(x), sys.hamiltonian->gradient(x));
    const double scale = std::max(norm(f), 1.0);
    return norm(f - bh) / scale;
}

}  // namespace pfaff

#endif
