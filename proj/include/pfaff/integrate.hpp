#ifndef PFAFF_INTEGRATE_HPP
#define PFAFF_INTEGRATE_HPP

// Fixed-step time integration: reference RK4, implicit midpoint, and an
// energy-preserving discrete-gradient scheme for skew-gradient systems,
// with reservoir co-accumulation and convergence-order estimation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "pfaff/core.hpp"
#include "pfaff/reservoir.hpp"

namespace pfaff {

enum class Method { rk4, implicit_midpoint, discrete_gradient };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::rk4: return "rk4";
        case Method::implicit_midpoint: return "implicit_midpoint";
        default: return "discrete_gradient";
    }
}

struct IntegratorConfig {
    Method method = Method::rk4;
    double h = 1e-3;
    double newton_tol = 1e-12;
    int newton_max_iter = 50;
};

namespace detail {

inline void check_domain(const SystemDef& sys, const Vec& x, const char* where) {
    if (sys.in_domain(x)) return;
    int bad = -1;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]) || x[i] < 0.0) { bad = static_cast<int>(i); break; }
    throw DomainError(std::string(where) + ": state left domain" +
                          (bad >= 0 ? " (component " + std::to_string(bad) + ")" : ""),
                      bad);
}

/// Damped Newton on G(y) = 0 with forward-difference Jacobian. Iterates past
/// the requested tolerance while the residual keeps improving, so converged
/// solutions typically sit at round-off.
template <class G>
Vec newton_solve(const G& g, Vec y, double tol, int max_iter) {
    Vec r = g(y);
    double rn = norm_inf(r);
    const int d = static_cast<int>(y.size());
    const double sqeps = std::sqrt(std::numeric_limits<double>::epsilon());
    for (int it = 0; it < max_iter; ++it) {
        if (rn == 0.0) return y;
        Mat jac(d, d);
        for (int j = 0; j < d; ++j) {
            Vec yp = y;
            const double hj = sqeps * (1.0 + std::abs(y[j]));
            yp[j] += hj;
            const Vec rp = g(yp);
            for (int i = 0; i < d; ++i) jac(i, j) = (rp[i] - r[i]) / hj;
        }
        Vec dy = solve(jac, r);
        double lambda = 1.0;
        Vec ynew;
        Vec rnew;
        double rnnew = rn;
        for (int back = 0; back < 10; ++back) {
            ynew = y - lambda * dy;
            rnew = g(ynew);
            rnnew = norm_inf(rnew);
            if (rnnew < rn) break;
            lambda *= 0.5;
        }
        if (!(rnnew < rn)) {
            if (rn <= tol) return y;  // stagnated at an acceptable residual
            throw ConvergenceError("newton: stalled above tolerance", rn);
        }
        y = ynew;
        r = rnew;
        rn = rnnew;
        if (rn <= 1e-2 * tol) return y;
    }
    if (rn <= tol) return y;
    throw ConvergenceError("newton: max iterations exceeded", rn);
}

}  // namespace detail

/// Classical 4th-order Runge-Kutta step.
inline PhaseState step_rk4(const SystemDef& sys, const PhaseState& s, double h) {
    if (h == 0.0) throw Error("step_rk4: zero step");
    detail::check_domain(sys, s.x, "step_rk4");
    const Vec k1 = sys.eval_field(s.x);
    Vec p = s.x + (h / 2) * k1;
    detail::check_domain(sys, p, "step_rk4");
    const Vec k2 = sys.field(p);
    p = s.x + (h / 2) * k2;
    detail::check_domain(sys, p, "step_rk4");
    const Vec k3 = sys.field(p);
    p = s.x + h * k3;
    detail::check_domain(sys, p, "step_rk4");
    const Vec k4 = sys.field(p);
    PhaseState out;
    out.t = s.t + h;
    out.x = s.x + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    detail::check_domain(sys, out.x, "step_rk4");
    return out;
}

/// Implicit midpoint: solves y = s + h f((s+y)/2). Symmetric, 2nd order,
/// preserves quadratic invariants up to the Newton tolerance.
inline PhaseState step_implicit_midpoint(const SystemDef& sys, const PhaseState& s,
                                         double h, const IntegratorConfig& cfg) {
    detail::check_domain(sys, s.x, "step_implicit_midpoint");
    auto g = [&](const Vec& y) {
        const Vec mid = 0.5 * (s.x + y);
        return y - s.x - h * sys.field(mid);
    };
    // Euler predictor
    Vec y0 = s.x + h * sys.eval_field(s.x);
    PhaseState out;
    out.t = s.t + h;
    out.x = detail::newton_solve(g, std::move(y0), cfg.newton_tol, cfg.newton_max_iter);
    detail::check_domain(sys, out.x, "step_implicit_midpoint");
    return out;
}

namespace detail {

/// Midpoint-secant discrete gradient: grad H at the midpoint plus the rank-one
/// correction enforcing gbar . (y - s) = H(y) - H(s).
inline Vec discrete_gradient(const ScalarField& H, const Vec& s, const Vec& y) {
    const Vec mid = 0.5 * (s + y);
    Vec g = H.gradient(mid);
    const Vec dy = y - s;
    const double n2 = dot(dy, dy);
    if (n2 < 1e-28) return H.gradient(s);
    const double corr = (H(y) - H(s) - dot(g, dy)) / n2;
    return g + corr * dy;
}

}  // namespace detail

/// Discrete-gradient step y = s + h B((s+y)/2) gbar(s,y). When the system
/// carries a Hamiltonian, gbar is the midpoint-secant discrete gradient and
/// H is preserved exactly up to the nonlinear-solve residual (skewness of B
/// kills the quadratic form regardless of where B is evaluated). When only a
/// Pfaffian dK is available, its components at the midpoint stand in for
/// gbar; linear Casimirs of B are then still preserved exactly.
inline PhaseState step_discrete_gradient(const SystemDef& sys, const PhaseState& s,
                                         double h, const IntegratorConfig& cfg) {
    if (!sys.skew)
        throw ConfigError("step_discrete_gradient: system carries no skew structure");
    if (!sys.hamiltonian && !sys.pfaffian)
        throw ConfigError("step_discrete_gradient: system carries neither H nor dK");
    detail::check_domain(sys, s.x, "step_discrete_gradient");
    auto g = [&](const Vec& y) {
        const Vec mid = 0.5 * (s.x + y);
        const Mat b = sys.skew->eval(mid);
        Vec gbar = sys.hamiltonian
                       ? detail::discrete_gradient(*sys.hamiltonian, s.x, y)
                       : sys.pfaffian->components_at(mid);
        return y - s.x - h * matvec(b, gbar);
    };
    Vec y0 = s.x + h * sys.eval_field(s.x);
    PhaseState out;
    out.t = s.t + h;
    out.x = detail::newton_solve(g, std::move(y0), cfg.newton_tol, cfg.newton_max_iter);
    detail::check_domain(sys, out.x, "step_discrete_gradient");
    return out;
}

inline PhaseState step(const SystemDef& sys, const PhaseState& s, const IntegratorConfig& cfg) {
    switch (cfg.method) {
        case Method::rk4: return step_rk4(sys, s, cfg.h);
        case Method::implicit_midpoint: return step_implicit_midpoint(sys, s, cfg.h, cfg);
        default: return step_discrete_gradient(sys, s, cfg.h, cfg);
    }
}

struct IntegrateOptions {
    std::vector<ReservoirSpec> reservoirs;
    const ScalarField* potential = nullptr;  // H column / potential part of K
    bool record_div = true;
    double div_h_fd = 1e-5;
};

/// Fixed-step integration over [t0, t0 + T] with ceil(T/h) steps, trapezoidal
/// reservoir co-accumulation, and H / K / div diagnostic series. Step failures
/// leave the partial trajectory intact with an error annotation.
inline Trajectory integrate(const SystemDef& sys, const PhaseState& s0,
                            const IntegratorConfig& cfg, double T,
                            const IntegrateOptions& opt = {}) {
    if (T <= 0) throw Error("integrate: T must be positive");
    if (cfg.h <= 0) throw Error("integrate: h must be positive");
    if (s0.dim() != sys.dim) throw DimensionError("integrate: initial state dimension");
    s0.validate();

    const long long steps =
        static_cast<long long>(std::ceil(T / cfg.h - 1e-9));
    Trajectory traj;
    traj.t.reserve(steps + 1);
    traj.x.reserve(steps + 1);
    traj.reservoirs.assign(opt.reservoirs.size(), {});

    auto record = [&](const PhaseState& s, const PhaseState* prev) {
        traj.t.push_back(s.t);
        traj.x.push_back(s.x);
        double K = 0.0;
        for (std::size_t r = 0; r < opt.reservoirs.size(); ++r) {
            auto& series = traj.reservoirs[r];
            if (!prev) {
                series.push_back(opt.reservoirs[r].initial_value);
            } else {
                series.push_back(series.back() +
                                 reservoir_increment(opt.reservoirs[r], *prev, s));
            }
            K += series.back();
        }
        if (opt.potential) {
            const double Hval = (*opt.potential)(s.x);
            traj.series_H.push_back(Hval);
            traj.series_K.push_back(Hval + K);
        } else if (!opt.reservoirs.empty()) {
            traj.series_K.push_back(K);
        }
        if (opt.record_div) {
            try {
                traj.series_div.push_back(divergence(sys, s, opt.div_h_fd));
            } catch (const DomainError&) {
                traj.series_div.push_back(std::numeric_limits<double>::quiet_NaN());
            }
        }
    };

    PhaseState cur = s0;
    record(cur, nullptr);
    for (long long k = 1; k <= steps; ++k) {
        PhaseState prev = cur;
        try {
            cur = step(sys, prev, cfg);
        } catch (const Error& e) {
            traj.error = e.what();
            return traj;
        }
        cur.t = s0.t + static_cast<double>(k) * cfg.h;  // avoid additive drift
        record(cur, &prev);
    }
    return traj;
}

struct OrderEstimate {
    double order = 0.0;
    bool saturated = false;
    std::vector<double> drifts;
};

/// Least-squares slope of log(max invariant drift) vs log(h). Reports
/// saturation instead of an order when every drift sits at round-off.
inline OrderEstimate convergence_order(const SystemDef& sys, const PhaseState& s0,
                                       const EffectiveInvariant& inv,
                                       IntegratorConfig cfg,
                                       const std::vector<double>& h_list, double T) {
    if (h_list.size() < 3) throw Error("convergence_order: need >= 3 step sizes");
    for (std::size_t i = 1; i < h_list.size(); ++i)
        if (std::abs(h_list[i] - 0.5 * h_list[i - 1]) > 1e-9 * h_list[i - 1])
            throw Error("convergence_order: step sizes must halve");

    OrderEstimate est;
    double k_scale = 1.0;
    for (double h : h_list) {
        cfg.h = h;
        IntegrateOptions opt;
        opt.reservoirs = inv.reservoirs;
        if (inv.potential) opt.potential = &*inv.potential;
        opt.record_div = false;
        Trajectory traj = integrate(sys, s0, cfg, T, opt);
        if (traj.aborted()) throw Error("convergence_order: run aborted: " + traj.error);
        const KSeries ks = effective_K(inv, traj);
        est.drifts.push_back(ks.max_drift);
        k_scale = std::max(k_scale, std::abs(ks.initial));
    }

    const double floor = 1e2 * std::numeric_limits<double>::epsilon() * k_scale;
    bool all_saturated = true;
    for (double d : est.drifts)
        if (d > floor) all_saturated = false;
    if (all_saturated) {
        est.saturated = true;
        return est;
    }

    // least-squares fit of log(drift) against log(h)
    const int n = static_cast<int>(h_list.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double lx = std::log(h_list[i]);
        const double ly = std::log(std::max(est.drifts[i], 1e-300));
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    est.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return est;
}

}  // namespace pfaff

#endif
