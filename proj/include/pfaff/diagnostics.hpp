#ifndef PFAFF_DIAGNOSTICS_HPP
#define PFAFF_DIAGNOSTICS_HPP

// Hydrodynamic-picture diagnostics (phase-fluid density factor, Bernoulli
// pressure with its positivity condition) and the vector-field commutator
// anomaly [X_f, X_K] = -X_{f,K} + div(X_K) X_f.

#include <cmath>
#include <vector>

#include "pfaff/core.hpp"
#include "pfaff/reservoir.hpp"

namespace pfaff {

/// rho(t)/rho_0 = exp(-int_0^t div v dt') by trapezoidal quadrature over the
/// trajectory's divergence series (computed here if the run did not record it).
inline std::vector<double> density_factor(const SystemDef& sys, const Trajectory& traj) {
    if (traj.size() < 2) throw Error("density_factor: trajectory needs >= 2 samples");
    std::vector<double> div = traj.series_div;
    if (div.size() != traj.size()) {
        div.resize(traj.size());
        for (std::size_t k = 0; k < traj.size(); ++k)
            div[k] = divergence(sys, PhaseState{traj.t[k], traj.x[k]}, 1e-5);
    }
    std::vector<double> rho(traj.size());
    rho[0] = 1.0;
    double integral = 0.0;
    for (std::size_t k = 1; k < traj.size(); ++k) {
        integral += 0.5 * (div[k - 1] + div[k]) * (traj.t[k] - traj.t[k - 1]);
        rho[k] = std::exp(-integral);
    }
    return rho;
}

struct HydroReport {
    std::vector<double> density;             // rho(t)/rho_0 = e^{bt} for the damped oscillator
    std::vector<double> pressure;            // P(t) = P0 - cK e^{bt}(b x p + b^2 p^2 / 2)
    std::vector<double> bernoulli_residual;  // (1/2) rho v^2 + P, up to its mean
    double residual_band = 0.0;              // max - min of the residual series
    double min_pressure = 0.0;
    bool positive = false;                   // min P(t) >= 0 along the trajectory
    double condition_value = 0.0;            // LHS of the closed-form sufficient condition
    bool sufficient_condition = false;       // condition_value >= 0
};

/// Hydrodynamics of the linearly damped oscillator xdot = p, pdot = -x - b p.
/// Throws ConfigError when the trajectory does not satisfy those equations.
inline HydroReport bernoulli_check(double b, double cK, double P0, const Trajectory& traj) {
    if (traj.size() < 3 || traj.x[0].size() != 2)
        throw ConfigError("bernoulli_check: expects a 2-dimensional trajectory");
    // shape check against the damped-oscillator equations at a few interior samples
    const std::size_t stride = std::max<std::size_t>(1, traj.size() / 8);
    for (std::size_t k = 1; k + 1 < traj.size(); k += stride) {
        const double dt = traj.t[k + 1] - traj.t[k - 1];
        const double dx = (traj.x[k + 1][0] - traj.x[k - 1][0]) / dt;
        const double dp = (traj.x[k + 1][1] - traj.x[k - 1][1]) / dt;
        const double x = traj.x[k][0], p = traj.x[k][1];
        const double tol = 1e-2 * (1.0 + std::abs(p)) + 10.0 * dt * dt;
        if (std::abs(dx - p) > tol || std::abs(dp - (-x - b * p)) > tol)
            throw ConfigError("bernoulli_check: trajectory is not a damped oscillator with this b");
    }

    HydroReport rep;
    rep.density.resize(traj.size());
    rep.pressure.resize(traj.size());
    rep.bernoulli_residual.resize(traj.size());
    const double t0 = traj.t[0];
    double rmin = 0, rmax = 0, pmin = 0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double t = traj.t[k] - t0;
        const double x = traj.x[k][0], p = traj.x[k][1];
        const double rho = cK * std::exp(b * t);
        rep.density[k] = std::exp(b * t);
        rep.pressure[k] = P0 - rho * (b * x * p + 0.5 * b * b * p * p);
        // v = (p, -x - b p)
        const double v2 = p * p + (x + b * p) * (x + b * p);
        rep.bernoulli_residual[k] = 0.5 * rho * v2 + rep.pressure[k];
        if (k == 0) {
            rmin = rmax = rep.bernoulli_residual[k];
            pmin = rep.pressure[k];
        } else {
            rmin = std::min(rmin, rep.bernoulli_residual[k]);
            rmax = std::max(rmax, rep.bernoulli_residual[k]);
            pmin = std::min(pmin, rep.pressure[k]);
        }
    }
    rep.residual_band = rmax - rmin;
    rep.min_pressure = pmin;
    rep.positive = pmin >= 0.0;

    // closed-form sufficient condition from x ~ A0 e^{-bt/2} cos(omega t + delta)
    const double omega = std::sqrt(std::max(1.0 - 0.25 * b * b, 0.0));
    const double x0 = traj.x[0][0], p0 = traj.x[0][1];
    const double s_amp = omega > 0 ? -(0.5 * b * x0 + p0) / omega : 0.0;
    const double A0 = std::sqrt(x0 * x0 + s_amp * s_amp);
    const double delta = std::atan2(s_amp, x0);
    const double cd = std::cos(delta), sd = std::sin(delta);
    rep.condition_value =
        P0 - cK * A0 * A0 *
                 ((b + 0.5 * b * b) * cd * cd - (omega * b + b * b) * sd * cd +
                  0.5 * b * b * omega * omega * sd * sd);
    rep.sufficient_condition = rep.condition_value >= 0.0;
    return rep;
}

namespace detail {

template <class F>
Vec fd_jacobian_apply(const F& field, const Vec& x, const Vec& dir, double h_fd) {
    // (D field)(x) . dir via 2nd-order central differences along coordinates
    const int d = static_cast<int>(x.size());
    Vec out(d, 0.0);
    for (int j = 0; j < d; ++j) {
        if (dir[j] == 0.0) continue;
        Vec xp = x, xm = x;
        xp[j] += h_fd;
        xm[j] -= h_fd;
        const Vec fp = field(xp), fm = field(xm);
        for (int i = 0; i < d; ++i) out[i] += dir[j] * (fp[i] - fm[i]) / (2 * h_fd);
    }
    return out;
}

}  // namespace detail

/// Residual of [X_f, X_K] + X_{f,K} - div(X_K) X_f at one state, all
/// derivatives by 2nd-order central differences with step h_fd (so the
/// residual decays as h_fd^2). X_K is the generalized field J dK; the bracket
/// {f,K} reads the Pfaffian components of dK in place of a gradient.
inline Vec commutator_anomaly(const ScalarField& f, const EffectiveInvariant& K,
                              const PhaseState& s, double h_fd) {
    const int d = K.dim;
    if (d % 2 != 0 || s.dim() != d)
        throw DimensionError("commutator_anomaly: canonical dimensions required");
    const int n = d / 2;

    auto Xf = [&](const Vec& x) {
        const Vec g = f.gradient(x);
        Vec v(d);
        for (int i = 0; i < n; ++i) { v[i] = g[n + i]; v[n + i] = -g[i]; }
        return v;
    };
    auto XK = [&](const Vec& x) {
        const Vec k = K.pfaffian_components(x);
        Vec v(d);
        for (int i = 0; i < n; ++i) { v[i] = k[n + i]; v[n + i] = -k[i]; }
        return v;
    };
    auto bracket_fK = [&](const Vec& x) {
        // {f, K} = sum_i (f_x^i K_p_i - f_p_i K_x^i) = grad f . X_K
        return dot(f.gradient(x), XK(x));
    };

    const Vec xf = Xf(s.x);
    const Vec xk = XK(s.x);
    const Vec lie = detail::fd_jacobian_apply(XK, s.x, xf, h_fd) -
                    detail::fd_jacobian_apply(Xf, s.x, xk, h_fd);

    // X_{f,K} = J grad {f,K}, gradient by the same central differences
    Vec grad_b(d);
    for (int j = 0; j < d; ++j) {
        Vec xp = s.x, xm = s.x;
        xp[j] += h_fd;
        xm[j] -= h_fd;
        grad_b[j] = (bracket_fK(xp) - bracket_fK(xm)) / (2 * h_fd);
    }
    Vec x_bracket(d);
    for (int i = 0; i < n; ++i) {
        x_bracket[i] = grad_b[n + i];
        x_bracket[n + i] = -grad_b[i];
    }

    double div_xk = 0.0;
    for (int j = 0; j < d; ++j) {
        Vec xp = s.x, xm = s.x;
        xp[j] += h_fd;
        xm[j] -= h_fd;
        div_xk += (XK(xp)[j] - XK(xm)[j]) / (2 * h_fd);
    }

    return lie - ((-1.0) * x_bracket + div_xk * xf);
}

}  // namespace pfaff

#endif
