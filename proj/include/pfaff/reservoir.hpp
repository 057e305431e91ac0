#ifndef PFAFF_RESERVOIR_HPP
#define PFAFF_RESERVOIR_HPP

// Reservoir variables w = int g dx_j accumulated along trajectories
// (trapezoidal Riemann-Stieltjes), and the effectively conserved K = H + sum w.

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "pfaff/core.hpp"

namespace pfaff {

/// One reservoir w = integral of `integrand` against coordinate `against_index`.
struct ReservoirSpec {
    std::function<double(const Vec&)> integrand;
    int against_index = 0;
    double initial_value = 0.0;
};

/// Trapezoidal Stieltjes increment (1/2)(g(a)+g(b)) (x_j(b) - x_j(a)) between
/// consecutive trajectory samples.
inline double reservoir_increment(const ReservoirSpec& spec, const PhaseState& a,
                                  const PhaseState& b) {
    if (a.dim() != b.dim())
        throw DimensionError("reservoir_increment: state dimension mismatch");
    if (spec.against_index < 0 || spec.against_index >= a.dim())
        throw DimensionError("reservoir_increment: against_index out of range");
    const int j = spec.against_index;
    return 0.5 * (spec.integrand(a.x) + spec.integrand(b.x)) * (b.x[j] - a.x[j]);
}

/// Cumulative reservoir series over an existing trajectory, one series per spec.
inline std::vector<std::vector<double>> accumulate(const std::vector<ReservoirSpec>& specs,
                                                   const Trajectory& traj) {
    if (traj.size() < 2) throw Error("accumulate: trajectory needs >= 2 samples");
    std::vector<std::vector<double>> out(specs.size());
    for (std::size_t r = 0; r < specs.size(); ++r) {
        auto& series = out[r];
        series.resize(traj.size());
        series[0] = specs[r].initial_value;
        for (std::size_t k = 1; k < traj.size(); ++k) {
            PhaseState a{traj.t[k - 1], traj.x[k - 1]};
            PhaseState b{traj.t[k], traj.x[k]};
            series[k] = series[k - 1] + reservoir_increment(specs[r], a, b);
        }
    }
    return out;
}

/// Decomposition dK = d(potential) + sum_i g_i dx_{j(i)}. The potential part
/// is the exact piece (H, or the polynomial part of K); the reservoirs carry
/// the non-exact remainder.
struct EffectiveInvariant {
    int dim = 0;
    std::optional<ScalarField> potential;
    std::vector<ReservoirSpec> reservoirs;

    /// Components of dK at a state: grad(potential) plus each reservoir
    /// integrand added to its coordinate slot.
    Vec pfaffian_components(const Vec& x) const {
        Vec k(dim, 0.0);
        if (potential) k = potential->gradient(x);
        for (const auto& r : reservoirs) k[r.against_index] += r.integrand(x);
        return k;
    }

    PfaffianForm to_pfaffian() const {
        PfaffianForm form;
        form.dim = dim;
        form.exact = reservoirs.empty() && potential.has_value();
        if (form.exact) form.potential = potential;
        for (int i = 0; i < dim; ++i) {
            const EffectiveInvariant self = *this;
            form.components.push_back(
                [self, i](const Vec& x) { return self.pfaffian_components(x)[i]; });
        }
        return form;
    }
};

/// Contraction <form, v> at a state.
inline double pfaffian_contract(const PfaffianForm& form, const PhaseState& s, const Vec& v) {
    if (static_cast<int>(v.size()) != form.dim || s.dim() != form.dim)
        throw DimensionError("pfaffian_contract: dimension mismatch");
    double sum = 0.0;
    for (int i = 0; i < form.dim; ++i) sum += form.components[i](s.x) * v[i];
    return sum;
}

struct KSeries {
    std::vector<double> series;
    double initial = 0.0;
    double max_drift = 0.0;
};

/// K(t_k) = potential(x_k) + sum_i w_i(t_k) over a trajectory whose reservoir
/// series were accumulated on the same samples.
inline KSeries effective_K(const EffectiveInvariant& inv, const Trajectory& traj) {
    KSeries out;
    if (traj.size() == 0) return out;
    std::vector<std::vector<double>> res;
    const std::vector<std::vector<double>>* w = &traj.reservoirs;
    if (traj.reservoirs.size() != inv.reservoirs.size()) {
        res = accumulate(inv.reservoirs, traj);
        w = &res;
    }
    out.series.resize(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        double v = inv.potential ? (*inv.potential)(traj.x[k]) : 0.0;
        for (const auto& series : *w) v += series[k];
        out.series[k] = v;
    }
    out.initial = out.series[0];
    for (double v : out.series)
        out.max_drift = std::max(out.max_drift, std::abs(v - out.initial));
    return out;
}

/// Generalized field X_K = J (components of dK) on canonical coordinates; for
/// a correct decomposition this reproduces the system field.
inline Vec k_field(const EffectiveInvariant& inv, const PhaseState& s) {
    const int d = inv.dim;
    if (d % 2 != 0) throw DimensionError("k_field: odd dimension");
    if (s.dim() != d) throw DimensionError("k_field: state dimension mismatch");
    const Vec k = inv.pfaffian_components(s.x);
    const int n = d / 2;
    Vec v(d);
    for (int i = 0; i < n; ++i) {
        v[i] = k[n + i];
        v[n + i] = -k[i];
    }
    return v;
}

}  // namespace pfaff

#endif
