#ifndef PFAFF_SKEW_HPP
#define PFAFF_SKEW_HPP

// Skew-gradient representations f = B grad H: the Quispel-Capel particular
// solution, skew-symmetry / Jacobi-identity / Casimir checks, and reduction
// of a degenerate Poisson system to a symplectic leaf.

#include <cmath>
#include <random>
#include <vector>

#include "pfaff/core.hpp"

namespace pfaff {

/// Particular solution B = (f wedge grad H) / |grad H|^2, which satisfies
/// B grad H = f whenever H is a first integral of f.
inline Mat quispel_capel(const SystemDef& sys, const PhaseState& s,
                         double tol_grad = 1e-10) {
    if (!sys.hamiltonian)
        throw ConfigError("quispel_capel: system carries no Hamiltonian");
    const Vec g = sys.hamiltonian->gradient(s.x);
    const double gn2 = dot(g, g);
    if (std::sqrt(gn2) <= tol_grad)
        throw DegenerateGradientError("quispel_capel: |grad H| below tolerance");
    const Vec f = sys.eval_field(s.x);
    const int d = sys.dim;
    Mat b(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < i; ++j) {
            const double v = (f[i] * g[j] - f[j] * g[i]) / gn2;
            b(i, j) = v;
            b(j, i) = -v;  // exact skew-symmetry by construction
        }
    return b;
}

struct SkewReport {
    double max_quadform = 0.0;   // max |v . B v| over random unit vectors
    double max_symmetry = 0.0;   // max entry of |B + B^T|
};

/// Report-only skew-symmetry check over a list of states, probing each matrix
/// with 10 random unit vectors plus the entrywise symmetry defect.
inline SkewReport check_skew(const SkewField& B, const std::vector<PhaseState>& samples,
                             unsigned seed = 12345) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SkewReport rep;
    for (const auto& s : samples) {
        const Mat b = B.eval(s.x);
        for (int i = 0; i < b.rows; ++i)
            for (int j = 0; j < b.cols; ++j)
                rep.max_symmetry = std::max(rep.max_symmetry, std::abs(b(i, j) + b(j, i)));
        for (int k = 0; k < 10; ++k) {
            Vec v(B.dim);
            for (auto& vi : v) vi = gauss(rng);
            const double n = norm(v);
            if (n == 0.0) continue;
            v = (1.0 / n) * v;
            rep.max_quadform = std::max(rep.max_quadform, std::abs(dot(v, matvec(b, v))));
        }
    }
    return rep;
}

struct JacobiResidual {
    double raw = 0.0;    // max over triples of the cyclic sum
    double scale = 1.0;  // max|B| * max|dB| at the probe state
    double normalized() const { return raw / std::max(scale, 1e-300); }
};

/// Cyclic Jacobi residual max_{i<j<k} |sum_l (B_li d_l B_jk + B_lj d_l B_ki +
/// B_lk d_l B_ij)| with central finite-difference derivatives of B.
inline JacobiResidual check_jacobi(const SkewField& B, const PhaseState& s, double h_fd) {
    if (h_fd <= 0) throw Error("check_jacobi: h_fd must be positive");
    const int d = B.dim;
    const Mat b0 = B.eval(s.x);

    // dB[l](i,j) = d B_ij / d x_l
    std::vector<Mat> dB(d);
    double max_db = 0.0;
    for (int l = 0; l < d; ++l) {
        Vec xp = s.x, xm = s.x;
        xp[l] += h_fd;
        xm[l] -= h_fd;
        const Mat bp = B.eval(xp), bm = B.eval(xm);
        dB[l] = Mat(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                dB[l](i, j) = (bp(i, j) - bm(i, j)) / (2 * h_fd);
                max_db = std::max(max_db, std::abs(dB[l](i, j)));
            }
    }

    JacobiResidual res;
    res.scale = std::max(max_abs(b0) * max_db, 1e-300);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            for (int k = j + 1; k < d; ++k) {
                double sum = 0.0;
                for (int l = 0; l < d; ++l)
                    sum += b0(l, i) * dB[l](j, k) + b0(l, j) * dB[l](k, i) +
                           b0(l, k) * dB[l](i, j);
                res.raw = std::max(res.raw, std::abs(sum));
            }
    return res;
}

struct CasimirReport {
    double max_residual = 0.0;  // max |B grad C| over samples
    bool confirmed(double tol = 1e-10) const { return max_residual <= tol; }
};

/// C is a Casimir of B when B grad C vanishes identically.
inline CasimirReport verify_casimir(const SkewField& B, const ScalarField& C,
                                    const std::vector<PhaseState>& samples) {
    CasimirReport rep;
    for (const auto& s : samples)
        rep.max_residual =
            std::max(rep.max_residual, norm(matvec(B.eval(s.x), C.gradient(s.x))));
    return rep;
}

/// Casimir level-set data for elimination of one coordinate. The Casimir must
/// be affine in the eliminated coordinate so the substitution is closed-form.
struct CasimirSpec {
    ScalarField casimir;
    double fixed_value = 0.0;
    int eliminated_index = 0;
};

/// Lift a reduced state back to the Casimir level set.
inline Vec casimir_lift(const CasimirSpec& spec, const Vec& reduced, int full_dim) {
    const int e = spec.eliminated_index;
    Vec full(full_dim, 0.0);
    for (int i = 0, j = 0; i < full_dim; ++i)
        if (i != e) full[i] = reduced[j++];
    // affine: C = alpha * x_e + R(rest)  ->  x_e = (c0 - R) / alpha
    Vec probe = full;
    probe[e] = 0.0;
    const double rest = spec.casimir(probe);
    probe[e] = 1.0;
    const double alpha = spec.casimir(probe) - rest;
    if (std::abs(alpha) < 1e-12)
        throw UnsupportedReductionError("casimir_lift: Casimir independent of eliminated coordinate");
    full[e] = (spec.fixed_value - rest) / alpha;
    return full;
}

/// Restrict a d-dimensional system to the symplectic leaf C = c0, eliminating
/// one coordinate. Verifies affinity of C in that coordinate at probe states.
inline SystemDef casimir_reduce(const SystemDef& sys, const CasimirSpec& spec) {
    const int d = sys.dim;
    const int e = spec.eliminated_index;
    if (d < 3) throw DimensionError("casimir_reduce: need dimension >= 3");
    if (e < 0 || e >= d) throw DimensionError("casimir_reduce: bad eliminated index");

    // affinity probe: second difference in x_e must vanish, slope must match
    // across a handful of states
    {
        std::mt19937 rng(7u);
        std::uniform_real_distribution<double> u(0.25, 1.75);
        for (int trial = 0; trial < 8; ++trial) {
            Vec x(d);
            for (auto& xi : x) xi = u(rng);
            auto at = [&](double xe) {
                Vec y = x;
                y[e] = xe;
                return spec.casimir(y);
            };
            const double c0 = at(0.0), c1 = at(1.0), c2 = at(2.0);
            if (std::abs(c2 - 2 * c1 + c0) > 1e-9 * (1 + std::abs(c1)))
                throw UnsupportedReductionError(
                    "casimir_reduce: Casimir not affine in eliminated coordinate");
            if (std::abs(c1 - c0) < 1e-12)
                throw UnsupportedReductionError(
                    "casimir_reduce: Casimir independent of eliminated coordinate");
        }
    }

    SystemDef red;
    red.dim = d - 1;
    CasimirSpec sp = spec;  // owned copy for the closures
    const SystemDef full = sys;
    red.field = [full, sp, d](const Vec& y) {
        const Vec xf = casimir_lift(sp, y, d);
        const Vec f = full.field(xf);
        Vec g(d - 1);
        for (int i = 0, j = 0; i < d; ++i)
            if (i != sp.eliminated_index) g[j++] = f[i];
        return g;
    };
    if (sys.domain_guard) {
        red.domain_guard = [full, sp, d](const Vec& y) {
            return full.domain_guard(casimir_lift(sp, y, d));
        };
    }
    return red;
}

}  // namespace pfaff

#endif
