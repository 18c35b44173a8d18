#pragma once

/**
 * @file herglotz.hpp
 * @brief Matrix Nevanlinna (Herglotz) function families.
 *
 * A Nevanlinna family is a d×d matrix function F holomorphic off the real
 * axis with Im F(λ) ⪰ 0 for Im λ > 0 and the reflection symmetry
 * F(conj λ) = F(λ)*. The objects built here — Weyl functions of
 * Sturm–Liouville problems, lead functions of half-line channels, and their
 * block compositions — all carry this structure, and every scattering
 * formula downstream consumes them through this interface.
 *
 * Boundary values F(μ + i0) on the real axis are obtained either directly
 * (every built-in family is branch-consistent: evaluating at real μ already
 * lands on the limit from above) or by a Richardson ladder in the offset
 * ε — the latter exists as an independent cross-check and for user-supplied
 * evaluators without a real-boundary rule.
 *
 * Branch convention, fixed globally: sqrt_branch takes arg z ∈ [0, 2π), i.e.
 * a cut along [0, ∞) with Im √z > 0 off the cut and √z ≥ 0 on it. This
 * reproduces the physical sheet of every closed form below and makes
 * F(μ − i0) = F(μ + i0)* automatic.
 */

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "matkit.hpp"

namespace weylscatter {

/**
 * @brief Square root on the branch with cut along [0, ∞).
 *
 * Returns exp(½(ln|z| + i·arg z)) with arg z ∈ [0, 2π): non-negative on the
 * cut, Im > 0 everywhere off it. sqrt_branch(0) = 0.
 */
inline cplx sqrt_branch(cplx z) {
    const double r = std::abs(z);
    if (r == 0.0) return cplx(0.0, 0.0);
    double arg = std::arg(z);  // (−π, π]
    if (arg < 0.0) arg += 2.0 * std::acos(-1.0);
    return std::polar(std::sqrt(r), 0.5 * arg);
}

/// How an energy approaches (or sits off) the real axis.
enum class HalfPlane {
    upper,                     ///< Im λ > 0
    lower,                     ///< Im λ < 0
    real_boundary_from_above,  ///< real μ, limit μ + i0
    real_boundary_from_below,  ///< real μ, limit μ − i0
};

/// Energy with an explicit half-plane tag. The tag must match the sign of the
/// imaginary part; real-boundary tags require an exactly real value.
struct EnergyPoint {
    cplx value;
    HalfPlane half_plane;

    EnergyPoint(cplx v, HalfPlane hp) : value(v), half_plane(hp) {
        const double im = v.imag();
        const bool ok = (hp == HalfPlane::upper && im > 0.0) || (hp == HalfPlane::lower && im < 0.0) ||
                        ((hp == HalfPlane::real_boundary_from_above || hp == HalfPlane::real_boundary_from_below) &&
                         im == 0.0);
        if (!ok)
            throw Error(errc::wrong_half_plane, "EnergyPoint tag inconsistent with Im(value)");
    }

    static EnergyPoint upper(cplx v) { return EnergyPoint(v, HalfPlane::upper); }
    static EnergyPoint lower(cplx v) { return EnergyPoint(v, HalfPlane::lower); }
    static EnergyPoint above(double mu) { return EnergyPoint(cplx(mu, 0.0), HalfPlane::real_boundary_from_above); }
    static EnergyPoint below(double mu) { return EnergyPoint(cplx(mu, 0.0), HalfPlane::real_boundary_from_below); }

    /// Tag from the sign of Im(value); real values default to the limit from above.
    static EnergyPoint at(cplx v) {
        if (v.imag() > 0.0) return upper(v);
        if (v.imag() < 0.0) return lower(v);
        return above(v.real());
    }
};

/**
 * @brief A d×d Nevanlinna function given by an evaluator rule.
 *
 * The evaluator must be defined for all non-real λ and for real μ with
 * real_domain(μ) true (the full-measure validity set: pole-free and
 * branch-consistent; at such μ it returns the limit from above). Families are
 * immutable after construction and evaluation is pure, so one family may be
 * evaluated from many threads concurrently.
 */
struct HerglotzFamily {
    int dim = 0;
    std::function<CMatrix(cplx)> evaluator;
    std::function<bool(double)> real_domain;
    std::string label;
};

namespace detail {

inline CMatrix eval_raw(const HerglotzFamily& fam, cplx lambda) {
    CMatrix F = fam.evaluator(lambda);
    if (F.rows() != fam.dim || F.cols() != fam.dim)
        throw Error(errc::evaluation_failed,
                    "family '" + fam.label + "' returned a matrix of wrong dimension");
    if (!F.is_finite())
        throw Error(errc::evaluation_failed, "family '" + fam.label + "' returned non-finite entries");
    return F;
}

}  // namespace detail

/// Evaluate in the open upper half-plane (throws wrong_half_plane otherwise).
inline CMatrix eval_upper(const HerglotzFamily& fam, cplx lambda) {
    if (!(lambda.imag() > 0.0))
        throw Error(errc::wrong_half_plane, "eval_upper requires Im lambda > 0");
    return detail::eval_raw(fam, lambda);
}

/// Evaluate at a tagged energy: direct in either open half-plane; on the real
/// axis the from-above rule is the evaluator itself and the from-below value
/// is its adjoint (F(μ−i0) = F(μ+i0)*).
inline CMatrix eval_point(const HerglotzFamily& fam, const EnergyPoint& pt) {
    switch (pt.half_plane) {
        case HalfPlane::upper:
        case HalfPlane::lower:
            return detail::eval_raw(fam, pt.value);
        case HalfPlane::real_boundary_from_above:
        case HalfPlane::real_boundary_from_below: {
            const double mu = pt.value.real();
            if (!fam.real_domain(mu))
                throw Error(errc::outside_domain,
                            "family '" + fam.label + "' has no direct boundary rule at mu=" + std::to_string(mu));
            CMatrix F = detail::eval_raw(fam, cplx(mu, 0.0));
            return pt.half_plane == HalfPlane::real_boundary_from_below ? F.adjoint() : F;
        }
    }
    throw Error(errc::evaluation_failed, "unreachable half-plane tag");
}

/// Strategy and parameters for extracting the boundary value F(μ + i0).
struct BoundaryMode {
    enum class Strategy { direct, epsilon_ladder };
    Strategy strategy = Strategy::direct;
    double eps0 = 1e-3;             ///< coarsest imaginary offset
    int levels = 8;                 ///< ladder depth (ε_j = eps0·2^{−j})
    double extrapolation_tol = 1e-8;///< successive-extrapolant agreement

    static BoundaryMode direct() { return BoundaryMode{}; }
    static BoundaryMode ladder(double eps0_ = 1e-3, int levels_ = 8, double tol = 1e-8) {
        BoundaryMode m;
        m.strategy = Strategy::epsilon_ladder;
        m.eps0 = eps0_;
        m.levels = levels_;
        m.extrapolation_tol = tol;
        return m;
    }
};

/**
 * @brief Boundary value F(μ + i0) at real μ.
 *
 * direct: evaluates the family's real-boundary rule (requires μ in
 * real_domain; OutsideDomain otherwise). epsilon_ladder: Richardson
 * extrapolation of F(μ + iε_j), ε_j = eps0·2^{−j}; converged when successive
 * diagonal extrapolants agree within extrapolation_tol (max-entry norm),
 * NoBoundaryLimit otherwise. The ladder assumes an asymptotic expansion in ε
 * and fails honestly at band edges, where the limit approaches like √ε.
 */
inline CMatrix boundary_value(const HerglotzFamily& fam, double mu, const BoundaryMode& mode = BoundaryMode{}) {
    if (mode.eps0 <= 0.0 || mode.levels < 2)
        throw Error(errc::validation_error, "boundary_value: need eps0 > 0 and levels >= 2");

    if (mode.strategy == BoundaryMode::Strategy::direct)
        return eval_point(fam, EnergyPoint::above(mu));

    // Richardson tableau T[j][k]: T[j][0] = F(mu + i·eps_j); each column k
    // cancels the ε^k term because eps_{j-1} = 2·eps_j.
    std::vector<std::vector<CMatrix>> T(static_cast<std::size_t>(mode.levels));
    double eps = mode.eps0;
    for (int j = 0; j < mode.levels; ++j, eps *= 0.5) {
        auto& row = T[static_cast<std::size_t>(j)];
        row.resize(static_cast<std::size_t>(j) + 1);
        row[0] = detail::eval_raw(fam, cplx(mu, eps));
        double pow2 = 1.0;
        for (int k = 1; k <= j; ++k) {
            pow2 *= 2.0;
            row[static_cast<std::size_t>(k)] =
                (cplx(pow2 / (pow2 - 1.0)) * row[static_cast<std::size_t>(k - 1)]) -
                (cplx(1.0 / (pow2 - 1.0)) * T[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(k - 1)]);
        }
        if (j > 0) {
            const CMatrix diff = row[static_cast<std::size_t>(j)] -
                                 T[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(j - 1)];
            if (diff.max_abs() < mode.extrapolation_tol) return row[static_cast<std::size_t>(j)];
        }
    }
    throw Error(errc::no_boundary_limit,
                "boundary_value: ladder for '" + fam.label + "' did not converge at mu=" + std::to_string(mu));
}

/// Nevanlinna-property audit over a list of off-axis sample points.
struct NevanlinnaReport {
    double max_negative_eig = 0.0;   ///< max over samples of −min eig(sign(Im λ)·Im F(λ)), clamped ≥ 0
    double max_symmetry_defect = 0.0;///< max over samples of ‖F(conj λ) − F(λ)*‖ (spectral)
};

/**
 * @brief Verify Im F ⪰ 0 on C₊ (mirrored on C₋) and the reflection symmetry
 *        F(conj λ) = F(λ)* at the given samples (all must be off-axis).
 *
 * The evaluator is called on both half-planes directly — the symmetry check
 * is a genuine property of the evaluation rule, not an identity of a
 * reflection shim.
 */
inline NevanlinnaReport check_nevanlinna(const HerglotzFamily& fam, const std::vector<EnergyPoint>& samples) {
    NevanlinnaReport rep;
    for (const EnergyPoint& pt : samples) {
        const double im = pt.value.imag();
        if (im == 0.0)
            throw Error(errc::wrong_half_plane, "check_nevanlinna samples must have Im lambda != 0");
        const CMatrix F = detail::eval_raw(fam, pt.value);
        const double sign = im > 0.0 ? 1.0 : -1.0;
        const auto dec = hermitian_eigen(cplx(sign) * imag_part(F));
        if (!dec.eigenvalues.empty())
            rep.max_negative_eig = std::max(rep.max_negative_eig, -dec.eigenvalues.front());
        const CMatrix G = detail::eval_raw(fam, std::conj(pt.value));
        rep.max_symmetry_defect = std::max(rep.max_symmetry_defect, spectral_norm(G - F.adjoint()));
    }
    rep.max_negative_eig = std::max(0.0, rep.max_negative_eig);
    return rep;
}

/**
 * @brief Scalar Weyl function of the half-line Laplacian with a delta
 *        interaction at the origin: M(λ) = i/(2√λ).
 *
 * Real domain is ℝ∖{0} (branch point at 0).
 */
inline HerglotzFamily delta_weyl_family() {
    HerglotzFamily fam;
    fam.dim = 1;
    fam.label = "delta";
    fam.evaluator = [](cplx lambda) {
        const cplx root = sqrt_branch(lambda);
        if (std::abs(root) == 0.0)
            throw Error(errc::near_pole, "delta family: branch point at lambda = 0");
        return CMatrix(1, 1, {cplx(0.0, 1.0) / (2.0 * root)});
    };
    fam.real_domain = [](double mu) { return mu != 0.0; };
    return fam;
}

/**
 * @brief 2×2 lead function of two half-line channels with thresholds v_l, v_r
 *        and masses m_l, m_r:
 *        τ(λ) = diag(i·√((λ−v_l)/(2m_l)), i·√((λ−v_r)/(2m_r))).
 *
 * Below a threshold the corresponding entry is real (closed channel); the
 * rank of Im τ counts the open channels. Real domain is all of ℝ.
 */
inline HerglotzFamily lead_tau_family(double v_l, double v_r, double m_l, double m_r) {
    if (!(m_l > 0.0) || !(m_r > 0.0))
        throw Error(errc::validation_error, "lead_tau_family: masses must be positive");
    HerglotzFamily fam;
    fam.dim = 2;
    fam.label = "lead_tau";
    fam.evaluator = [v_l, v_r, m_l, m_r](cplx lambda) {
        const cplx i(0.0, 1.0);
        return CMatrix::diag({i * sqrt_branch((lambda - v_l) / (2.0 * m_l)),
                              i * sqrt_branch((lambda - v_r) / (2.0 * m_r))});
    };
    fam.real_domain = [](double) { return true; };
    return fam;
}

/**
 * @brief 2×2 Weyl function of the constant-coefficient problem
 *        −(1/2m0) f″ + v0 f = λ f on (0, L), closed form.
 *
 * With k = √(2m0(λ−v0)) and fundamental solutions normalized by φ(0)=1,
 * w_φ(0)=0, ψ(0)=0, w_ψ(0)=1 (w = f′/m0):
 *   φ(L) = cos(kL), ψ(L) = m0·L·sinc(kL), w_ψ(L) = cos(kL),
 *   M = (1/(2ψ(L)))·[[−φ(L), 1], [1, −w_ψ(L)]].
 *
 * Poles of M are the Dirichlet eigenvalues (ψ(L) = 0): NearPole when
 * |ψ(L)| < 1e-12·scale. This closed form is the independent oracle for the
 * shooting backend.
 */
inline HerglotzFamily const_interval_weyl_family(double L, double v0, double m0) {
    if (!(L > 0.0) || !(m0 > 0.0))
        throw Error(errc::validation_error, "const_interval_weyl_family: need L > 0 and m0 > 0");
    HerglotzFamily fam;
    fam.dim = 2;
    fam.label = "const_interval";
    fam.evaluator = [L, v0, m0](cplx lambda) {
        const cplx k = sqrt_branch(2.0 * m0 * (lambda - v0));
        const cplx z = k * L;
        // sinc(z) = sin(z)/z, series below |z| = 1e-4 to cross k = 0 smoothly.
        const cplx sinc = std::abs(z) < 1e-4 ? 1.0 - z * z / 6.0 + z * z * z * z / 120.0 : std::sin(z) / z;
        const cplx phi = std::cos(z);
        const cplx psi = m0 * L * sinc;
        const cplx w_psi = std::cos(z);
        const double scale = std::max({1.0, std::abs(phi), std::abs(w_psi)});
        if (std::abs(psi) < 1e-12 * scale)
            throw Error(errc::near_pole, "const_interval family: Dirichlet eigenvalue (psi(L) ~ 0)");
        const cplx g = 1.0 / (2.0 * psi);
        return CMatrix::from_rows({{-g * phi, g}, {g, -g * w_psi}});
    };
    fam.real_domain = [L, v0, m0](double mu) {
        const cplx k = sqrt_branch(cplx(2.0 * m0 * (mu - v0), 0.0));
        const cplx z = k * L;
        const cplx sinc = std::abs(z) < 1e-4 ? 1.0 - z * z / 6.0 + z * z * z * z / 120.0 : std::sin(z) / z;
        const cplx phi = std::cos(z);
        const double scale = std::max({1.0, std::abs(phi)});
        return std::abs(m0 * L * sinc) >= 1e-12 * scale;
    };
    return fam;
}

/// Block-diagonal composition: dim = Σ dims, evaluator stacks the members,
/// real domain is the intersection.
inline HerglotzFamily block_diag_family(std::vector<HerglotzFamily> members) {
    HerglotzFamily fam;
    fam.dim = 0;
    for (const auto& f : members) {
        fam.dim += f.dim;
        fam.label += fam.label.empty() ? f.label : "+" + f.label;
    }
    auto shared = std::make_shared<std::vector<HerglotzFamily>>(std::move(members));
    fam.evaluator = [shared](cplx lambda) {
        std::vector<CMatrix> blocks;
        blocks.reserve(shared->size());
        for (const auto& f : *shared) blocks.push_back(detail::eval_raw(f, lambda));
        return block_diag(blocks);
    };
    fam.real_domain = [shared](double mu) {
        for (const auto& f : *shared)
            if (!f.real_domain(mu)) return false;
        return true;
    };
    return fam;
}

}  // namespace weylscatter
