#pragma once

/**
 * @file sturm.hpp
 * @brief Weyl functions of regular Sturm–Liouville problems by shooting.
 *
 * The differential expression is −(1/2)(f′/m)′ + V·f on a finite interval
 * (x_l, x_r) with real coefficients, m > 0. In quasi-derivative form with
 * w = (1/m)·f′ the eigenvalue equation at energy λ becomes the first-order
 * system
 *
 *     f′ = m·w,      w′ = 2(V − λ)·f,
 *
 * whose fundamental solutions φ_λ, ψ_λ are fixed by φ(x_l)=1, w_φ(x_l)=0 and
 * ψ(x_l)=0, w_ψ(x_l)=1. The 2×2 Weyl function of the problem is then
 *
 *     M(λ) = (1/(2ψ(x_r)))·[[−φ(x_r), 1], [1, −w_ψ(x_r)]],
 *
 * with poles exactly at the Dirichlet eigenvalues (ψ_λ(x_r) = 0).
 *
 * Convention note: the quasi-derivative here is w = (1/m)f′, not the
 * boundary-map weight (1/(2m))f′ — the factor ½ is already absorbed in the
 * 1/(2ψ) prefactor of M. Mixing the two conventions silently rescales M by 2;
 * everything in this library uses w = (1/m)f′ consistently.
 *
 * Two propagation paths: piecewise-constant coefficients use products of
 * exact segment propagators (cos/sinc in k = sqrt_branch(2m(λ−v))); sampled
 * coefficients use an adaptive embedded Runge–Kutta 5(4) pair integrated
 * between profile breakpoints. The paths cross-validate each other.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "herglotz.hpp"
#include "matkit.hpp"

namespace weylscatter {

/**
 * @brief Real coefficient profile over an interval: either piecewise-constant
 *        segments (length, value) laid end to end from x_l, or point samples
 *        with step or linear interpolation.
 */
struct CoefficientProfile {
    enum class Kind { piecewise_constant, sampled };
    enum class Interpolation { step, linear };

    Kind kind = Kind::piecewise_constant;
    std::vector<std::pair<double, double>> segments;  ///< (length, value), lengths > 0
    std::vector<std::pair<double, double>> samples;   ///< (x, value), x strictly increasing
    Interpolation interpolation = Interpolation::step;

    static CoefficientProfile constant(double value) {
        return piecewise({{std::numeric_limits<double>::infinity(), value}});
    }

    static CoefficientProfile piecewise(std::vector<std::pair<double, double>> segs) {
        CoefficientProfile p;
        p.kind = Kind::piecewise_constant;
        p.segments = std::move(segs);
        for (const auto& [len, val] : p.segments) {
            if (!(len > 0.0)) throw Error(errc::invalid_profile, "segment lengths must be positive");
            if (!std::isfinite(val)) throw Error(errc::non_finite, "segment values must be finite");
        }
        return p;
    }

    static CoefficientProfile sampled(std::vector<std::pair<double, double>> pts,
                                      Interpolation interp = Interpolation::step) {
        CoefficientProfile p;
        p.kind = Kind::sampled;
        p.samples = std::move(pts);
        p.interpolation = interp;
        if (p.samples.empty()) throw Error(errc::invalid_profile, "sampled profile needs at least one point");
        for (std::size_t k = 0; k < p.samples.size(); ++k) {
            if (!std::isfinite(p.samples[k].first) || !std::isfinite(p.samples[k].second))
                throw Error(errc::non_finite, "sample coordinates must be finite");
            if (k > 0 && !(p.samples[k].first > p.samples[k - 1].first))
                throw Error(errc::invalid_profile, "sample grid must be strictly increasing");
        }
        return p;
    }

    /// Value at position x; origin is the left endpoint for piecewise layout.
    double value_at(double x, double origin) const {
        if (kind == Kind::piecewise_constant) {
            double pos = origin;
            for (const auto& [len, val] : segments) {
                pos += len;
                if (x < pos) return val;
            }
            return segments.back().second;
        }
        // sampled
        if (x <= samples.front().first) return samples.front().second;
        if (x >= samples.back().first) return samples.back().second;
        std::size_t hi = 1;
        while (samples[hi].first < x) ++hi;
        if (interpolation == Interpolation::step) return samples[hi - 1].second;
        const auto& [x0, v0] = samples[hi - 1];
        const auto& [x1, v1] = samples[hi];
        const double t = (x - x0) / (x1 - x0);
        return v0 + t * (v1 - v0);
    }

    /// Extreme values over the covered range (for eigenvalue grid sizing).
    double max_value() const {
        double m = -std::numeric_limits<double>::infinity();
        if (kind == Kind::piecewise_constant)
            for (const auto& s : segments) m = std::max(m, s.second);
        else
            for (const auto& s : samples) m = std::max(m, s.second);
        return m;
    }

    double max_abs_value() const {
        double m = 0.0;
        if (kind == Kind::piecewise_constant)
            for (const auto& s : segments) m = std::max(m, std::abs(s.second));
        else
            for (const auto& s : samples) m = std::max(m, std::abs(s.second));
        return m;
    }

    double min_value() const {
        double m = std::numeric_limits<double>::infinity();
        if (kind == Kind::piecewise_constant)
            for (const auto& s : segments) m = std::min(m, s.second);
        else
            for (const auto& s : samples) m = std::min(m, s.second);
        return m;
    }

    /// Interior breakpoints (discontinuities/kinks) inside (a, b).
    void collect_breakpoints(double a, double b, std::set<double>& out) const {
        if (kind == Kind::piecewise_constant) {
            double pos = a;
            for (std::size_t k = 0; k + 1 < segments.size(); ++k) {
                pos += segments[k].first;
                if (pos > a && pos < b) out.insert(pos);
                if (pos >= b) break;
            }
        } else {
            for (const auto& s : samples)
                if (s.first > a && s.first < b) out.insert(s.first);
        }
    }
};

/// A regular Sturm–Liouville problem on (x_l, x_r).
struct SLProblem {
    double x_l = 0.0;
    double x_r = 1.0;
    CoefficientProfile mass;
    CoefficientProfile potential;

    SLProblem(double xl, double xr, CoefficientProfile m, CoefficientProfile V)
        : x_l(xl), x_r(xr), mass(std::move(m)), potential(std::move(V)) {
        if (!(x_r > x_l)) throw Error(errc::validation_error, "SLProblem: need x_l < x_r");
        validate_coverage(mass, "mass");
        validate_coverage(potential, "potential");
        if (!(mass.min_value() > 0.0))
            throw Error(errc::invalid_profile, "SLProblem: mass must be positive everywhere");
    }

private:
    void validate_coverage(const CoefficientProfile& p, const char* name) const {
        const double span = x_r - x_l;
        if (p.kind == CoefficientProfile::Kind::piecewise_constant) {
            double total = 0.0;
            for (const auto& s : p.segments) {
                total += s.first;
                if (total >= span) return;  // covers (possibly with headroom / infinite tail)
            }
            if (total < span - 1e-9 * std::max(1.0, span))
                throw Error(errc::profile_gap, std::string(name) + " segments do not cover the interval");
        } else {
            if (p.samples.front().first > x_l + 1e-12)
                throw Error(errc::profile_gap, std::string(name) + " samples start after x_l");
            if (p.interpolation == CoefficientProfile::Interpolation::linear &&
                p.samples.back().first < x_r - 1e-12)
                throw Error(errc::profile_gap, std::string(name) + " samples end before x_r (linear mode)");
        }
    }
};

/// Values of the fundamental solutions and quasi-derivatives at x_r.
struct ShootingResult {
    cplx phi, w_phi, psi, w_psi;
    double wronskian_defect = 0.0;  ///< |φ·w_ψ − ψ·w_φ − 1|; ≡ 0 analytically

    /// Scale of the propagated solution, for relative pole/defect judgments.
    double scale() const {
        return std::max({1.0, std::abs(phi), std::abs(w_phi), std::abs(psi), std::abs(w_psi)});
    }
};

namespace detail {

/// Exact propagator of the constant-coefficient system over a step of length
/// ell: T = [[cos z, m·ell·sinc z], [2(v−λ)·ell·sinc z, cos z]], z = k·ell,
/// k = sqrt_branch(2m(λ−v)). sinc is series-stabilized near z = 0.
inline std::array<cplx, 4> segment_propagator(double m, double v, cplx lambda, double ell) {
    const cplx k = sqrt_branch(2.0 * m * (lambda - v));
    const cplx z = k * ell;
    const cplx sinc = std::abs(z) < 1e-4 ? 1.0 - z * z / 6.0 + z * z * z * z / 120.0 : std::sin(z) / z;
    const cplx cz = std::cos(z);
    return {cz, m * ell * sinc, 2.0 * (v - lambda) * ell * sinc, cz};
}

/// 2×2 left-multiply of the fundamental matrix F (stored as {φ, ψ, w_φ, w_ψ}
/// row-major [[φ, ψ], [w_φ, w_ψ]]) by a propagator T.
inline void apply_propagator(const std::array<cplx, 4>& T, std::array<cplx, 4>& F) {
    const cplx f00 = T[0] * F[0] + T[1] * F[2];
    const cplx f01 = T[0] * F[1] + T[1] * F[3];
    const cplx f10 = T[2] * F[0] + T[3] * F[2];
    const cplx f11 = T[2] * F[1] + T[3] * F[3];
    F = {f00, f01, f10, f11};
}

/// Merged breakpoint partition of [x_l, x_r] from both coefficient profiles.
/// Breakpoints within roundoff of each other are coalesced: a profile whose
/// positions were produced by the same arithmetic as the endpoints can land
/// an ulp away from them, and such slivers would otherwise reach the
/// integrator as degenerate sub-intervals.
inline std::vector<double> partition(const SLProblem& p) {
    std::set<double> cuts;
    cuts.insert(p.x_l);
    cuts.insert(p.x_r);
    p.mass.collect_breakpoints(p.x_l, p.x_r, cuts);
    p.potential.collect_breakpoints(p.x_l, p.x_r, cuts);
    const double tol = 1e-12 * std::max({1.0, std::abs(p.x_l), std::abs(p.x_r), p.x_r - p.x_l});
    std::vector<double> merged;
    merged.reserve(cuts.size());
    for (const double c : cuts) {
        if (!merged.empty() && c - merged.back() < tol) continue;
        merged.push_back(c);
    }
    merged.back() = p.x_r;  // keep the right endpoint exact after coalescing
    return merged;
}

/// State layout for the Runge–Kutta path: y = (φ, w_φ, ψ, w_ψ).
using RKState = std::array<cplx, 4>;

inline RKState rk_rhs(const SLProblem& p, double x, cplx lambda, const RKState& y) {
    const double m = p.mass.value_at(x, p.x_l);
    const double v = p.potential.value_at(x, p.x_l);
    const cplx q = 2.0 * (v - lambda);
    return {m * y[1], q * y[0], m * y[3], q * y[2]};
}

/**
 * @brief Adaptive embedded 5(4) Runge–Kutta over [a, b] with the classic
 *        seven-stage pair (FSAL), rtol 1e-12 / atol 1e-14.
 *
 * Step control: err = RMS of component errors scaled by atol + rtol·|y|;
 * accept when err ≤ 1; next step h·clamp(0.9·err^{−1/5}, 0.2, 5). The tight
 * defaults leave the global relative error near 1e-9 even for solutions that
 * traverse several thousand steps, so dual-path agreement at 1e-8 holds with
 * headroom.
 */
inline void rk_integrate(const SLProblem& p, cplx lambda, double a, double b, RKState& y,
                         double rtol = 1e-12, double atol = 1e-14) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

    const double span = b - a;
    if (!(span > 0.0)) return;

    double x = a;
    double h = span / 16.0;
    RKState k1 = rk_rhs(p, x, lambda, y);
    bool have_k1 = true;
    long steps = 0;
    const long max_steps = 1000000;

    while (x < b) {
        if (++steps > max_steps)
            throw Error(errc::step_failure, "rk_integrate: step budget exhausted");
        if (h < 1e-14 * std::max(1.0, std::abs(span)))
            throw Error(errc::step_failure, "rk_integrate: step size underflow");
        if (x + h > b) h = b - x;

        if (!have_k1) {
            k1 = rk_rhs(p, x, lambda, y);
            have_k1 = true;
        }

        RKState t;
        for (int i = 0; i < 4; ++i) t[i] = y[i] + h * (a21 * k1[i]);
        const RKState k2 = rk_rhs(p, x + c2 * h, lambda, t);
        for (int i = 0; i < 4; ++i) t[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        const RKState k3 = rk_rhs(p, x + c3 * h, lambda, t);
        for (int i = 0; i < 4; ++i) t[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        const RKState k4 = rk_rhs(p, x + c4 * h, lambda, t);
        for (int i = 0; i < 4; ++i)
            t[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        const RKState k5 = rk_rhs(p, x + c5 * h, lambda, t);
        for (int i = 0; i < 4; ++i)
            t[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const RKState k6 = rk_rhs(p, x + h, lambda, t);

        RKState y5;
        for (int i = 0; i < 4; ++i)
            y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        const RKState k7 = rk_rhs(p, x + h, lambda, y5);

        double err_sq = 0.0;
        for (int i = 0; i < 4; ++i) {
            const cplx ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                 e7 * k7[i]);
            const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
            const double r = std::abs(ei) / sc;
            err_sq += r * r;
        }
        const double err = std::sqrt(err_sq / 4.0);

        if (err <= 1.0) {
            x += h;
            y = y5;
            k1 = k7;  // first-same-as-last
        } else {
            have_k1 = true;  // k1 unchanged, step rejected
        }
        const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
    }
}

}  // namespace detail

/**
 * @brief Propagate the fundamental system from x_l to x_r at energy λ.
 *
 * Piecewise-constant problems (both profiles) take the exact-propagator path;
 * any sampled profile switches to the adaptive Runge–Kutta path, integrated
 * between merged profile breakpoints so discontinuities never sit inside a
 * step. The Wronskian φ·w_ψ − ψ·w_φ is conserved (≡ 1) analytically; the
 * reported defect is a roundoff diagnostic that grows like ~1e-16·‖solution‖²
 * through cancellation when the solution grows large, so read it relative to
 * ShootingResult::scale().
 */
inline ShootingResult propagate(const SLProblem& problem, cplx lambda) {
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
        throw Error(errc::non_finite, "propagate: lambda must be finite");

    // Fundamental matrix [[φ, ψ], [w_φ, w_ψ]] initialized to the identity.
    std::array<cplx, 4> F = {1.0, 0.0, 0.0, 1.0};
    const std::vector<double> cuts = detail::partition(problem);

    const bool exact = problem.mass.kind == CoefficientProfile::Kind::piecewise_constant &&
                       problem.potential.kind == CoefficientProfile::Kind::piecewise_constant;

    if (exact) {
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double a = cuts[k], b = cuts[k + 1];
            const double mid = 0.5 * (a + b);
            const double m = problem.mass.value_at(mid, problem.x_l);
            const double v = problem.potential.value_at(mid, problem.x_l);
            detail::apply_propagator(detail::segment_propagator(m, v, lambda, b - a), F);
        }
    } else {
        detail::RKState y = {F[0], F[2], F[1], F[3]};  // (φ, w_φ, ψ, w_ψ) columns interleaved
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
            detail::rk_integrate(problem, lambda, cuts[k], cuts[k + 1], y);
        F = {y[0], y[2], y[1], y[3]};
    }

    ShootingResult r;
    r.phi = F[0];
    r.psi = F[1];
    r.w_phi = F[2];
    r.w_psi = F[3];
    r.wronskian_defect = std::abs(r.phi * r.w_psi - r.psi * r.w_phi - 1.0);
    return r;
}

/**
 * @brief 2×2 Weyl function M(λ) = (1/(2ψ(x_r)))·[[−φ, 1], [1, −w_ψ]].
 *
 * NearPole when |ψ(x_r)| < tol_pole·max(1, |φ|, |w_φ|, |w_ψ|): λ is
 * numerically a Dirichlet eigenvalue, where M has a pole.
 */
inline CMatrix weyl_matrix(const SLProblem& problem, cplx lambda, double tol_pole = 1e-10) {
    const ShootingResult r = propagate(problem, lambda);
    const double scale = std::max({1.0, std::abs(r.phi), std::abs(r.w_phi), std::abs(r.w_psi)});
    if (std::abs(r.psi) < tol_pole * scale)
        throw Error(errc::near_pole, "weyl_matrix: Dirichlet eigenvalue (|psi(x_r)| below tol_pole*scale)");
    const cplx g = 1.0 / (2.0 * r.psi);
    return CMatrix::from_rows({{-g * r.phi, g}, {g, -g * r.w_psi}});
}

/**
 * @brief All Dirichlet eigenvalues in (−‖V‖_∞ − 1, λ_max], sorted ascending.
 *
 * ψ_λ(x_r) is entire in λ and real for real λ; eigenvalues are its (simple)
 * zeros. Scanned by sign-change bracketing on a grid of step
 * π²/(16·max(m)·(x_r−x_l)²) — comfortably below the minimal eigenvalue gap
 * of the comparison problem — then bisected to width 1e-10.
 */
inline std::vector<double> dirichlet_eigenvalues(const SLProblem& problem, double lambda_max) {
    if (!std::isfinite(lambda_max))
        throw Error(errc::non_finite, "dirichlet_eigenvalues: lambda_max must be finite");

    const double L = problem.x_r - problem.x_l;
    const double lambda_lo = -problem.potential.max_abs_value() - 1.0;
    std::vector<double> roots;
    if (lambda_max <= lambda_lo) return roots;

    const double pi = std::acos(-1.0);
    const double step = pi * pi / (16.0 * problem.mass.max_value() * L * L);
    const auto g = [&problem](double lam) { return propagate(problem, cplx(lam, 0.0)).psi.real(); };

    double a = lambda_lo;
    double ga = g(a);
    while (a < lambda_max) {
        const double b = std::min(a + step, lambda_max);
        const double gb = g(b);
        if (ga == 0.0) {
            roots.push_back(a);
        } else if (ga * gb < 0.0) {
            double lo = a, hi = b, glo = ga;
            while (hi - lo > 1e-10) {
                const double mid = 0.5 * (lo + hi);
                const double gm = g(mid);
                if (gm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (glo * gm < 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    glo = gm;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        a = b;
        ga = gb;
    }
    if (ga == 0.0 && (roots.empty() || std::abs(roots.back() - lambda_max) > 1e-9))
        roots.push_back(lambda_max);

    std::sort(roots.begin(), roots.end());
    std::vector<double> out;
    for (double r : roots)
        if (out.empty() || r - out.back() > 1e-9) out.push_back(r);
    return out;
}

/// Wrap a problem's Weyl function as a Nevanlinna family (dim 2). The real
/// domain excludes numerical Dirichlet-pole neighborhoods.
inline HerglotzFamily sl_weyl_family(const SLProblem& problem, double tol_pole = 1e-10) {
    HerglotzFamily fam;
    fam.dim = 2;
    fam.label = "sl_weyl";
    auto prob = std::make_shared<SLProblem>(problem);
    fam.evaluator = [prob, tol_pole](cplx lambda) { return weyl_matrix(*prob, lambda, tol_pole); };
    fam.real_domain = [prob, tol_pole](double mu) {
        const ShootingResult r = propagate(*prob, cplx(mu, 0.0));
        const double scale = std::max({1.0, std::abs(r.phi), std::abs(r.w_phi), std::abs(r.w_psi)});
        return std::abs(r.psi) >= tol_pole * scale;
    };
    return fam;
}

}  // namespace weylscatter
