#pragma once

/**
 * @file relspace.hpp
 * @brief Self-adjoint linear relations on a boundary space, in kernel form.
 *
 * A linear relation Θ on C^d is kept as the kernel of a d×2d block:
 * Θ = {(h, h′) : Φh + Ψh′ = 0}. Self-adjointness is equivalent to two
 * checkable matrix conditions — rank [Φ | Ψ] = d and ΦΨ* Hermitian — and the
 * resolvent-like object every scattering formula needs,
 *
 *     N_Θ(W) = (Θ − W)⁻¹ = −(Φ + ΨW)⁻¹ Ψ,
 *
 * becomes a single formula covering all three relations used downstream:
 *
 *   • graph(H):    Φ = H, Ψ = −I           →  N = (H − W)⁻¹
 *   • coupling:    h = (v, v), h′ = (w, −w) →  N has all blocks −(m + t)⁻¹
 *   • dilation(D): the relation gluing a dissipative boundary parameter D to
 *     its minimal self-adjoint dilation — its H-corner resolves to (D − M)⁻¹.
 *
 * The kernel representation of a relation is not unique (any invertible left
 * factor gives the same Θ); the builders fix one deterministic choice, with
 * the dilation using the eigenbasis of −Im D ordered by descending eigenvalue.
 */

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "matkit.hpp"

namespace weylscatter {

/// Self-adjointness audit of a kernel pair.
struct SelfAdjointReport {
    int rank_defect = 0;             ///< d − rank[Φ|Ψ]
    double hermiticity_defect = 0.0; ///< ‖ΦΨ* − ΨΦ*‖ (spectral)
};

/// Audit an arbitrary kernel pair (no validity assumption).
inline SelfAdjointReport check_selfadjoint(const CMatrix& Phi, const CMatrix& Psi) {
    if (!Phi.is_square() || !Psi.is_square() || Phi.rows() != Psi.rows())
        throw Error(errc::dimension_mismatch, "check_selfadjoint: Phi, Psi must be square of equal size");
    const int d = Phi.rows();

    SelfAdjointReport rep;
    if (d == 0) return rep;

    // rank [Φ|Ψ] from the singular values of the d×2d block.
    CMatrix B(d, 2 * d);
    B.set_block(0, 0, Phi);
    B.set_block(0, d, Psi);
    const auto gram = hermitian_eigen(B * B.adjoint());
    const double top = std::sqrt(std::max(0.0, gram.eigenvalues.back()));
    int rank = 0;
    for (double e : gram.eigenvalues)
        if (std::sqrt(std::max(0.0, e)) > 1e-10 * std::max(1.0, top)) ++rank;
    rep.rank_defect = d - rank;

    const CMatrix C = Phi * Psi.adjoint();
    rep.hermiticity_defect = spectral_norm(C - C.adjoint());
    return rep;
}

/**
 * @brief Self-adjoint relation Θ = {(h, h′) : Φh + Ψh′ = 0} on C^d.
 *
 * Construct through from_kernel (validating) or the builders below.
 */
struct SelfAdjointRelation {
    int dim = 0;
    CMatrix Phi, Psi;

    /// Validating constructor: rejects rank defects and Hermiticity defects
    /// above 1e-10·scale.
    static SelfAdjointRelation from_kernel(CMatrix Phi, CMatrix Psi) {
        const SelfAdjointReport rep = check_selfadjoint(Phi, Psi);
        if (rep.rank_defect != 0)
            throw Error(errc::invalid_relation,
                        "relation kernel has rank defect " + std::to_string(rep.rank_defect));
        const double scale = std::max({1.0, Phi.max_abs(), Psi.max_abs()});
        if (rep.hermiticity_defect > 1e-10 * scale)
            throw Error(errc::not_selfadjoint,
                        "Phi*Psi^* is not Hermitian (defect " + std::to_string(rep.hermiticity_defect) + ")");
        SelfAdjointRelation r;
        r.dim = Phi.rows();
        r.Phi = std::move(Phi);
        r.Psi = std::move(Psi);
        return r;
    }
};

/// Audit of an already-constructed relation (re-checks the invariants).
inline SelfAdjointReport check_selfadjoint(const SelfAdjointRelation& R) {
    return check_selfadjoint(R.Phi, R.Psi);
}

/// Θ = graph of a Hermitian matrix: Φ = H, Ψ = −I.
inline SelfAdjointRelation graph_relation(const CMatrix& H) {
    if (!H.is_square()) throw Error(errc::non_square, "graph_relation needs a square matrix");
    if (hermiticity_deviation(H) > 1e-10 * std::max(1.0, H.max_abs()))
        throw Error(errc::non_hermitian, "graph_relation: parameter matrix is not Hermitian");
    return SelfAdjointRelation::from_kernel(H, cplx(-1.0) * CMatrix::identity(H.rows()));
}

/// Coupling relation on C^n ⊕ C^n: h = (v, v), h′ = (w, −w);
/// Φ = [[I, −I], [0, 0]], Ψ = [[0, 0], [I, I]].
inline SelfAdjointRelation coupling_relation(int n) {
    if (n < 1) throw Error(errc::validation_error, "coupling_relation: need n >= 1");
    const CMatrix I = CMatrix::identity(n);
    CMatrix Phi(2 * n, 2 * n), Psi(2 * n, 2 * n);
    Phi.set_block(0, 0, I);
    Phi.set_block(0, n, cplx(-1.0) * I);
    Psi.set_block(n, 0, I);
    Psi.set_block(n, n, I);
    return SelfAdjointRelation::from_kernel(std::move(Phi), std::move(Psi));
}

/**
 * @brief Dilation relation of a dissipative boundary parameter D, together
 *        with the geometry of the auxiliary channel H_D = ran(Im D).
 *
 * Coordinates on the enlarged boundary space C^{n+r}: the first n coordinates
 * are the original space H, the trailing r are H_D expressed in hd_basis
 * (eigenvectors of −Im D, descending eigenvalue order). hd_eigenvalues are
 * the corresponding eigenvalues of −Im D (all > 0).
 */
struct DilationRelation {
    SelfAdjointRelation relation;       ///< on C^{n+r}
    CMatrix projector;                  ///< P_D: n×n orthogonal projector onto ran(Im D)
    int hd_rank = 0;                    ///< r = rank(Im D)
    CMatrix hd_basis;                   ///< n×r, orthonormal columns spanning ran(Im D)
    CMatrix ker_basis;                  ///< n×(n−r), orthonormal columns spanning ker(Im D)
    std::vector<double> hd_eigenvalues; ///< eigenvalues of −Im D on H_D, descending
};

/**
 * @brief Build the dilation relation of a dissipative D (Im D ⪯ 0).
 *
 * Writing h ∈ C^n as u ⊕ v with u ∈ ker(Im D), v ∈ H_D, the relation on
 * H ⊕ H_D is Θ̃ = {((u ⊕ v, v), (h′, w)) : h′ = 0 ⊕ (−w)} — kernel rows:
 *   (i)   Q_D* h − h̃ = 0                (H_D components of h agree),
 *   (ii)  Q_ker* h′ = 0                  (ker component of h′ vanishes),
 *   (iii) Q_D* h′ + h̃′ = 0              (H_D components of h′ opposite).
 * ΦΨ* = 0 exactly, so self-adjointness is structural. A Hermitian D (r = 0)
 * degenerates to the pure boundary condition h′ = 0, and a D with trivial
 * kernel reproduces the coupling relation in the H_D eigenbasis.
 *
 * tol is a relative dissipativity guard: eigenvalues of Im D above
 * tol·max(1, ‖Im D‖) raise NotDissipative.
 */
inline DilationRelation dilation_relation(const CMatrix& D, double tol = 1e-10) {
    if (!D.is_square()) throw Error(errc::non_square, "dilation_relation needs a square matrix");
    const int n = D.rows();
    const CMatrix G = cplx(-1.0) * imag_part(D);  // −Im D ⪰ 0 for dissipative D
    const double gnorm = spectral_norm(G);
    const auto low = hermitian_eigen(G).eigenvalues;
    if (!low.empty() && low.front() < -std::max(tol, 1e-15) * std::max(1.0, gnorm))
        throw Error(errc::not_dissipative,
                    "dilation_relation: Im D has a positive eigenvalue (" + std::to_string(-low.front()) + ")");

    // Split the eigenbasis of −Im D — the same stable split channel
    // construction uses, so H_D coordinates agree across modules. Tolerated
    // negative dips (within the dissipativity guard) are clipped into the
    // kernel so channel weights stay strictly positive.
    EigenSplit sp = eigen_split(G, 1e-10);
    while (!sp.range_eigenvalues.empty() && sp.range_eigenvalues.back() <= 0.0) {
        const int keep = sp.range.cols() - 1;
        CMatrix clipped(n, keep);
        if (keep > 0) clipped.set_block(0, 0, sp.range.block(0, 0, n, keep));
        CMatrix extended(n, sp.kernel.cols() + 1);
        extended.set_block(0, 0, sp.range.block(0, keep, n, 1));
        if (sp.kernel.cols() > 0) extended.set_block(0, 1, sp.kernel);
        sp.range = std::move(clipped);
        sp.kernel = std::move(extended);
        sp.range_eigenvalues.pop_back();
    }
    DilationRelation out;
    const int r = sp.range.cols();
    out.hd_rank = r;
    out.hd_basis = sp.range;
    out.ker_basis = sp.kernel;
    out.hd_eigenvalues = sp.range_eigenvalues;
    out.projector = real_part(out.hd_basis * out.hd_basis.adjoint());

    const int d = n + r;
    CMatrix Phi(d, d), Psi(d, d);
    Phi.set_block(0, 0, out.hd_basis.adjoint());                    // (i): Q_D* h …
    Phi.set_block(0, n, cplx(-1.0) * CMatrix::identity(r));         //      … − h̃
    Psi.set_block(r, 0, out.ker_basis.adjoint());                   // (ii): Q_ker* h′
    Psi.set_block(r + (n - r), 0, out.hd_basis.adjoint());          // (iii): Q_D* h′ …
    Psi.set_block(r + (n - r), n, CMatrix::identity(r));            //        … + h̃′
    out.relation = SelfAdjointRelation::from_kernel(std::move(Phi), std::move(Psi));
    return out;
}

/// N_Θ(W) = (Θ − W)⁻¹ with conditioning diagnostics.
struct ResolventResult {
    CMatrix N;
    double cond = 1.0;
    bool ill_conditioned = false;  ///< cond > 1e12; value still returned
};

/**
 * @brief Resolvent of a relation against a matrix parameter W:
 *        N = −(Φ + ΨW)⁻¹ Ψ.
 *
 * For graph(H) this is (H − W)⁻¹; for the coupling relation with
 * W = diag(m, t) every block is −(m + t)⁻¹; for the dilation relation with
 * W = diag(M − Re D, i·Λ) the H-corner equals (D − M)⁻¹. Throws Singular when
 * Φ + ΨW is numerically singular; ill-conditioning is flagged, not thrown.
 */
inline ResolventResult relation_resolvent(const SelfAdjointRelation& R, const CMatrix& W) {
    if (W.rows() != R.dim || W.cols() != R.dim)
        throw Error(errc::dimension_mismatch, "relation_resolvent: W must match the relation dimension");
    const SolveResult s = solve(R.Phi + R.Psi * W, R.Psi);
    ResolventResult out;
    out.N = cplx(-1.0) * s.X;
    out.cond = s.cond;
    out.ill_conditioned = s.ill_conditioned;
    return out;
}

}  // namespace weylscatter
