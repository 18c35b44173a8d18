#pragma once

/**
 * @file scatter.hpp
 * @brief Scattering matrices and characteristic functions from boundary data.
 *
 * Everything here is an instance of one formula. For a self-adjoint relation
 * Θ on the boundary space and a boundary value W of a Nevanlinna function,
 *
 *     S_Θ = I + 2i · P √Im W · (Θ − W)⁻¹ · √Im W ↾ ran(Im W),
 *
 * restricted to the channel ran(Im W). The specialized objects are built by
 * choosing Θ and W:
 *
 *   • s_selfadjoint: Θ arbitrary self-adjoint, W = M(λ+i0) — the unitary
 *     scattering matrix of a pair of self-adjoint extensions.
 *   • s_dilation: Θ = dilation relation of a dissipative parameter D,
 *     W = diag(M(λ) − Re D, i·Λ) — the unitary scattering matrix of the
 *     self-adjoint dilation, on H_{M(λ)} ⊕ H_D. Its upper-left block is the
 *     (contractive) dissipative scattering matrix S_D, its lower-right block
 *     the Lax–Phillips scattering matrix S^LP.
 *   • s_coupled: Θ = coupling relation, W = diag(M(λ), τ(λ)) — the unitary
 *     scattering matrix of the coupled system on H_{M(λ)} ⊕ H_{τ(λ)}.
 *   • s_energydep: literally s_dilation with D := −τ(μ) — the
 *     energy-parameterized family whose value at λ = μ reproduces s_coupled.
 *
 * Each specialized route has an independent direct assembly (the textbook
 * block formulas in (D−M)⁻¹ or (M+τ)⁻¹) kept as a cross-check; the residual_*
 * functions measure the disagreement between routes and between the two sides
 * of the Adamyan–Arov identity S^LP(λ) = W_{A_D}(λ−i0)*.
 *
 * Channel compressions are expressed in the eigenbasis of the defining
 * Hermitian matrix (descending eigenvalues, stable on ties), so all matrices
 * are reproducible. Trivial channels (rank 0) yield 0×0 blocks with identity
 * semantics. Near Σ-set boundaries (poles of M, zeros of M+τ) the solves
 * report conditioning honestly — callers decide whether to skip or abort.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "herglotz.hpp"
#include "matkit.hpp"
#include "relspace.hpp"

namespace weylscatter {

/// A scattering channel: the range of a Hermitian matrix inside the ambient
/// boundary space, carried with its fixed orthonormal eigenbasis.
struct ChannelSpace {
    int ambient_dim = 0;
    CMatrix projector;  ///< ambient×ambient orthogonal projector
    int rank = 0;
    std::string label;
    CMatrix basis;      ///< ambient×rank, orthonormal columns (descending eigenvalue)
};

/// Channel spanned by the numerical range of a Hermitian matrix.
inline ChannelSpace make_channel(const CMatrix& H, double tol, std::string label) {
    RangeBasis rb = range_basis(H, tol);
    ChannelSpace ch;
    ch.ambient_dim = H.rows();
    ch.rank = rb.basis.cols();
    ch.basis = std::move(rb.basis);
    ch.projector = real_part(ch.basis * ch.basis.adjoint());
    ch.label = std::move(label);
    return ch;
}

/// Rank-zero channel (identity semantics under composition).
inline ChannelSpace trivial_channel(int ambient_dim, std::string label) {
    ChannelSpace ch;
    ch.ambient_dim = ambient_dim;
    ch.rank = 0;
    ch.basis = CMatrix(ambient_dim, 0);
    ch.projector = CMatrix(ambient_dim, ambient_dim);
    ch.label = std::move(label);
    return ch;
}

/**
 * @brief A scattering matrix on the direct sum of (up to) two channels.
 *
 * value lives on C^{rank_a + rank_b} in the concatenated channel bases;
 * blocks[i][j] are its sub-blocks by that partition. For single-channel
 * results the second channel is trivial and only blocks[0][0] is populated.
 */
struct ScatteringMatrix {
    std::pair<ChannelSpace, ChannelSpace> channels;
    CMatrix value;
    std::array<std::array<CMatrix, 2>, 2> blocks;
    double unitarity_defect = 0.0;    ///< ‖S*S − I‖ (spectral)
    double contraction_excess = 0.0;  ///< max(0, ‖S‖ − 1)
    double cond = 1.0;                ///< condition number of the defining solve
    bool ill_conditioned = false;     ///< cond > 1e12; value reported anyway
    bool trivial_channel = false;     ///< some requested channel has rank 0
};

namespace detail {

/// Populate blocks and diagnostics from an assembled value.
inline ScatteringMatrix finalize(ChannelSpace a, ChannelSpace b, CMatrix value, double cond,
                                 bool ill) {
    ScatteringMatrix sm;
    const int ra = a.rank, rb = b.rank;
    sm.channels = {std::move(a), std::move(b)};
    sm.value = std::move(value);
    sm.blocks[0][0] = sm.value.block(0, 0, ra, ra);
    sm.blocks[0][1] = sm.value.block(0, ra, ra, rb);
    sm.blocks[1][0] = sm.value.block(ra, 0, rb, ra);
    sm.blocks[1][1] = sm.value.block(ra, ra, rb, rb);
    sm.unitarity_defect = unitary_defect(sm.value);
    sm.contraction_excess = std::max(0.0, spectral_norm(sm.value) - 1.0);
    sm.cond = cond;
    sm.ill_conditioned = ill;
    sm.trivial_channel = ra == 0 || rb == 0;
    return sm;
}

/// diag(√λ₁, …, √λ_r) from positive channel weights.
inline CMatrix sqrt_diag(const std::vector<double>& eigs) {
    std::vector<cplx> d;
    d.reserve(eigs.size());
    for (double e : eigs) d.emplace_back(std::sqrt(std::max(0.0, e)), 0.0);
    return CMatrix::diag(d);
}

}  // namespace detail

/**
 * @brief Scattering matrix of the extension pair (A_Θ, A₀):
 *        S_Θ(λ) = I + 2i·P √Im M (Θ − M(λ))⁻¹ √Im M ↾ H_{M(λ)}.
 *
 * Mλ must be a boundary value M(λ+i0). A rank-zero channel (Im M = 0, i.e.
 * real λ in the resolvent set of A₀) yields a 0×0 result flagged
 * trivial_channel. Unitary up to roundoff when Θ is self-adjoint.
 */
inline ScatteringMatrix s_selfadjoint(const CMatrix& Mlambda, const SelfAdjointRelation& R,
                                      double tol = 1e-10) {
    if (R.dim != Mlambda.rows())
        throw Error(errc::dimension_mismatch, "s_selfadjoint: relation and M dimension disagree");
    const CMatrix ImM = imag_part(Mlambda);
    ChannelSpace chan = make_channel(ImM, tol, "H_M(lambda)");
    ChannelSpace none = trivial_channel(Mlambda.rows(), "");

    if (chan.rank == 0)
        return detail::finalize(std::move(chan), std::move(none), CMatrix(0, 0), 1.0, false);

    const CMatrix B = psd_sqrt(ImM, tol);
    const ResolventResult res = relation_resolvent(R, Mlambda);
    const CMatrix T = chan.basis.adjoint() * B * res.N * B * chan.basis;
    const CMatrix S = CMatrix::identity(chan.rank) + cplx(0.0, 2.0) * T;
    return detail::finalize(std::move(chan), std::move(none), S, res.cond, res.ill_conditioned);
}

/**
 * @brief Scattering matrix of the self-adjoint dilation of A_D on
 *        H_{M(λ)} ⊕ H_D (unitary), via the dilation relation.
 *
 * The boundary parameter of the dilation's triplet is the relation Θ̃ of
 * dilation_relation(D); its Weyl function's boundary value is
 * W̃ = diag(M(λ) − Re D, i·Λ) with Λ the positive eigenvalues of −Im D. The
 * generic sandwich then reproduces the four textbook blocks
 *   S̃ = I + 2i·[√Im M; √(−Im D)] (D − M)⁻¹ [√Im M, √(−Im D)]   (compressed)
 * exactly — the upper-left block is the dissipative scattering matrix S_D and
 * the lower-right the Lax–Phillips scattering matrix S^LP.
 */
inline ScatteringMatrix s_dilation(const CMatrix& Mlambda, const CMatrix& D, double tol = 1e-10) {
    if (D.rows() != Mlambda.rows() || !D.is_square() || !Mlambda.is_square())
        throw Error(errc::dimension_mismatch, "s_dilation: M and D must be square of equal size");
    const int n = Mlambda.rows();
    const DilationRelation dil = dilation_relation(D, tol);
    const CMatrix ImM = imag_part(Mlambda);
    ChannelSpace chanM = make_channel(ImM, tol, "H_M(lambda)");
    ChannelSpace chanD;
    chanD.ambient_dim = n;
    chanD.projector = dil.projector;
    chanD.rank = dil.hd_rank;
    chanD.basis = dil.hd_basis;
    chanD.label = "H_D";

    const CMatrix BM = psd_sqrt(ImM, tol);
    const CMatrix sqrtL = detail::sqrt_diag(dil.hd_eigenvalues);

    std::vector<cplx> itau;
    itau.reserve(dil.hd_eigenvalues.size());
    for (double e : dil.hd_eigenvalues) itau.emplace_back(0.0, e);
    const CMatrix W = block_diag({Mlambda - real_part(D), CMatrix::diag(itau)});

    const ResolventResult res = relation_resolvent(dil.relation, W);
    const CMatrix left = block_diag({chanM.basis.adjoint() * BM, sqrtL});
    const CMatrix right = block_diag({BM * chanM.basis, sqrtL});
    const CMatrix T = left * res.N * right;
    const CMatrix S = CMatrix::identity(chanM.rank + chanD.rank) + cplx(0.0, 2.0) * T;
    return detail::finalize(std::move(chanM), std::move(chanD), S, res.cond, res.ill_conditioned);
}

/// Dissipative scattering matrix S_D: the H_{M(λ)} corner of s_dilation
/// (same assembly, bit-equal block). Contractive, not unitary in general.
inline ScatteringMatrix s_dissipative(const CMatrix& Mlambda, const CMatrix& D, double tol = 1e-10) {
    ScatteringMatrix full = s_dilation(Mlambda, D, tol);
    ChannelSpace none = trivial_channel(Mlambda.rows(), "");
    ScatteringMatrix sm =
        detail::finalize(full.channels.first, std::move(none), full.blocks[0][0], full.cond,
                         full.ill_conditioned);
    return sm;
}

/// Lax–Phillips scattering matrix S^LP: the H_D corner of s_dilation
/// (same assembly, bit-equal block). Contractive.
inline ScatteringMatrix s_laxphillips(const CMatrix& Mlambda, const CMatrix& D, double tol = 1e-10) {
    ScatteringMatrix full = s_dilation(Mlambda, D, tol);
    ChannelSpace none = trivial_channel(Mlambda.rows(), "");
    ScatteringMatrix sm = detail::finalize(full.channels.second, std::move(none), full.blocks[1][1],
                                           full.cond, full.ill_conditioned);
    return sm;
}

/**
 * @brief Characteristic function of the completely non-self-adjoint part of
 *        A_D on H_D: W(μ) = I − 2i·P_D √(−Im D) (D* − M(μ))⁻¹ √(−Im D) ↾ H_D.
 *
 * Mμ must be evaluated in the closed lower half-plane (on the axis:
 * M(μ−i0) = M(μ+i0)*). Contractive there; its boundary adjoint equals S^LP
 * (Adamyan–Arov). For Hermitian D the channel is trivial and the result is
 * the 0×0 identity.
 */
inline CMatrix char_function(const CMatrix& Mmu, const CMatrix& D, double tol = 1e-10) {
    if (D.rows() != Mmu.rows() || !D.is_square() || !Mmu.is_square())
        throw Error(errc::dimension_mismatch, "char_function: M and D must be square of equal size");
    const DilationRelation dil = dilation_relation(D, tol);
    if (dil.hd_rank == 0) return CMatrix(0, 0);
    const CMatrix sqrtL = detail::sqrt_diag(dil.hd_eigenvalues);
    const SolveResult s = solve(D.adjoint() - Mmu, dil.hd_basis * sqrtL);
    const CMatrix T = sqrtL * dil.hd_basis.adjoint() * s.X;
    return CMatrix::identity(dil.hd_rank) - cplx(0.0, 2.0) * T;
}

/**
 * @brief Scattering matrix of the coupled system on H_{M(λ)} ⊕ H_{τ(λ)}
 *        (unitary), via the coupling relation.
 *
 * Both arguments are boundary values at the same real λ. The coupling
 * relation's resolvent against diag(M, τ) has every block equal to −(M+τ)⁻¹,
 * so the generic +2i sandwich reproduces the textbook −2i block formulas
 * in (M+τ)⁻¹ exactly. With a trivial H_{M(λ)} (real M) the result reduces to
 * the purely singular form I − 2i·P √Im τ (M+τ)⁻¹ √Im τ ↾ H_{τ(λ)}.
 */
inline ScatteringMatrix s_coupled(const CMatrix& Mlambda, const CMatrix& tau, double tol = 1e-10) {
    if (tau.rows() != Mlambda.rows() || !tau.is_square() || !Mlambda.is_square())
        throw Error(errc::dimension_mismatch, "s_coupled: M and tau must be square of equal size");
    const int n = Mlambda.rows();
    const CMatrix ImM = imag_part(Mlambda);
    const CMatrix ImT = imag_part(tau);
    ChannelSpace chanM = make_channel(ImM, tol, "H_M(lambda)");
    ChannelSpace chanT = make_channel(ImT, tol, "H_tau(lambda)");

    const CMatrix BM = psd_sqrt(ImM, tol);
    const CMatrix BT = psd_sqrt(ImT, tol);
    const SelfAdjointRelation rel = coupling_relation(n);
    const ResolventResult res = relation_resolvent(rel, block_diag({Mlambda, tau}));
    const CMatrix left = block_diag({chanM.basis.adjoint() * BM, chanT.basis.adjoint() * BT});
    const CMatrix right = block_diag({BM * chanM.basis, BT * chanT.basis});
    const CMatrix T = left * res.N * right;
    const CMatrix S = CMatrix::identity(chanM.rank + chanT.rank) + cplx(0.0, 2.0) * T;
    return detail::finalize(std::move(chanM), std::move(chanT), S, res.cond, res.ill_conditioned);
}

/**
 * @brief Energy-parameterized scattering matrix S̃_μ(λ) on H_{M(λ)} ⊕ H_{τ(μ)}:
 *        exactly s_dilation(M(λ), D := −τ(μ)).
 *
 * The identification −τ(μ) = D turns the fixed-μ family formula in
 * (τ(μ) + M(λ))⁻¹ into the dilation formula in (D − M)⁻¹ — same matrices,
 * same code path. Its value at λ = μ coincides with s_coupled at μ.
 */
inline ScatteringMatrix s_energydep(const CMatrix& Mlambda, const CMatrix& tau_mu, double tol = 1e-10) {
    ScatteringMatrix sm = s_dilation(Mlambda, cplx(-1.0) * tau_mu, tol);
    sm.channels.second.label = "H_tau(mu)";
    return sm;
}

/**
 * @brief Characteristic function of the Štraus extension A_{−τ(λ)} at μ in
 *        the closed lower half-plane:
 *        W(μ) = I + 2i·P √Im τ(λ) (τ(λ)* + M(μ))⁻¹ √Im τ(λ) ↾ H_{τ(λ)},
 *        computed as char_function(Mμ, −τ(λ)) via (−τ)* − M = −(τ* + M).
 */
inline CMatrix straus_char(const CMatrix& Mmu, const CMatrix& tau_lambda, double tol = 1e-10) {
    return char_function(Mmu, cplx(-1.0) * tau_lambda, tol);
}

/**
 * @brief Direct assembly of the dilation scattering matrix from the textbook
 *        block formulas in (D − M(λ))⁻¹ — independent of the relation route.
 *
 * Returns the assembled value on H_{M(λ)} ⊕ H_D in the same channel bases as
 * s_dilation; used as the second leg of the route-consistency residual.
 */
inline CMatrix s_dilation_direct(const CMatrix& Mlambda, const CMatrix& D, double tol = 1e-10) {
    const DilationRelation dil = dilation_relation(D, tol);
    const CMatrix ImM = imag_part(Mlambda);
    const RangeBasis rbM = range_basis(ImM, tol);
    const CMatrix BM = psd_sqrt(ImM, tol);
    const CMatrix sqrtL = detail::sqrt_diag(dil.hd_eigenvalues);
    const int ra = rbM.basis.cols(), rb = dil.hd_rank;
    const int n = Mlambda.rows();

    // Left factor rows [Q_M* √Im M; √Λ Q_D*] are exactly the adjoint of the
    // right factor columns [√Im M Q_M | Q_D √Λ].
    CMatrix cols(n, ra + rb);
    cols.set_block(0, 0, BM * rbM.basis);
    cols.set_block(0, ra, dil.hd_basis * sqrtL);
    const SolveResult s = solve(D - Mlambda, cols);
    const CMatrix T = cols.adjoint() * s.X;
    return CMatrix::identity(ra + rb) + cplx(0.0, 2.0) * T;
}

/**
 * @brief Direct assembly of the coupled scattering matrix from the textbook
 *        block formulas in (M(λ) + τ(λ))⁻¹ — independent of the relation
 *        route. Same channel bases as s_coupled.
 */
inline CMatrix s_coupled_direct(const CMatrix& Mlambda, const CMatrix& tau, double tol = 1e-10) {
    const CMatrix ImM = imag_part(Mlambda);
    const CMatrix ImT = imag_part(tau);
    const RangeBasis rbM = range_basis(ImM, tol);
    const RangeBasis rbT = range_basis(ImT, tol);
    const CMatrix BM = psd_sqrt(ImM, tol);
    const CMatrix BT = psd_sqrt(ImT, tol);
    const int ra = rbM.basis.cols(), rb = rbT.basis.cols();
    const int n = Mlambda.rows();

    CMatrix cols(n, ra + rb);
    cols.set_block(0, 0, BM * rbM.basis);
    cols.set_block(0, ra, BT * rbT.basis);
    const SolveResult s = solve(Mlambda + tau, cols);
    const CMatrix T = cols.adjoint() * s.X;
    return CMatrix::identity(ra + rb) - cplx(0.0, 2.0) * T;
}

/**
 * @brief Adamyan–Arov residual ‖S^LP(λ) − W_{A_D}(λ−i0)*‖ at real λ.
 *
 * The left side is assembled from M(λ+i0) through the dilation route, the
 * right side from M(λ−i0) = M(λ+i0)* through the characteristic function —
 * two different formulas whose agreement is the identity under test.
 */
inline double residual_adamyan_arov(const HerglotzFamily& Mfamily, const CMatrix& D, double lambda,
                                    const BoundaryMode& mode = BoundaryMode{}, double tol = 1e-10) {
    const CMatrix Mplus = boundary_value(Mfamily, lambda, mode);
    const CMatrix Mminus = Mplus.adjoint();  // M(λ−i0) = M(λ+i0)*
    const CMatrix slp = s_laxphillips(Mplus, D, tol).value;
    const CMatrix W = char_function(Mminus, D, tol);
    return spectral_norm(slp - W.adjoint());
}

/**
 * @brief Energy-dependent Adamyan–Arov residual
 *        ‖S^LP_μ(μ) − W_{A_{−τ(μ)}}(μ−i0)*‖ at real μ, with the Štraus
 *        characteristic function on the right.
 */
inline double residual_adamyan_arov_energydep(const HerglotzFamily& Mfamily,
                                              const HerglotzFamily& tau_family, double mu,
                                              const BoundaryMode& mode = BoundaryMode{},
                                              double tol = 1e-10) {
    const CMatrix tau = boundary_value(tau_family, mu, mode);
    const CMatrix Mplus = boundary_value(Mfamily, mu, mode);
    const CMatrix Mminus = Mplus.adjoint();
    const CMatrix slp = s_laxphillips(Mplus, cplx(-1.0) * tau, tol).value;
    const CMatrix W = straus_char(Mminus, tau, tol);
    return spectral_norm(slp - W.adjoint());
}

/**
 * @brief Residual of the central identity S̃(μ) = S̃_μ(μ):
 *        ‖s_coupled(M(μ), τ(μ)) − s_energydep(M(μ), τ(μ))‖.
 *
 * The two sides go through genuinely distinct assemblies — the coupling
 * relation against diag(M, τ) versus the dilation relation of −τ(μ) — and
 * agree identically on Σ^M ∩ Σ^τ ∩ Σ^N.
 */
inline double residual_theorem_main(const HerglotzFamily& Mfamily, const HerglotzFamily& tau_family,
                                    double mu, const BoundaryMode& mode = BoundaryMode{},
                                    double tol = 1e-10) {
    const CMatrix Mb = boundary_value(Mfamily, mu, mode);
    const CMatrix tb = boundary_value(tau_family, mu, mode);
    const ScatteringMatrix a = s_coupled(Mb, tb, tol);
    const ScatteringMatrix b = s_energydep(Mb, tb, tol);
    if (a.value.rows() != b.value.rows())
        throw Error(errc::evaluation_failed, "residual_theorem_main: channel ranks disagree between routes");
    return spectral_norm(a.value - b.value);
}

/// Which specialized route to cross-check against its direct block assembly.
enum class RelationRoute { dilation, coupling };

/**
 * @brief Route-consistency residual: relation-route sandwich vs direct
 *        textbook assembly, ‖s_X.value − s_X_direct‖.
 *
 * For dilation the parameter is a dissipative D; for coupling it is τ(λ).
 */
inline double residual_relation_consistency(const CMatrix& Mlambda, const CMatrix& parameter,
                                            RelationRoute which, double tol = 1e-10) {
    if (which == RelationRoute::dilation)
        return spectral_norm(s_dilation(Mlambda, parameter, tol).value -
                             s_dilation_direct(Mlambda, parameter, tol));
    return spectral_norm(s_coupled(Mlambda, parameter, tol).value -
                         s_coupled_direct(Mlambda, parameter, tol));
}

}  // namespace weylscatter
