#pragma once

/**
 * @file support.hpp
 * @brief Shared test fixtures: fixed-seed random generators for the matrix
 *        and family corpora, plus comparison helpers.
 *
 * Every generator takes an explicit engine so each test controls its seed and
 * the corpora are reproducible run to run.
 */

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include <weylscatter/weylscatter.hpp>

namespace testkit {

using weylscatter::cplx;
using weylscatter::CMatrix;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
}

/// Dense matrix with entries uniform in the complex box [-1,1]².
inline CMatrix random_matrix(std::mt19937_64& gen, int rows, int cols) {
    CMatrix A(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) A(i, j) = cplx(uniform(gen, -1, 1), uniform(gen, -1, 1));
    return A;
}

/// Exactly Hermitian random matrix (entrywise mean with the adjoint).
inline CMatrix random_hermitian(std::mt19937_64& gen, int n) {
    const CMatrix A = random_matrix(gen, n, n);
    return cplx(0.5) * (A + A.adjoint());
}

/// Positive semidefinite A*A, optionally rank-deficient.
inline CMatrix random_psd(std::mt19937_64& gen, int n, int rank = -1) {
    const int r = rank < 0 ? n : rank;
    const CMatrix A = random_matrix(gen, r, n);
    return A.adjoint() * A;
}

/// Strictly positive definite (eigenvalues ≥ floor).
inline CMatrix random_pd(std::mt19937_64& gen, int n, double floor = 0.1) {
    return random_psd(gen, n) + cplx(floor) * CMatrix::identity(n);
}

/// Dissipative matrix: Hermitian real part, Im D strictly negative definite.
inline CMatrix random_dissipative(std::mt19937_64& gen, int n, double floor = 0.1) {
    return random_hermitian(gen, n) - cplx(0.0, 1.0) * random_pd(gen, n, floor);
}

/// Plausible boundary value M(λ+i0): Hermitian + i·(strictly positive).
inline CMatrix random_boundary_value(std::mt19937_64& gen, int n, double imag_floor = 0.1) {
    return random_hermitian(gen, n) + cplx(0.0, 1.0) * random_pd(gen, n, imag_floor);
}

/**
 * @brief Random matrix Nevanlinna family with the canonical integral shape
 *        F(λ) = A + B·λ + Σ_k C_k / (t_k − λ): A Hermitian, B, C_k ⪰ 0,
 *        t_k real. Real domain excludes ±0.05 around each pole t_k.
 */
inline weylscatter::HerglotzFamily random_nevanlinna_family(std::mt19937_64& gen, int n,
                                                            int poles = 3) {
    struct Data {
        CMatrix A, B;
        std::vector<CMatrix> C;
        std::vector<double> t;
    };
    auto data = std::make_shared<Data>();
    data->A = random_hermitian(gen, n);
    data->B = random_psd(gen, n);
    for (int k = 0; k < poles; ++k) {
        data->C.push_back(random_psd(gen, n));
        data->t.push_back(uniform(gen, -3, 3));
    }
    weylscatter::HerglotzFamily fam;
    fam.dim = n;
    fam.label = "random_nevanlinna";
    fam.evaluator = [data](cplx lambda) {
        CMatrix F = data->A + lambda * data->B;
        for (std::size_t k = 0; k < data->C.size(); ++k)
            F = F + cplx(1.0) / (cplx(data->t[k]) - lambda) * data->C[k];
        return F;
    };
    fam.real_domain = [data](double mu) {
        for (double t : data->t)
            if (std::abs(mu - t) < 0.05) return false;
        return true;
    };
    return fam;
}

/// Random regular Sturm–Liouville problem with growth kept moderate so the
/// Wronskian cancellation budget stays within the 1e-9 absolute defect bound.
inline weylscatter::SLProblem random_sl_problem(std::mt19937_64& gen, bool sampled = false) {
    const double x_l = uniform(gen, -1, 1);
    const int segs = 1 + static_cast<int>(uniform(gen, 0, 3.999));
    if (!sampled) {
        std::vector<std::pair<double, double>> mass, pot;
        double total = 0.0;
        for (int k = 0; k < segs; ++k) {
            const double len = uniform(gen, 0.1, 0.45);
            total += len;
            mass.emplace_back(len, uniform(gen, 0.3, 1.2));
            pot.emplace_back(len, uniform(gen, -2, 2));
        }
        return weylscatter::SLProblem(x_l, x_l + total,
                                      weylscatter::CoefficientProfile::piecewise(mass),
                                      weylscatter::CoefficientProfile::piecewise(pot));
    }
    const double span = uniform(gen, 0.4, 1.2);
    std::vector<std::pair<double, double>> mass, pot;
    const int pts = 4 + static_cast<int>(uniform(gen, 0, 4.999));
    for (int k = 0; k < pts; ++k) {
        const double x = x_l + span * k / (pts - 1);
        mass.emplace_back(x, uniform(gen, 0.4, 1.0));
        pot.emplace_back(x, uniform(gen, -1, 1));
    }
    const auto interp = uniform(gen, 0, 1) < 0.5 ? weylscatter::CoefficientProfile::Interpolation::step
                                                 : weylscatter::CoefficientProfile::Interpolation::linear;
    return weylscatter::SLProblem(x_l, x_l + span,
                                  weylscatter::CoefficientProfile::sampled(mass, interp),
                                  weylscatter::CoefficientProfile::sampled(pot, interp));
}

/// λ draw for the Wronskian/Nevanlinna corpora: |λ| ≤ 4, Im λ ∈ [0, 2].
inline cplx random_lambda(std::mt19937_64& gen) {
    return cplx(uniform(gen, -4, 4), uniform(gen, 0, 2));
}

inline double max_abs_diff(const CMatrix& A, const CMatrix& B) { return (A - B).max_abs(); }

inline bool approx_equal(const CMatrix& A, const CMatrix& B, double tol) {
    return A.rows() == B.rows() && A.cols() == B.cols() && max_abs_diff(A, B) <= tol;
}

inline bool is_unitary(const CMatrix& U, double tol = 1e-10) {
    return weylscatter::unitary_defect(U) <= tol;
}

}  // namespace testkit
