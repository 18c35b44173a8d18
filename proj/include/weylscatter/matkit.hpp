#pragma once

/**
 * @file matkit.hpp
 * @brief Dense complex matrix kernel for small (≲ 8×8) matrices.
 *
 * Provides the Hermitian calculus every scattering formula is built from:
 * Hermitian eigendecomposition (cyclic Jacobi), positive-semidefinite square
 * roots, range projectors with a relative rank threshold, linear solves with
 * conditioning diagnostics, and spectral norms.
 *
 * Matrices here are tiny, so robustness and reproducibility beat asymptotic
 * speed: the eigensolver is a cyclic Jacobi iteration (quadratically
 * convergent, unconditionally stable for Hermitian input), and condition
 * numbers are computed exactly from the inverse rather than estimated.
 *
 * All operations are pure functions on immutable values and safe for
 * unrestricted parallel use.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace weylscatter {

using cplx = std::complex<double>;

/// Error categories used across the library. Each maps to one failure mode
/// named in the operation contracts.
enum class errc {
    non_square,
    dimension_mismatch,
    non_finite,
    non_hermitian,
    not_psd,
    singular,
    near_pole,
    step_failure,
    profile_gap,
    invalid_profile,
    not_dissipative,
    not_selfadjoint,
    invalid_relation,
    wrong_half_plane,
    outside_domain,
    no_boundary_limit,
    evaluation_failed,
    parse_error,
    validation_error,
    io_error,
    aborted,
};

/// Stable machine-readable name for an error category (used in sweep flags).
inline const char* errc_name(errc c) {
    switch (c) {
        case errc::non_square: return "non_square";
        case errc::dimension_mismatch: return "dimension_mismatch";
        case errc::non_finite: return "non_finite";
        case errc::non_hermitian: return "non_hermitian";
        case errc::not_psd: return "not_psd";
        case errc::singular: return "singular";
        case errc::near_pole: return "near_pole";
        case errc::step_failure: return "step_failure";
        case errc::profile_gap: return "profile_gap";
        case errc::invalid_profile: return "invalid_profile";
        case errc::not_dissipative: return "not_dissipative";
        case errc::not_selfadjoint: return "not_selfadjoint";
        case errc::invalid_relation: return "invalid_relation";
        case errc::wrong_half_plane: return "wrong_half_plane";
        case errc::outside_domain: return "outside_domain";
        case errc::no_boundary_limit: return "no_boundary_limit";
        case errc::evaluation_failed: return "evaluation_failed";
        case errc::parse_error: return "parse_error";
        case errc::validation_error: return "validation_error";
        case errc::io_error: return "io_error";
        case errc::aborted: return "aborted";
    }
    return "unknown";
}

/// Exception type carrying an error category alongside the message.
class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

/**
 * @brief Dense complex matrix, row-major storage.
 *
 * Dimensions may be zero: trivial scattering channels are represented by 0×0
 * matrices with identity semantics (norm 0, unitarity defect 0). Entries are
 * validated finite on construction from data.
 */
class CMatrix {
public:
    CMatrix() : rows_(0), cols_(0) {}

    CMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
        if (rows < 0 || cols < 0)
            throw Error(errc::dimension_mismatch, "negative matrix dimension");
        a_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), cplx(0.0, 0.0));
    }

    CMatrix(int rows, int cols, std::vector<cplx> entries) : rows_(rows), cols_(cols), a_(std::move(entries)) {
        if (rows < 0 || cols < 0)
            throw Error(errc::dimension_mismatch, "negative matrix dimension");
        if (a_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
            throw Error(errc::dimension_mismatch, "entry count does not match rows*cols");
        if (!is_finite())
            throw Error(errc::non_finite, "matrix entries must be finite");
    }

    /// Build from nested initializer lists: CMatrix::from_rows({{a, b}, {c, d}}).
    static CMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
        const int r = static_cast<int>(rows.size());
        const int c = r > 0 ? static_cast<int>(rows.begin()->size()) : 0;
        std::vector<cplx> a;
        a.reserve(static_cast<std::size_t>(r) * c);
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != c)
                throw Error(errc::dimension_mismatch, "ragged initializer rows");
            a.insert(a.end(), row.begin(), row.end());
        }
        return CMatrix(r, c, std::move(a));
    }

    static CMatrix identity(int n) {
        CMatrix I(n, n);
        for (int i = 0; i < n; ++i) I(i, i) = 1.0;
        return I;
    }

    static CMatrix zeros(int rows, int cols) { return CMatrix(rows, cols); }

    static CMatrix diag(const std::vector<cplx>& d) {
        CMatrix D(static_cast<int>(d.size()), static_cast<int>(d.size()));
        for (int i = 0; i < D.rows(); ++i) D(i, i) = d[static_cast<std::size_t>(i)];
        return D;
    }

    static CMatrix diag_real(const std::vector<double>& d) {
        CMatrix D(static_cast<int>(d.size()), static_cast<int>(d.size()));
        for (int i = 0; i < D.rows(); ++i) D(i, i) = d[static_cast<std::size_t>(i)];
        return D;
    }

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }
    bool is_square() const noexcept { return rows_ == cols_; }

    cplx& operator()(int i, int j) { return a_[idx(i, j)]; }
    const cplx& operator()(int i, int j) const { return a_[idx(i, j)]; }

    bool is_finite() const noexcept {
        for (const cplx& z : a_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

    CMatrix adjoint() const {
        CMatrix B(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) B(j, i) = std::conj((*this)(i, j));
        return B;
    }

    CMatrix transpose() const {
        CMatrix B(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) B(j, i) = (*this)(i, j);
        return B;
    }

    CMatrix conjugate() const {
        CMatrix B(rows_, cols_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) B(i, j) = std::conj((*this)(i, j));
        return B;
    }

    cplx trace() const {
        if (!is_square()) throw Error(errc::non_square, "trace of a non-square matrix");
        cplx t = 0.0;
        for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    /// Largest entry magnitude (0 for empty matrices).
    double max_abs() const noexcept {
        double m = 0.0;
        for (const cplx& z : a_) m = std::max(m, std::abs(z));
        return m;
    }

    double frobenius_norm() const noexcept {
        double s = 0.0;
        for (const cplx& z : a_) s += std::norm(z);
        return std::sqrt(s);
    }

    /// Copy of the contiguous sub-block starting at (i0, j0) with shape (r, c).
    CMatrix block(int i0, int j0, int r, int c) const {
        if (i0 < 0 || j0 < 0 || r < 0 || c < 0 || i0 + r > rows_ || j0 + c > cols_)
            throw Error(errc::dimension_mismatch, "block indices out of range");
        CMatrix B(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) B(i, j) = (*this)(i0 + i, j0 + j);
        return B;
    }

    void set_block(int i0, int j0, const CMatrix& B) {
        if (i0 < 0 || j0 < 0 || i0 + B.rows() > rows_ || j0 + B.cols() > cols_)
            throw Error(errc::dimension_mismatch, "block assignment out of range");
        for (int i = 0; i < B.rows(); ++i)
            for (int j = 0; j < B.cols(); ++j) (*this)(i0 + i, j0 + j) = B(i, j);
    }

    friend CMatrix operator+(const CMatrix& A, const CMatrix& B) {
        require_same_shape(A, B, "operator+");
        CMatrix C = A;
        for (std::size_t k = 0; k < C.a_.size(); ++k) C.a_[k] += B.a_[k];
        return C;
    }

    friend CMatrix operator-(const CMatrix& A, const CMatrix& B) {
        require_same_shape(A, B, "operator-");
        CMatrix C = A;
        for (std::size_t k = 0; k < C.a_.size(); ++k) C.a_[k] -= B.a_[k];
        return C;
    }

    friend CMatrix operator-(const CMatrix& A) { return cplx(-1.0) * A; }

    friend CMatrix operator*(const cplx& s, const CMatrix& A) {
        CMatrix C = A;
        for (auto& z : C.a_) z *= s;
        return C;
    }

    friend CMatrix operator*(const CMatrix& A, const cplx& s) { return s * A; }

    friend CMatrix operator*(const CMatrix& A, const CMatrix& B) {
        if (A.cols_ != B.rows_)
            throw Error(errc::dimension_mismatch, "operator*: inner dimensions disagree");
        CMatrix C(A.rows_, B.cols_);
        for (int i = 0; i < A.rows_; ++i)
            for (int k = 0; k < A.cols_; ++k) {
                const cplx aik = A(i, k);
                if (aik == cplx(0.0)) continue;
                for (int j = 0; j < B.cols_; ++j) C(i, j) += aik * B(k, j);
            }
        return C;
    }

    friend bool operator==(const CMatrix& A, const CMatrix& B) {
        return A.rows_ == B.rows_ && A.cols_ == B.cols_ && A.a_ == B.a_;
    }

private:
    std::size_t idx(int i, int j) const {
        if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
            throw Error(errc::dimension_mismatch, "matrix index out of range");
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(j);
    }

    static void require_same_shape(const CMatrix& A, const CMatrix& B, const char* op) {
        if (A.rows_ != B.rows_ || A.cols_ != B.cols_)
            throw Error(errc::dimension_mismatch, std::string(op) + ": shape mismatch");
    }

    int rows_, cols_;
    std::vector<cplx> a_;
};

/// Block-diagonal composition of a list of square (or rectangular) matrices.
inline CMatrix block_diag(const std::vector<CMatrix>& blocks) {
    int r = 0, c = 0;
    for (const auto& B : blocks) {
        r += B.rows();
        c += B.cols();
    }
    CMatrix D(r, c);
    int i0 = 0, j0 = 0;
    for (const auto& B : blocks) {
        D.set_block(i0, j0, B);
        i0 += B.rows();
        j0 += B.cols();
    }
    return D;
}

/// Hermitian part (A + A*)/2.
inline CMatrix real_part(const CMatrix& A) {
    if (!A.is_square()) throw Error(errc::non_square, "real_part of a non-square matrix");
    CMatrix H(A.rows(), A.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) H(i, j) = 0.5 * (A(i, j) + std::conj(A(j, i)));
    return H;
}

/// Anti-Hermitian part rendered Hermitian: (A − A*)/(2i). Satisfies
/// imag_part(A) = −imag_part(A*) and vanishes exactly for Hermitian input.
inline CMatrix imag_part(const CMatrix& A) {
    if (!A.is_square()) throw Error(errc::non_square, "imag_part of a non-square matrix");
    const cplx half_over_i(0.0, -0.5);  // 1/(2i)
    CMatrix H(A.rows(), A.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) H(i, j) = half_over_i * (A(i, j) - std::conj(A(j, i)));
    return H;
}

/// Max-magnitude deviation from Hermitian symmetry.
inline double hermiticity_deviation(const CMatrix& H) {
    if (!H.is_square()) throw Error(errc::non_square, "hermiticity check on a non-square matrix");
    double d = 0.0;
    for (int i = 0; i < H.rows(); ++i)
        for (int j = i; j < H.cols(); ++j) d = std::max(d, std::abs(H(i, j) - std::conj(H(j, i))));
    return d;
}

/**
 * @brief Eigendecomposition H = U · diag(eigenvalues) · U* of a Hermitian matrix.
 *
 * Eigenvalues are real and sorted ascending; eigenvectors are the columns of
 * the unitary factor in matching order.
 */
struct HermitianDecomposition {
    std::vector<double> eigenvalues;  ///< ascending
    CMatrix eigenvectors;             ///< unitary, column k ↔ eigenvalues[k]
};

/**
 * @brief Hermitian eigendecomposition by cyclic Jacobi iteration.
 *
 * Each sweep annihilates every off-diagonal entry with a complex plane
 * rotation; convergence is quadratic. Input must be Hermitian within
 * 1e-10·max(1, ‖H‖_max); it is exactly symmetrized before iterating so the
 * result is invariant under roundoff-level asymmetry.
 */
inline HermitianDecomposition hermitian_eigen(const CMatrix& H) {
    if (!H.is_square()) throw Error(errc::non_square, "hermitian_eigen requires a square matrix");
    const int n = H.rows();
    if (hermiticity_deviation(H) > 1e-10 * std::max(1.0, H.max_abs()))
        throw Error(errc::non_hermitian, "hermitian_eigen: input is not Hermitian");

    HermitianDecomposition dec;
    dec.eigenvectors = CMatrix::identity(n);
    dec.eigenvalues.assign(static_cast<std::size_t>(n), 0.0);
    if (n == 0) return dec;

    CMatrix a = real_part(H);  // exact Hermitian symmetrization
    CMatrix& v = dec.eigenvectors;

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0, dia = 0.0;
        for (int p = 0; p < n; ++p) {
            dia += std::norm(a(p, p));
            for (int q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        }
        if (std::sqrt(off) <= 1e-15 * std::max(1.0, std::sqrt(dia + 2.0 * off))) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double r = std::abs(apq);
                const double local = std::abs(a(p, p)) + std::abs(a(q, q));
                if (r <= 1e-18 * std::max(1.0, local)) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                // Plane rotation G = [[c, s], [-conj(s), c]] on columns (p, q)
                // with s = sin(θ)·e^{iφ}, φ = arg(a_pq), zeroing a_pq in G*AG.
                const double phi = std::arg(apq);
                const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * r);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const cplx s = std::polar(t * c, phi);

                for (int k = 0; k < n; ++k) {  // A ← A·G
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - std::conj(s) * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {  // A ← G*·A
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = std::conj(s) * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {  // V ← V·G
                    const cplx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - std::conj(s) * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
                a(p, q) = a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&a](int i, int j) { return a(i, i).real() < a(j, j).real(); });

    CMatrix u(n, n);
    for (int j = 0; j < n; ++j) {
        dec.eigenvalues[static_cast<std::size_t>(j)] = a(order[static_cast<std::size_t>(j)], order[static_cast<std::size_t>(j)]).real();
        for (int i = 0; i < n; ++i) u(i, j) = v(i, order[static_cast<std::size_t>(j)]);
    }
    dec.eigenvectors = std::move(u);
    return dec;
}

/// Spectral norm (largest singular value), from the eigendecomposition of A*A.
inline double spectral_norm(const CMatrix& A) {
    if (A.empty()) return 0.0;
    const CMatrix G = A.adjoint() * A;
    const auto dec = hermitian_eigen(G);
    const double top = dec.eigenvalues.empty() ? 0.0 : dec.eigenvalues.back();
    return std::sqrt(std::max(0.0, top));
}

/**
 * @brief PSD square root of a Hermitian matrix with eigenvalue clipping.
 *
 * Eigenvalues in [−tol·scale, 0] (quadrature-level negative dips) are clipped
 * to zero; an eigenvalue below −tol·scale is a genuine violation and throws.
 * scale = max(1, ‖H‖). The result S is Hermitian PSD with S² reproducing the
 * clipped H to ~1e-14·scale.
 */
inline CMatrix psd_sqrt(const CMatrix& H, double tol = 1e-10) {
    const auto dec = hermitian_eigen(H);
    const int n = H.rows();
    const double emax = dec.eigenvalues.empty()
                            ? 0.0
                            : std::max(std::abs(dec.eigenvalues.front()), std::abs(dec.eigenvalues.back()));
    const double scale = std::max(1.0, emax);
    std::vector<double> root(dec.eigenvalues.size());
    for (std::size_t k = 0; k < dec.eigenvalues.size(); ++k) {
        const double e = dec.eigenvalues[k];
        if (e < -tol * scale)
            throw Error(errc::not_psd, "psd_sqrt: eigenvalue " + std::to_string(e) + " below -tol*scale");
        root[k] = e > 0.0 ? std::sqrt(e) : 0.0;
    }
    const CMatrix& U = dec.eigenvectors;
    CMatrix S(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < n; ++k) s += U(i, k) * root[static_cast<std::size_t>(k)] * std::conj(U(j, k));
            S(i, j) = s;
        }
    return real_part(S);  // exact Hermitian symmetrization
}

/// Orthogonal projector onto the numerical range of a Hermitian matrix.
struct RangeProjection {
    CMatrix projector;  ///< P with P² = P = P*
    int rank = 0;       ///< trace(P) rounded
};

/**
 * @brief Range/kernel split of a Hermitian matrix by eigenvalue magnitude.
 *
 * Range columns are the eigenvectors with |eigenvalue| > tol·max(1, ‖H‖),
 * ordered by descending eigenvalue with ties kept in ascending original
 * position (stable); kernel columns are the rest in ascending eigenvalue
 * order. The fixed, stable ordering makes every channel compression in the
 * scattering assembly reproducible — including for degenerate spectra, where
 * symmetric two-lead configurations would otherwise permute channels.
 */
struct EigenSplit {
    CMatrix range;                         ///< n×r, orthonormal columns
    std::vector<double> range_eigenvalues; ///< kept eigenvalues, descending
    CMatrix kernel;                        ///< n×(n−r), orthonormal columns
};

inline EigenSplit eigen_split(const CMatrix& H, double tol = 1e-10) {
    const auto dec = hermitian_eigen(H);
    const int n = H.rows();
    const double emax = dec.eigenvalues.empty()
                            ? 0.0
                            : std::max(std::abs(dec.eigenvalues.front()), std::abs(dec.eigenvalues.back()));
    const double cut = tol * std::max(1.0, emax);

    // hermitian_eigen sorts ascending with ties in original diagonal order, so
    // a stable descending re-sort keeps ties in that original order.
    std::vector<int> keep, drop;
    for (int k = 0; k < n; ++k)
        (std::abs(dec.eigenvalues[static_cast<std::size_t>(k)]) > cut ? keep : drop).push_back(k);
    std::stable_sort(keep.begin(), keep.end(), [&dec](int i, int j) {
        return dec.eigenvalues[static_cast<std::size_t>(i)] > dec.eigenvalues[static_cast<std::size_t>(j)];
    });

    EigenSplit sp;
    sp.range = CMatrix(n, static_cast<int>(keep.size()));
    sp.kernel = CMatrix(n, static_cast<int>(drop.size()));
    sp.range_eigenvalues.reserve(keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j) {
        sp.range_eigenvalues.push_back(dec.eigenvalues[static_cast<std::size_t>(keep[j])]);
        for (int i = 0; i < n; ++i) sp.range(i, static_cast<int>(j)) = dec.eigenvectors(i, keep[j]);
    }
    for (std::size_t j = 0; j < drop.size(); ++j)
        for (int i = 0; i < n; ++i) sp.kernel(i, static_cast<int>(j)) = dec.eigenvectors(i, drop[j]);
    return sp;
}

/**
 * @brief Range basis of a Hermitian matrix: eigenvectors with |eigenvalue| >
 *        tol·max(1, ‖H‖), ordered by descending eigenvalue (stable on ties).
 */
struct RangeBasis {
    CMatrix basis;                   ///< n×rank, orthonormal columns
    std::vector<double> eigenvalues; ///< kept eigenvalues, descending
};

inline RangeBasis range_basis(const CMatrix& H, double tol = 1e-10) {
    EigenSplit sp = eigen_split(H, tol);
    return RangeBasis{std::move(sp.range), std::move(sp.range_eigenvalues)};
}

/**
 * @brief Orthogonal projector onto span of eigenvectors with |eigenvalue| >
 *        tol·max(1, ‖H‖), plus its rank.
 */
inline RangeProjection range_projector(const CMatrix& H, double tol = 1e-10) {
    const RangeBasis rb = range_basis(H, tol);
    RangeProjection rp;
    rp.rank = rb.basis.cols();
    rp.projector = real_part(rb.basis * rb.basis.adjoint());
    return rp;
}

/// Linear solve result with conditioning diagnostics.
struct SolveResult {
    CMatrix X;                    ///< solution of A·X = B
    double cond = 1.0;            ///< ‖A‖·‖A⁻¹‖ in spectral norm, ≥ 1
    bool ill_conditioned = false; ///< cond > 1e12 — caller decides
};

namespace detail {

/// LU factorization with partial pivoting, in place. Returns the permutation;
/// throws errc::singular when a pivot falls below 1e-14·scale.
inline std::vector<int> lu_factor(CMatrix& A, double scale) {
    const int n = A.rows();
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(A(k, k));
        for (int i = k + 1; i < n; ++i)
            if (std::abs(A(i, k)) > best) {
                best = std::abs(A(i, k));
                piv = i;
            }
        if (best < 1e-14 * scale)
            throw Error(errc::singular, "solve: pivot below 1e-14*scale at column " + std::to_string(k));
        if (piv != k) {
            std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(piv)]);
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
        }
        const cplx pivot = A(k, k);
        for (int i = k + 1; i < n; ++i) {
            const cplx m = A(i, k) / pivot;
            A(i, k) = m;
            for (int j = k + 1; j < n; ++j) A(i, j) -= m * A(k, j);
        }
    }
    return perm;
}

/// Solve with a precomputed LU factorization.
inline CMatrix lu_solve(const CMatrix& LU, const std::vector<int>& perm, const CMatrix& B) {
    const int n = LU.rows();
    CMatrix X(n, B.cols());
    for (int col = 0; col < B.cols(); ++col) {
        std::vector<cplx> y(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            cplx s = B(perm[static_cast<std::size_t>(i)], col);
            for (int j = 0; j < i; ++j) s -= LU(i, j) * y[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = s;
        }
        for (int i = n - 1; i >= 0; --i) {
            cplx s = y[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < n; ++j) s -= LU(i, j) * X(j, col);
            X(i, col) = s / LU(i, i);
        }
    }
    return X;
}

}  // namespace detail

/**
 * @brief Solve A·X = B by LU with partial pivoting; report the exact condition
 *        number ‖A‖·‖A⁻¹‖.
 *
 * Throws errc::singular when a pivot falls below 1e-14·scale (scale = largest
 * entry magnitude of A). An ill-conditioned but nonsingular system is solved
 * and flagged (cond > 1e12); the caller decides whether to trust it.
 */
inline SolveResult solve(const CMatrix& A, const CMatrix& B) {
    if (!A.is_square()) throw Error(errc::non_square, "solve requires a square A");
    if (A.rows() != B.rows()) throw Error(errc::dimension_mismatch, "solve: B row count mismatch");

    SolveResult res;
    if (A.rows() == 0) {
        res.X = CMatrix(0, B.cols());
        return res;
    }
    const double scale = std::max(A.max_abs(), std::numeric_limits<double>::min());
    CMatrix LU = A;
    const auto perm = detail::lu_factor(LU, scale);
    res.X = detail::lu_solve(LU, perm, B);
    const CMatrix Ainv = detail::lu_solve(LU, perm, CMatrix::identity(A.rows()));
    res.cond = std::max(1.0, spectral_norm(A) * spectral_norm(Ainv));
    res.ill_conditioned = res.cond > 1e12;
    return res;
}

/// Inverse via solve(A, I).
inline CMatrix inverse(const CMatrix& A) { return solve(A, CMatrix::identity(A.rows())).X; }

/// Deviation from unitarity, ‖U*U − I‖ in spectral norm (0 for empty input).
inline double unitary_defect(const CMatrix& U) {
    if (!U.is_square()) throw Error(errc::non_square, "unitary_defect requires a square matrix");
    if (U.empty()) return 0.0;
    return spectral_norm(U.adjoint() * U - CMatrix::identity(U.rows()));
}

}  // namespace weylscatter
