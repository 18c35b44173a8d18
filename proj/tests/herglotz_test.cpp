/**
 * @file herglotz_test.cpp
 * @brief Branch convention, tagged energies, boundary-value extraction, and
 *        the Nevanlinna property audit over the built-in families.
 */

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace weylscatter;
using testkit::approx_equal;
using testkit::max_abs_diff;

namespace {

constexpr double kPi = 3.14159265358979323846;

bool has_code(const Error& e, errc c) { return e.code() == c; }

}  // namespace

TEST_CASE("sqrt_branch implements the cut along [0, inf)", "[herglotz]") {
    REQUIRE(sqrt_branch(cplx(4.0, 0.0)) == cplx(2.0, 0.0));
    REQUIRE(std::abs(sqrt_branch(cplx(-1.0, 0.0)) - cplx(0.0, 1.0)) < 1e-15);
    REQUIRE(sqrt_branch(cplx(0.0, 0.0)) == cplx(0.0, 0.0));

    SECTION("Im sqrt_branch > 0 off the cut, both half-planes") {
        auto gen = testkit::rng(11);
        for (int k = 0; k < 50; ++k) {
            const cplx z(testkit::uniform(gen, -5, 5),
                         testkit::uniform(gen, 0.01, 5) * (k % 2 ? 1.0 : -1.0));
            const cplx r = sqrt_branch(z);
            REQUIRE(r.imag() > 0.0);
            REQUIRE(std::abs(r * r - z) < 1e-12 * std::abs(z));
        }
    }

    SECTION("branch jump across the cut: sqrt(mu - i eps) ~ -sqrt(mu + i eps)") {
        for (double mu : {0.3, 1.0, 2.0, 7.5, 40.0}) {
            const cplx above = sqrt_branch(cplx(mu, 1e-12));
            const cplx below = sqrt_branch(cplx(mu, -1e-12));
            REQUIRE(std::abs(above + below) < 1e-6);
        }
    }
}

TEST_CASE("EnergyPoint tags must match the imaginary part", "[herglotz]") {
    REQUIRE_NOTHROW(EnergyPoint::upper(cplx(1.0, 0.5)));
    REQUIRE_NOTHROW(EnergyPoint::lower(cplx(1.0, -0.5)));
    REQUIRE_NOTHROW(EnergyPoint::above(2.0));
    REQUIRE_NOTHROW(EnergyPoint::below(2.0));

    REQUIRE_THROWS_MATCHES(EnergyPoint::upper(cplx(1.0, -0.5)), Error,
                           Catch::Matchers::Predicate<Error>(
                               [](const Error& e) { return has_code(e, errc::wrong_half_plane); }));
    REQUIRE_THROWS_AS(EnergyPoint::lower(cplx(1.0, 0.0)), Error);
    REQUIRE_THROWS_AS(EnergyPoint(cplx(1.0, 0.5), HalfPlane::real_boundary_from_above), Error);

    SECTION("at() infers the tag") {
        REQUIRE(EnergyPoint::at(cplx(1, 2)).half_plane == HalfPlane::upper);
        REQUIRE(EnergyPoint::at(cplx(1, -2)).half_plane == HalfPlane::lower);
        REQUIRE(EnergyPoint::at(cplx(1, 0)).half_plane == HalfPlane::real_boundary_from_above);
    }
}

TEST_CASE("delta family closed form and boundary values", "[herglotz]") {
    const HerglotzFamily fam = delta_weyl_family();

    SECTION("M(1 + i0) = i/2") {
        const CMatrix M = boundary_value(fam, 1.0);
        REQUIRE(std::abs(M(0, 0) - cplx(0.0, 0.5)) < 1e-15);
    }

    SECTION("below the cut the boundary value is real (negative energies)") {
        const CMatrix M = boundary_value(fam, -1.0);
        REQUIRE(std::abs(M(0, 0).imag()) < 1e-15);
        REQUIRE(M(0, 0).real() == Catch::Approx(0.5));  // i/(2i) = 1/2
    }

    SECTION("from-below evaluation is the adjoint of from-above") {
        const CMatrix above = eval_point(fam, EnergyPoint::above(2.0));
        const CMatrix below = eval_point(fam, EnergyPoint::below(2.0));
        REQUIRE(max_abs_diff(below, above.adjoint()) == 0.0);
    }

    SECTION("branch point is outside the real domain") {
        REQUIRE_FALSE(fam.real_domain(0.0));
        REQUIRE(fam.real_domain(0.5));
        REQUIRE_THROWS_MATCHES(boundary_value(fam, 0.0), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return has_code(e, errc::outside_domain);
                               }));
    }

    SECTION("eval_upper rejects the closed lower half-plane") {
        REQUIRE_NOTHROW(eval_upper(fam, cplx(1.0, 0.1)));
        REQUIRE_THROWS_AS(eval_upper(fam, cplx(1.0, -0.1)), Error);
        REQUIRE_THROWS_AS(eval_upper(fam, cplx(1.0, 0.0)), Error);
    }
}

TEST_CASE("Nevanlinna audit passes for every built-in family", "[herglotz][property]") {
    auto gen = testkit::rng(22);
    std::vector<EnergyPoint> samples;
    for (int k = 0; k < 50; ++k) {
        const double re = testkit::uniform(gen, -8, 8);
        const double im = testkit::uniform(gen, 0.05, 4) * (k % 2 ? 1.0 : -1.0);
        samples.push_back(EnergyPoint::at(cplx(re, im)));
    }

    const std::vector<HerglotzFamily> families = {
        delta_weyl_family(),
        lead_tau_family(0.0, 0.5, 0.5, 0.6),
        const_interval_weyl_family(kPi, 0.0, 0.5),
        const_interval_weyl_family(1.7, -2.0, 1.3),
    };
    for (const HerglotzFamily& fam : families) {
        double scale = 1.0;
        for (const EnergyPoint& pt : samples)
            scale = std::max(scale, spectral_norm(fam.evaluator(pt.value)));
        const NevanlinnaReport rep = check_nevanlinna(fam, samples);
        INFO("family " << fam.label);
        REQUIRE(rep.max_negative_eig <= 1e-10 * scale);
        REQUIRE(rep.max_symmetry_defect <= 1e-12 * scale);
    }
}

TEST_CASE("Nevanlinna non-example is caught by the audit", "[herglotz]") {
    // F(λ) = conj(λ)·I is holomorphic nowhere it matters: Im F < 0 on C₊.
    HerglotzFamily bad;
    bad.dim = 2;
    bad.label = "conjugate";
    bad.evaluator = [](cplx lambda) {
        return CMatrix(std::conj(lambda) * CMatrix::identity(2));
    };
    bad.real_domain = [](double) { return true; };

    const cplx z(0.7, 1.3);
    const NevanlinnaReport rep = check_nevanlinna(bad, {EnergyPoint::upper(z)});
    // The positivity defect is the full |Im λ| here.
    REQUIRE(rep.max_negative_eig >= 0.9 * std::abs(z.imag()));
    REQUIRE(rep.max_negative_eig == Catch::Approx(std::abs(z.imag())).margin(1e-12));

    SECTION("on-axis samples are rejected") {
        REQUIRE_THROWS_AS(check_nevanlinna(bad, {EnergyPoint::above(1.0)}), Error);
    }
}

TEST_CASE("lead function: thresholds, open channels, realizability growth", "[herglotz]") {
    const HerglotzFamily tau = lead_tau_family(0.0, 2.0, 0.5, 0.5);

    SECTION("real domain is all of the real axis") {
        for (double mu : {-3.0, 0.0, 1.0, 2.0, 9.0}) REQUIRE(tau.real_domain(mu));
    }

    SECTION("entries are real below threshold, imaginary above") {
        const CMatrix below = boundary_value(tau, 1.0);  // channel 2 closed
        REQUIRE(below(0, 0).imag() > 0.0);
        REQUIRE(std::abs(below(1, 1).imag()) < 1e-15);
        REQUIRE(below(1, 1).real() < 0.0);  // i·i|k| = −|k|

        const CMatrix above = boundary_value(tau, 3.0);  // both open
        REQUIRE(above(0, 0).imag() > 0.0);
        REQUIRE(above(1, 1).imag() > 0.0);
    }

    SECTION("limit behavior that realizability requires") {
        // τ(iy)/y → 0 and y·Im τ(iy) → ∞ along the imaginary axis.
        const auto at = [&tau](double y) { return tau.evaluator(cplx(0.0, y)); };
        const double y1 = 1e3, y2 = 1e6;
        REQUIRE(spectral_norm(at(y2)) / y2 < spectral_norm(at(y1)) / y1);
        REQUIRE(spectral_norm(at(y2)) / y2 < 1e-2);
        const double g1 = y1 * hermitian_eigen(imag_part(at(y1))).eigenvalues.front();
        const double g2 = y2 * hermitian_eigen(imag_part(at(y2))).eigenvalues.front();
        REQUIRE(g2 > 10.0 * g1);
    }

    SECTION("invalid masses are rejected") {
        REQUIRE_THROWS_AS(lead_tau_family(0.0, 0.0, 0.0, 0.5), Error);
        REQUIRE_THROWS_AS(lead_tau_family(0.0, 0.0, 0.5, -1.0), Error);
    }
}

TEST_CASE("constant-interval family: oracle value and pole structure", "[herglotz]") {
    // Free problem on (0, π) with m = 1/2: Dirichlet eigenvalues are n².
    const HerglotzFamily fam = const_interval_weyl_family(kPi, 0.0, 0.5);

    SECTION("M(1/4) = [[0, 1/2], [1/2, 0]]") {
        const CMatrix M = boundary_value(fam, 0.25);
        const CMatrix expect = CMatrix::from_rows({{0.0, 0.5}, {0.5, 0.0}});
        REQUIRE(max_abs_diff(M, expect) < 1e-14);
    }

    SECTION("Dirichlet eigenvalues are excluded from the real domain") {
        REQUIRE_FALSE(fam.real_domain(1.0));
        REQUIRE_FALSE(fam.real_domain(4.0));
        REQUIRE(fam.real_domain(0.5));
        REQUIRE(fam.real_domain(2.5));
        REQUIRE_THROWS_MATCHES(fam.evaluator(cplx(1.0, 0.0)), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) {
                                   return has_code(e, errc::near_pole);
                               }));
    }

    SECTION("symmetry M = M^T at complex energies") {
        auto gen = testkit::rng(33);
        for (int k = 0; k < 20; ++k) {
            const CMatrix M = fam.evaluator(testkit::random_lambda(gen) + cplx(0, 0.05));
            REQUIRE(std::abs(M(0, 1) - M(1, 0)) < 1e-12 * std::max(1.0, M.max_abs()));
        }
    }

    SECTION("parameter validation") {
        REQUIRE_THROWS_AS(const_interval_weyl_family(0.0, 0.0, 0.5), Error);
        REQUIRE_THROWS_AS(const_interval_weyl_family(1.0, 0.0, -0.5), Error);
    }
}

TEST_CASE("direct and ladder boundary values agree on smooth points", "[herglotz][property]") {
    // Thresholds/poles of these families sit outside (0.3, 0.9), so every
    // sample is an analytic point where the ladder must converge.
    const std::vector<HerglotzFamily> families = {
        delta_weyl_family(),
        lead_tau_family(0.0, 0.0, 0.5, 0.6),
        const_interval_weyl_family(kPi, 0.0, 0.5),
    };
    for (const HerglotzFamily& fam : families) {
        int checked = 0;
        for (int k = 0; k < 20; ++k) {
            // Points spread over (0.3, 0.9): inside every family's smooth
            // region, away from band edges and the λ = 1 Dirichlet pole.
            const double mu = 0.3 + 0.6 * k / 20.0;
            if (!fam.real_domain(mu)) continue;
            const CMatrix direct = boundary_value(fam, mu, BoundaryMode::direct());
            const CMatrix ladder = boundary_value(fam, mu, BoundaryMode::ladder());
            INFO("family " << fam.label << " at mu = " << mu);
            REQUIRE(max_abs_diff(direct, ladder) < 1e-6);
            ++checked;
        }
        REQUIRE(checked == 20);
    }
}

TEST_CASE("ladder fails honestly at a branch point", "[herglotz]") {
    // F(λ) = i·√λ approaches its boundary value at μ = 0 like √ε — no
    // asymptotic expansion in ε, so Richardson extrapolation must give up.
    HerglotzFamily fam;
    fam.dim = 1;
    fam.label = "band_edge";
    fam.evaluator = [](cplx lambda) {
        return CMatrix(1, 1, {cplx(0.0, 1.0) * sqrt_branch(lambda)});
    };
    fam.real_domain = [](double) { return true; };

    REQUIRE_THROWS_MATCHES(boundary_value(fam, 0.0, BoundaryMode::ladder()), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                               return has_code(e, errc::no_boundary_limit);
                           }));
    // Away from the branch point the same family extrapolates fine.
    REQUIRE_NOTHROW(boundary_value(fam, 2.0, BoundaryMode::ladder()));
}

TEST_CASE("block-diagonal composition stacks families", "[herglotz]") {
    const HerglotzFamily fam = block_diag_family({delta_weyl_family(), lead_tau_family(0.0, 0.0, 0.5, 0.5)});
    REQUIRE(fam.dim == 3);

    const cplx z(1.0, 0.7);
    const CMatrix F = fam.evaluator(z);
    const CMatrix top = delta_weyl_family().evaluator(z);
    const CMatrix bot = lead_tau_family(0.0, 0.0, 0.5, 0.5).evaluator(z);
    REQUIRE(F(0, 0) == top(0, 0));
    REQUIRE(F(1, 1) == bot(0, 0));
    REQUIRE(F(2, 2) == bot(1, 1));
    REQUIRE(F(0, 1) == cplx(0.0));

    // Real domain is the intersection: the delta branch point still bites.
    REQUIRE_FALSE(fam.real_domain(0.0));
    REQUIRE(fam.real_domain(1.5));
}

TEST_CASE("boundary_value validates its mode parameters", "[herglotz]") {
    const HerglotzFamily fam = delta_weyl_family();
    REQUIRE_THROWS_AS(boundary_value(fam, 1.0, BoundaryMode::ladder(-1.0)), Error);
    REQUIRE_THROWS_AS(boundary_value(fam, 1.0, BoundaryMode::ladder(1e-3, 1)), Error);
}

TEST_CASE("evaluator dimension mismatches are caught at the seam", "[herglotz]") {
    HerglotzFamily fam;
    fam.dim = 2;
    fam.label = "liar";
    fam.evaluator = [](cplx) { return CMatrix::identity(3); };
    fam.real_domain = [](double) { return true; };
    REQUIRE_THROWS_MATCHES(eval_upper(fam, cplx(0, 1)), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                               return has_code(e, errc::evaluation_failed);
                           }));
}
