/**
 * @file acceptance_test.cpp
 * @brief End-to-end acceptance gate: eleven numbered criteria, one pass/fail
 *        line each, nonzero exit when any fails.
 *
 * Every criterion checks the pipeline against an independent oracle: a closed
 * form, a hand-derived spot value, a conserved quantity, or a second numerical
 * route that shares no code with the first.
 */

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "support.hpp"

using namespace weylscatter;

namespace {

constexpr double kPi = 3.14159265358979323846;

int g_failures = 0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

void run(int id, const char* name, const std::function<Outcome()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = fn();
    } catch (const std::exception& e) {
        out.pass = false;
        out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %2d %-28s %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", id, name,
                out.detail.c_str(), secs);
    std::fflush(stdout);
    if (!out.pass) ++g_failures;
}

/// Both barrier presets, swept once and shared by criteria 4-6.
struct PresetRun {
    SweepConfig cfg;
    SweepOutput out;
};

const PresetRun& barrier_fixed() {
    static const PresetRun r = [] {
        PresetRun p;
        p.cfg = load_config(find_preset("barrier_dissipative")->toml);
        p.out = run_sweep_full(p.cfg);
        return p;
    }();
    return r;
}

const PresetRun& barrier_leads() {
    static const PresetRun r = [] {
        PresetRun p;
        p.cfg = load_config(find_preset("barrier_transmitting")->toml);
        p.out = run_sweep_full(p.cfg);
        return p;
    }();
    return r;
}

SLProblem problem_of(const SweepConfig& cfg) {
    return SLProblem(cfg.problem.x_l, cfg.problem.x_r, *cfg.problem.mass, *cfg.problem.potential);
}

SLProblem free_interval() {
    return SLProblem(0.0, kPi, CoefficientProfile::constant(0.5),
                     CoefficientProfile::constant(0.0));
}

// -------------------------------------------------------------------------
// Criteria
// -------------------------------------------------------------------------

Outcome criterion_delta_closed_form() {
    const auto t0 = std::chrono::steady_clock::now();
    const HerglotzFamily fam = delta_weyl_family();
    double max_err = 0.0;
    for (double alpha : {-2.0, -0.5, 0.5, 2.0}) {
        CMatrix H(1, 1);
        H(0, 0) = cplx(-1.0 / alpha);
        const SelfAdjointRelation R = graph_relation(H);
        for (int j = 0; j < 50; ++j) {
            const double lam =
                std::exp(std::log(0.01) + j * (std::log(100.0) - std::log(0.01)) / 49.0);
            const CMatrix M = boundary_value(fam, lam);
            const CMatrix S = s_selfadjoint(M, R).value;
            const double root = 2.0 * std::sqrt(lam);
            const cplx closed = cplx(root, -alpha) / cplx(root, alpha);
            max_err = std::max(max_err, std::abs(S(0, 0) - closed));
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {max_err < 1e-12 && secs < 1.0, fmt("max |S - closed| = %.2e over 200 pairs", max_err)};
}

Outcome criterion_shooting_vs_closed_form() {
    const auto t0 = std::chrono::steady_clock::now();
    auto gen = testkit::rng(20260819);
    double max_rel = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const double L = testkit::uniform(gen, 0.1, 5.0);
        const double v0 = testkit::uniform(gen, -5.0, 5.0);
        const double m0 = testkit::uniform(gen, 0.1, 2.0);
        // Energies near/above the potential keep both routes well-scaled.
        const cplx lam(v0 + testkit::uniform(gen, -1.0, 10.0), testkit::uniform(gen, 0.1, 5.0));

        // Sampled step profiles force the adaptive integrator; the closed-form
        // family knows nothing about the ODE path.
        const SLProblem rk(0.0, L,
                           CoefficientProfile::sampled({{0.0, m0}},
                                                       CoefficientProfile::Interpolation::step),
                           CoefficientProfile::sampled({{0.0, v0}},
                                                       CoefficientProfile::Interpolation::step));
        const CMatrix numeric = weyl_matrix(rk, lam);
        const CMatrix closed = const_interval_weyl_family(L, v0, m0).evaluator(lam);
        max_rel = std::max(max_rel, spectral_norm(numeric - closed) / spectral_norm(closed));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {max_rel < 1e-8 && secs < 10.0, fmt("max rel err = %.2e over 100 problems", max_rel)};
}

Outcome criterion_dirichlet_spectrum() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> eigs = dirichlet_eigenvalues(free_interval(), 10.0);
    double max_err = 1.0;
    if (eigs.size() == 3) {
        max_err = 0.0;
        for (int n = 1; n <= 3; ++n)
            max_err = std::max(max_err, std::abs(eigs[static_cast<std::size_t>(n - 1)] - n * n));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {eigs.size() == 3 && max_err < 1e-9 && secs < 1.0,
            fmt("%.0f found, max |e_n - n^2| = %.2e", static_cast<double>(eigs.size()), max_err)};
}

Outcome criterion_unitarity() {
    int valid = 0;
    double max_defect = 0.0;
    for (const PresetRun* pr : {&barrier_fixed(), &barrier_leads()}) {
        for (const SweepRow& row : pr->out.rows) {
            if (!row.flags.empty()) continue;
            ++valid;
            max_defect = std::max(max_defect, row.unitarity_defect);
        }
    }
    return {valid >= 200 && max_defect < 1e-8,
            fmt("max defect = %.2e over %.0f clean grid points", max_defect, valid)};
}

Outcome criterion_contraction() {
    double max_excess = 0.0;
    for (const SweepRow& row : barrier_fixed().out.rows) {
        if (!row.flags.empty()) continue;
        max_excess = std::max(max_excess, row.contraction_excess);
    }
    // The lead-coupled grid has no contraction slots of its own; check the
    // energy-parameterized characteristic function at the boundary directly.
    const SweepConfig& cfg = barrier_leads().cfg;
    const SLProblem problem = problem_of(cfg);
    const HerglotzFamily mfam = sl_weyl_family(problem, cfg.guards.tol_pole);
    const HerglotzFamily tfam =
        lead_tau_family(cfg.coupling.v_l, cfg.coupling.v_r, cfg.coupling.m_l, cfg.coupling.m_r);
    for (const SweepRow& row : barrier_leads().out.rows) {
        if (!row.flags.empty()) continue;
        const CMatrix Mminus = boundary_value(mfam, row.lambda).adjoint();
        const CMatrix tau = boundary_value(tfam, row.lambda);
        const CMatrix W = straus_char(Mminus, tau);
        max_excess = std::max(max_excess, std::max(0.0, spectral_norm(W) - 1.0));
    }
    return {max_excess <= 1e-10, fmt("max(0, norm - 1) = %.2e across both grids", max_excess)};
}

Outcome criterion_adamyan_arov() {
    int valid = 0;
    double max_res = 0.0;
    for (const PresetRun* pr : {&barrier_fixed(), &barrier_leads()}) {
        for (const SweepRow& row : pr->out.rows) {
            if (!row.flags.empty()) continue;
            ++valid;
            max_res = std::max(max_res, row.cells[5].value);  // adamyan-arov slot
        }
    }

    // Spot value on the half-line model with D = -i/2 at lambda = 1: the
    // scattering corner and the characteristic adjoint both vanish there.
    const HerglotzFamily fam = delta_weyl_family();
    CMatrix D(1, 1);
    D(0, 0) = cplx(0.0, -0.5);
    const CMatrix M1 = boundary_value(fam, 1.0);
    const double side_lp = spectral_norm(s_laxphillips(M1, D).value);
    const double side_char = spectral_norm(char_function(M1.adjoint(), D));
    const double spot = residual_adamyan_arov(fam, D, 1.0);
    const bool spot_ok = side_lp < 1e-12 && side_char < 1e-12 && spot < 1e-12;

    return {valid >= 200 && max_res < 1e-10 && spot_ok,
            fmt("max residual = %.2e over %.0f points; spot values vanish", max_res, valid)};
}

Outcome criterion_theorem_main() {
    const SweepConfig& cfg = barrier_leads().cfg;
    const SLProblem problem = problem_of(cfg);
    const HerglotzFamily mfam = sl_weyl_family(problem, cfg.guards.tol_pole);
    const HerglotzFamily tfam =
        lead_tau_family(cfg.coupling.v_l, cfg.coupling.v_r, cfg.coupling.m_l, cfg.coupling.m_r);

    auto gen = testkit::rng(77);
    int done = 0;
    double max_res = 0.0;
    for (int attempt = 0; attempt < 5000 && done < 50; ++attempt) {
        const double mu = testkit::uniform(gen, cfg.grid.min, cfg.grid.max);
        if (!mfam.real_domain(mu)) continue;
        max_res = std::max(max_res, residual_theorem_main(mfam, tfam, mu));
        ++done;
    }

    // Spot value: free interval at mu = 1/4, both assemblies give the pure
    // antidiagonal -i (full transmission at quarter energy).
    const HerglotzFamily mfree = sl_weyl_family(free_interval());
    const HerglotzFamily tfree = lead_tau_family(0.0, 0.0, 0.5, 0.5);
    const CMatrix M = boundary_value(mfree, 0.25);
    const CMatrix tau = boundary_value(tfree, 0.25);
    CMatrix expect = CMatrix::zeros(2, 2);
    expect(0, 1) = cplx(0.0, -1.0);
    expect(1, 0) = cplx(0.0, -1.0);
    const double spot_coupled = testkit::max_abs_diff(s_coupled(M, tau).value, expect);
    const double spot_energydep = testkit::max_abs_diff(s_energydep(M, tau).value, expect);

    return {done == 50 && max_res < 1e-10 && spot_coupled < 1e-12 && spot_energydep < 1e-12,
            fmt("max residual = %.2e at 50 random energies; spot err %.2e", max_res,
                std::max(spot_coupled, spot_energydep))};
}

Outcome criterion_route_consistency() {
    auto gen = testkit::rng(88);
    double max_res = 0.0;
    for (int k = 0; k < 50; ++k) {
        const int n = 1 + k % 3;
        const CMatrix M = testkit::random_boundary_value(gen, n);
        const CMatrix D = testkit::random_dissipative(gen, n);
        max_res = std::max(max_res, residual_relation_consistency(M, D, RelationRoute::dilation));
    }
    for (int k = 0; k < 50; ++k) {
        const int n = 1 + k % 3;
        const CMatrix M = testkit::random_boundary_value(gen, n);
        const CMatrix tau = testkit::random_boundary_value(gen, n);
        max_res = std::max(max_res, residual_relation_consistency(M, tau, RelationRoute::coupling));
    }
    return {max_res < 1e-10, fmt("max route difference = %.2e over 100 instances", max_res)};
}

Outcome criterion_free_transmission() {
    const HerglotzFamily mfam = sl_weyl_family(free_interval());
    const HerglotzFamily tfam = lead_tau_family(0.0, 0.0, 0.5, 0.5);
    double max_diag = 0.0, max_mod = 0.0, max_closed = 0.0;
    bool shape_ok = true;
    for (int k = 1; k <= 100; ++k) {
        const double lam = 0.9 * k / 100.0;
        const CMatrix M = boundary_value(mfam, lam);
        const CMatrix tau = boundary_value(tfam, lam);
        const CMatrix S = s_coupled(M, tau).value;
        shape_ok = shape_ok && S.rows() == 2;
        max_diag = std::max(max_diag, std::max(std::abs(S(0, 0)), std::abs(S(1, 1))));
        max_mod = std::max(max_mod, std::abs(std::abs(S(0, 1)) - 1.0));
        const cplx closed = -std::exp(cplx(0.0, std::sqrt(lam) * kPi));
        max_closed = std::max(max_closed, std::abs(S(0, 1) - closed));
    }
    return {shape_ok && max_diag < 1e-10 && max_mod < 1e-10 && max_closed < 1e-9,
            fmt("max |diag| = %.2e, max ||S12|-1| = %.2e", max_diag, max_mod)};
}

Outcome criterion_boundary_limits() {
    const SLProblem free_prob = free_interval();
    const HerglotzFamily fams[] = {delta_weyl_family(), lead_tau_family(0.0, 0.0, 0.5, 0.5),
                                   const_interval_weyl_family(kPi, 0.0, 0.5),
                                   sl_weyl_family(free_prob)};
    double max_diff = 0.0;
    for (const HerglotzFamily& fam : fams) {
        const bool interval = fam.dim == 2 && fam.label != "lead_tau";
        for (int j = 0; j < 20; ++j) {
            // Interval families have their first pole at lambda = 1; stay below.
            const double mu = interval ? 0.04 + j * (0.86 / 19.0) : 0.5 + 0.5 * j;
            const CMatrix direct = boundary_value(fam, mu, BoundaryMode::direct());
            const CMatrix ladder = boundary_value(fam, mu, BoundaryMode::ladder());
            max_diff = std::max(max_diff, testkit::max_abs_diff(direct, ladder));
        }
    }
    return {max_diff < 1e-6, fmt("max |direct - ladder| = %.2e, 20 points x 4 families", max_diff)};
}

Outcome criterion_property_suites() {
    const auto t0 = std::chrono::steady_clock::now();
    auto gen = testkit::rng(111);
    int corpus_failures = 0;

    // Nevanlinna positivity and reflection symmetry on random integral-shape
    // families evaluated on both half-planes.
    for (int k = 0; k < 6; ++k) {
        const int n = 1 + k % 3;
        const HerglotzFamily fam = testkit::random_nevanlinna_family(gen, n);
        std::vector<EnergyPoint> samples;
        for (int s = 0; s < 12; ++s) {
            const double im = (s % 3 == 0) ? 0.4 : (s % 3 == 1) ? 1.3 : -0.8;
            samples.push_back(EnergyPoint::at(cplx(testkit::uniform(gen, -4.0, 4.0), im)));
        }
        const NevanlinnaReport rep = check_nevanlinna(fam, samples);
        if (rep.max_negative_eig > 1e-10 || rep.max_symmetry_defect > 1e-10) ++corpus_failures;
    }

    // Wronskian conservation across random profiles, solvers, and energies.
    for (int k = 0; k < 30; ++k) {
        const SLProblem p = testkit::random_sl_problem(gen, k >= 20);
        const ShootingResult sh = propagate(p, testkit::random_lambda(gen));
        if (sh.wronskian_defect > 1e-9 + 1e-13 * sh.scale() * sh.scale()) ++corpus_failures;
    }

    // Projector idempotency (with rank-deficient inputs mixed in).
    for (int k = 0; k < 20; ++k) {
        const int n = 2 + k % 3;
        const CMatrix H = testkit::random_psd(gen, n, k % 2 == 0 ? -1 : n - 1);
        const CMatrix P = range_projector(H).projector;
        const double defect = std::max((P * P - P).max_abs(), (P - P.adjoint()).max_abs());
        const double containment = (P * H - H).max_abs();
        if (defect > 1e-12 || containment > 1e-10 * std::max(1.0, H.max_abs())) ++corpus_failures;
    }

    // Every verification suite over every shipped preset.
    int suites_failed = 0;
    for (const Preset& preset : presets()) {
        const VerifyReport report = verify_suite(load_config(preset.toml));
        if (!report.all_pass) ++suites_failed;
    }

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {corpus_failures == 0 && suites_failed == 0 && secs < 60.0,
            fmt("%.0f corpus failures, %.0f preset verify failures", corpus_failures,
                suites_failed)};
}

}  // namespace

int main() {
    std::printf("acceptance: 11 criteria\n");
    run(1, "delta closed form", criterion_delta_closed_form);
    run(2, "shooting vs closed form", criterion_shooting_vs_closed_form);
    run(3, "dirichlet spectrum", criterion_dirichlet_spectrum);
    run(4, "unitarity on presets", criterion_unitarity);
    run(5, "contraction bounds", criterion_contraction);
    run(6, "scattering-characteristic duality", criterion_adamyan_arov);
    run(7, "coupled vs energy-parameterized", criterion_theorem_main);
    run(8, "relation route consistency", criterion_route_consistency);
    run(9, "free-line transmission", criterion_free_transmission);
    run(10, "boundary-limit ladder", criterion_boundary_limits);
    run(11, "property suites", criterion_property_suites);
    std::printf("acceptance: %d of 11 criteria failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
