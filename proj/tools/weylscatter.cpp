/**
 * @file weylscatter.cpp
 * @brief Command-line front end: grid sweeps, verification suites, Dirichlet
 *        eigenvalue listings, and the built-in preset catalog.
 *
 * Exit codes: 0 success, 1 config error (parse/validation/io), 2 numerical
 * failure (abort policy or unexpected evaluation error), 3 verification
 * failure.
 */

#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <weylscatter/weylscatter.hpp>

namespace {

using namespace weylscatter;

int do_sweep(const std::string& config_arg, int jobs) {
    const SweepConfig cfg = load_config(resolve_config_text(config_arg));
    const SweepOutput out = run_sweep_full(cfg, jobs);
    emit_to_path(out, cfg);
    return 0;
}

int do_verify(const std::string& config_arg, const std::vector<std::string>& suites,
              bool inject_sign_error) {
    static const std::set<std::string> known(verify_suite_names().begin(),
                                             verify_suite_names().end());
    VerifyOptions opt;
    opt.inject_sign_error = inject_sign_error;
    for (const std::string& s : suites) {
        if (s != "all" && !known.count(s))
            throw Error(errc::validation_error, "unknown suite '" + s + "'");
        opt.suites.insert(s);
    }
    const SweepConfig cfg = load_config(resolve_config_text(config_arg));
    const VerifyReport report = verify_suite(cfg, opt);
    std::printf("%s\n", verify_report_json(report).dump(2).c_str());
    return report.all_pass ? 0 : 3;
}

int do_eigen(const std::string& config_arg, double lambda_max) {
    const SweepConfig cfg = load_config(resolve_config_text(config_arg));
    if (cfg.problem.type == ProblemSpec::Type::delta)
        throw Error(errc::validation_error, "eigen needs an interval problem");
    const SLProblem problem(cfg.problem.x_l, cfg.problem.x_r, *cfg.problem.mass,
                            *cfg.problem.potential);
    for (double e : dirichlet_eigenvalues(problem, lambda_max)) std::printf("%.17g\n", e);
    return 0;
}

int do_presets(const std::string& show) {
    if (show.empty()) {
        for (const Preset& p : presets()) std::printf("%-24s %s\n", p.name.c_str(), p.description.c_str());
        return 0;
    }
    const Preset* p = find_preset(show);
    if (!p) throw Error(errc::validation_error, "unknown preset '" + show + "'");
    std::printf("%s", p->toml.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"matrix Weyl functions and scattering matrices of open quantum systems"};
    app.require_subcommand(1);

    std::string sweep_config;
    int jobs = 0;
    CLI::App* sweep = app.add_subcommand("sweep", "run a grid sweep and emit CSV or JSONL");
    sweep->add_option("config", sweep_config, "config file path or preset:<name>")->required();
    sweep->add_option("--jobs", jobs, "worker threads (0 = hardware default)");

    std::string verify_config;
    std::vector<std::string> suites;
    bool inject_sign_error = false;
    CLI::App* verify = app.add_subcommand("verify", "run verification suites, print a JSON report");
    verify->add_option("config", verify_config, "config file path or preset:<name>")->required();
    verify->add_option("--suite", suites,
                       "suite selection: all, unitarity, adamyan-arov, theorem-main, nevanlinna, "
                       "wronskian, oracle (repeatable; default all)");
    verify->add_flag("--inject-sign-error", inject_sign_error,
                     "corrupt the duality comparison on purpose (control fixture; must fail)");

    std::string eigen_config;
    double lambda_max = 0.0;
    CLI::App* eigen = app.add_subcommand("eigen", "list Dirichlet eigenvalues up to a bound");
    eigen->add_option("config", eigen_config, "config file path or preset:<name>")->required();
    eigen->add_option("--lambda-max", lambda_max, "upper energy bound")->required();

    std::string show;
    CLI::App* list = app.add_subcommand("presets", "list built-in configurations");
    list->add_option("--show", show, "print the named preset's config text");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sweep->parsed()) return do_sweep(sweep_config, jobs);
        if (verify->parsed()) return do_verify(verify_config, suites, inject_sign_error);
        if (eigen->parsed()) return do_eigen(eigen_config, lambda_max);
        return do_presets(show);
    } catch (const weylscatter::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        switch (e.code()) {
            case weylscatter::errc::parse_error:
            case weylscatter::errc::validation_error:
            case weylscatter::errc::io_error:
                return 1;
            default:
                return 2;  // aborted and unexpected numerical failures
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
