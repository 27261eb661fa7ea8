#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace mlfrac::cli;
    CLI::App app{"Time-fractional pseudo-differential system solver"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Options opt;
    std::string config, out;
    int threads = -1;
    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", config, "run configuration (JSON)");
        if (needs_config) c->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory (overrides the config)");
        sub->add_option("--threads", threads, "worker threads, 0 = all (default: MLFRAC_THREADS or 0)");
        sub->add_flag("--json", opt.json, "print a JSON summary on stdout");
    };

    auto* validate = app.add_subcommand("validate-symbol", "check the matrix symbol on the configured lattice");
    add_common(validate, true);

    auto* lin = app.add_subcommand("solve-linear", "solve the linear problem");
    add_common(lin, true);
    lin->add_flag("--emit-csv", opt.emit_csv, "also write CSV and gnuplot column files");

    auto* nonlin = app.add_subcommand("solve-nonlinear", "solve the nonlinear problem by Picard marching");
    add_common(nonlin, true);
    nonlin->add_flag("--emit-csv", opt.emit_csv, "also write CSV and gnuplot column files");

    auto* verify = app.add_subcommand("verify", "re-check a run against the L1 oracle");
    std::string manifest;
    verify->add_option("manifest", manifest, "manifest.json of a solve")->required();
    add_common(verify, false);

    auto* ml = app.add_subcommand("ml-eval", "evaluate the Mittag-Leffler function E_{rho,mu}(z)");
    double rho = 1.0, mu = 1.0;
    std::vector<double> z;
    ml->add_option("--rho", rho, "0 < rho <= 1")->required();
    ml->add_option("--mu", mu, "mu > 0")->default_val(1.0);
    ml->add_option("z", z, "arguments")->required()->allow_extra_args();
    ml->add_flag("--json", opt.json, "print JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    opt.config = config;
    if (!out.empty()) opt.out = out;
    if (threads >= 0) opt.threads = threads;

    try {
        if (*validate) return cmd_validate_symbol(opt);
        if (*lin) return cmd_solve(opt, false);
        if (*nonlin) return cmd_solve(opt, true);
        if (*verify) return cmd_verify(manifest, opt);
        if (*ml) return cmd_ml_eval(rho, mu, z, opt.json);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
