#include "commands.hpp"

#include "config.hpp"

#include "mlfrac/field_io.hpp"
#include "mlfrac/linear.hpp"
#include "mlfrac/mlf.hpp"
#include "mlfrac/nonlinear.hpp"
#include "mlfrac/oracle.hpp"
#include "mlfrac/parallel.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

namespace mlfrac::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void write_json(const fs::path& path, const json& doc) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw FormatError("cannot write " + path.string());
    os << doc.dump(2) << "\n";
}

fs::path output_dir(const Options& opt, const RunConfig& cfg) {
    const fs::path dir = opt.out ? *opt.out : fs::path(cfg.output);
    fs::create_directories(dir);
    return dir;
}

json report_json(const ValidationReport& r, const MatrixSymbol& sym) {
    json j;
    j["solver_admissible"] = r.solver_admissible();
    j["structural_ok"] = r.structural_ok();
    j["hermitian_ok"] = r.hermitian_ok;
    j["hermitian_violations"] = r.hermitian_violations;
    j["order_dominance_ok"] = r.order_dominance_ok;
    j["dominance_violations"] = r.dominance_violations;
    j["diagonal_homogeneous_ok"] = r.diagonal_homogeneous_ok;
    j["non_homogeneous_diagonals"] = r.non_homogeneous_diagonals;
    j["diagonal_elliptic_ok"] = r.diagonal_elliptic_ok;
    j["non_elliptic_diagonals"] = r.non_elliptic_diagonals;
    j["lattice_hermitian_defect"] = r.lattice_hermitian_defect;
    j["r0"] = r.r0;
    j["min_eigenvalue"] = r.min_eigenvalue;
    j["nonpositive_count"] = r.nonpositive_count;
    json pts = json::array();
    for (const auto& p : r.nonpositive_points) {
        pts.push_back({{"index", p.index}, {"radius", p.radius}, {"min_eigenvalue", p.min_eigenvalue}});
    }
    j["nonpositive_points"] = pts;
    json orders = json::array();
    for (int a = 0; a < sym.m(); ++a) {
        json row = json::array();
        for (int b = 0; b < sym.m(); ++b) row.push_back(sym.order(a, b));
        orders.push_back(row);
    }
    j["orders"] = orders;
    j["summary"] = r.summary();
    return j;
}

// Gershgorin segments and eigenvalues at a handful of lattice points of increasing radius.
json gershgorin_table(const MatrixSymbol& sym, const SpectralGrid& grid) {
    std::vector<std::size_t> order(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p) order[p] = p;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return grid.xi_norm(a) < grid.xi_norm(b); });
    json rows = json::array();
    const std::size_t picks = std::min<std::size_t>(8, grid.size());
    for (std::size_t i = 0; i < picks; ++i) {
        const std::size_t p = order[i * (grid.size() - 1) / std::max<std::size_t>(1, picks - 1)];
        const Eigen::VectorXd xi = grid.xi(p);
        const Eigen::MatrixXcd A = eval_symbol(sym, xi);
        json row;
        row["xi"] = std::vector<double>(xi.data(), xi.data() + xi.size());
        try {
            const auto seg = gershgorin_segments(A);
            const Eigen::VectorXd lam = eig_hermitian(A).lambdas;
            bool contained = true;
            for (double l : lam) {
                const double slack = 1e-12 * (1.0 + std::abs(l));
                contained = contained && std::any_of(seg.begin(), seg.end(), [&](const auto& s) { return s.contains(l, slack); });
            }
            json segs = json::array();
            for (const auto& s : seg) segs.push_back({s.center, s.radius});
            row["segments"] = segs;
            row["eigenvalues"] = std::vector<double>(lam.data(), lam.data() + lam.size());
            row["contained"] = contained;
        } catch (const Error& e) {
            row["error"] = std::string(e.name()) + ": " + e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

json picard_json(const PicardReport& r) {
    json j;
    j["c1"] = r.c1;
    j["t1"] = r.t1;
    j["K0"] = r.K0;
    j["K1"] = r.K1;
    j["sobolev_index"] = r.sobolev_index;
    j["gronwall_bound"] = r.gronwall_bound;
    j["max_solution_norm"] = r.max_solution_norm;
    j["converged"] = r.converged;
    j["lipschitz"] = {{"samples", r.lipschitz.samples},
                      {"violations", r.lipschitz.violations},
                      {"max_ratio", r.lipschitz.max_ratio},
                      {"warning", r.lipschitz_warning}};
    json subs = json::array();
    for (const auto& s : r.subintervals) {
        subs.push_back({{"t_start", s.t_start},
                        {"t_end", s.t_end},
                        {"iterations", s.iterations},
                        {"final_delta", s.final_delta},
                        {"contraction_factor", s.contraction_factor},
                        {"delta_bound", s.delta_bound},
                        {"fixed_point_residual", s.fixed_point_residual}});
    }
    j["subintervals"] = subs;
    return j;
}

std::string field_name(std::size_t i, const char* ext) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "u_%04zu.%s", i, ext);
    return buf;
}

void say(const Options& opt, const std::string& msg) {
    if (!opt.json) std::cout << msg << "\n";
}

} // namespace

unsigned resolve_threads(const std::optional<int>& flag) {
    if (flag) {
        if (*flag < 0) throw ConfigError("--threads must be nonnegative");
        return static_cast<unsigned>(*flag);
    }
    if (const char* env = std::getenv("MLFRAC_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 0) throw ConfigError("MLFRAC_THREADS must be a nonnegative integer");
        return static_cast<unsigned>(v);
    }
    return 0;
}

int cmd_validate_symbol(const Options& opt) {
    RunConfig cfg;
    try {
        set_thread_count(resolve_threads(opt.threads));
        cfg = load_config(opt.config);
    } catch (const Error& e) {
        std::cerr << e.name() << ": " << e.what() << "\n";
        return kConfigError;
    }
    const fs::path dir = output_dir(opt, cfg);
    json out;
    out["tool"] = "mlfrac";
    out["version"] = kVersion;
    out["config_hash"] = config_hash(cfg.raw);
    int code = kOk;
    try {
        const ValidationReport r = validate_conditions_A(cfg.symbol, cfg.grid);
        out["report"] = report_json(r, cfg.symbol);
        out["gershgorin"] = gershgorin_table(cfg.symbol, cfg.grid);
        json asym = json::array();
        for (const auto& row : corollary_asymptotics_check(cfg.symbol, {4.0, 16.0, 64.0})) {
            asym.push_back({{"radius", row.radius}, {"max_deviation", row.max_deviation}});
        }
        out["asymptotics"] = asym;
        if (!r.solver_admissible()) code = kFailure;
    } catch (const ValidationFailure& e) {
        out["report"] = report_json(e.report(), cfg.symbol);
        code = kFailure;
    }
    out["status"] = code == kOk ? "admissible" : "rejected";
    write_json(dir / "validation.json", out);
    if (opt.json) {
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << out["report"]["summary"].get<std::string>() << "\n";
        for (const auto& v : out["report"]["dominance_violations"]) {
            std::cout << "order dominance violated by entry (" << v[0].get<int>() << "," << v[1].get<int>()
                      << ") against diagonal " << v[1].get<int>() << "\n";
        }
        std::cout << "status: " << out["status"].get<std::string>() << " (report " << (dir / "validation.json").string() << ")\n";
    }
    return code;
}

int cmd_solve(const Options& opt, bool nonlinear) {
    const auto t_start = Clock::now();
    RunConfig cfg;
    unsigned threads = 0;
    try {
        threads = resolve_threads(opt.threads);
        cfg = load_config(opt.config);
    } catch (const Error& e) {
        std::cerr << e.name() << ": " << e.what() << "\n";
        return kConfigError;
    }
    set_thread_count(threads);
    const fs::path dir = output_dir(opt, cfg);

    json manifest;
    manifest["tool"] = "mlfrac";
    manifest["version"] = kVersion;
    manifest["command"] = nonlinear ? "solve-nonlinear" : "solve-linear";
    manifest["config_hash"] = config_hash(cfg.raw);
    manifest["config"] = cfg.raw;
    manifest["config_base_dir"] = cfg.base_dir.string();
    manifest["threads"] = thread_count();
    manifest["warnings"] = json::array();
    manifest["fields"] = json::array();
    json timing;

    auto finish = [&](int code, const std::string& status) {
        timing["total_s"] = seconds_since(t_start);
        manifest["timing"] = timing;
        manifest["status"] = status;
        write_json(dir / "manifest.json", manifest);
        if (opt.json) {
            std::cout << manifest.dump(2) << "\n";
        } else {
            std::cout << "status: " << status << " (manifest " << (dir / "manifest.json").string() << ")\n";
        }
        return code;
    };
    auto fail_with = [&](const Error& e, int code, const std::string& status) {
        manifest["error"] = {{"name", e.name()}, {"message", e.what()}};
        std::cerr << e.name() << ": " << e.what() << "\n";
        return finish(code, status);
    };

    std::optional<Propagator> prop;
    auto t0 = Clock::now();
    try {
        prop.emplace(cfg.grid, cfg.symbol, cfg.beta);
        json v;
        v["report"] = report_json(prop->report(), cfg.symbol);
        write_json(dir / "validation.json", v);
        manifest["validation_report"] = "validation.json";
    } catch (const ValidationFailure& e) {
        json v;
        v["report"] = report_json(e.report(), cfg.symbol);
        write_json(dir / "validation.json", v);
        manifest["validation_report"] = "validation.json";
        timing["validate_s"] = seconds_since(t0);
        return fail_with(e, kFailure, "error");
    } catch (const Error& e) {
        return fail_with(e, kFailure, "error");
    }
    timing["validate_s"] = seconds_since(t0);

    const double tail = boundary_mass_fraction(cfg.Phi);
    manifest["initial_boundary_mass"] = tail;
    if (tail > 1e-8) {
        const std::string w = "initial data carries boundary-band mass fraction " + std::to_string(tail) +
                              " > 1e-8; periodic wrap-around may be visible";
        manifest["warnings"].push_back(w);
        std::cerr << "warning: " << w << "\n";
    }

    std::vector<StateField> fields;
    std::vector<bool> converged_flags;
    int code = kOk;
    std::string status = "ok";
    t0 = Clock::now();
    try {
        if (!nonlinear) {
            fields = solve_linear(*prop, cfg.Phi, cfg.make_source(false), cfg.t_out, {cfg.solver.T, cfg.solver.time_steps});
        } else {
            NonlinearRHS rhs;
            rhs.forcing = cfg.make_source(true);
            if (cfg.nonlinear) {
                rhs.nonlinearity = cfg.nonlinear->fn;
                rhs.L0 = cfg.nonlinear->L0;
            }
            try {
                NonlinearResult res = solve_nonlinear(*prop, cfg.Phi, rhs, cfg.t_out, cfg.solver);
                fields = std::move(res.fields);
                manifest["picard"] = picard_json(res.report);
                if (res.report.lipschitz_warning) {
                    const std::string w = "LipschitzViolationWarning: declared L0 exceeded in " +
                                          std::to_string(res.report.lipschitz.violations) + " of " +
                                          std::to_string(res.report.lipschitz.samples) + " samples";
                    manifest["warnings"].push_back(w);
                    std::cerr << "warning: " << w << "\n";
                }
            } catch (const NoConvergence& e) {
                fields = e.partial();
                manifest["picard"] = picard_json(e.report());
                manifest["error"] = {{"name", e.name()}, {"message", e.what()}};
                std::cerr << e.name() << ": " << e.what() << "\n";
                code = kNoConvergence;
                status = "no-convergence";
            }
        }
    } catch (const Error& e) {
        timing["solve_s"] = seconds_since(t0);
        return fail_with(e, kFailure, "error");
    }
    timing["solve_s"] = seconds_since(t0);

    t0 = Clock::now();
    double exact_err = 0.0;
    bool have_exact = false;
    for (std::size_t i = 0; i < cfg.t_out.size(); ++i) {
        json entry;
        entry["t"] = cfg.t_out[i];
        if (i < fields.size()) {
            const std::string bin = field_name(i, "bin");
            write_field(dir / bin, fields[i]);
            entry["path"] = bin;
            entry["converged"] = true;
            if (opt.emit_csv) {
                write_field_csv(dir / field_name(i, "csv"), fields[i]);
                write_gnuplot_columns(dir / field_name(i, "dat"), fields[i]);
                entry["csv"] = field_name(i, "csv");
                entry["gnuplot"] = field_name(i, "dat");
            }
            if (const auto ex = cfg.exact(cfg.t_out[i])) {
                const double e = (fields[i].data - ex->data).cwiseAbs().maxCoeff();
                entry["exact_error"] = e;
                exact_err = std::max(exact_err, e);
                have_exact = true;
            }
        } else {
            entry["path"] = nullptr;
            entry["converged"] = false;
        }
        manifest["fields"].push_back(entry);
    }
    if (have_exact) manifest["max_exact_error"] = exact_err;
    timing["write_s"] = seconds_since(t0);
    say(opt, "wrote " + std::to_string(fields.size()) + " of " + std::to_string(cfg.t_out.size()) + " fields to " + dir.string());
    return finish(code, status);
}

int cmd_verify(const fs::path& manifest_path, const Options& opt) {
    json manifest;
    RunConfig cfg;
    std::vector<std::pair<double, StateField>> stored;
    bool nonlinear = false;
    const fs::path mdir = manifest_path.parent_path().empty() ? fs::path(".") : manifest_path.parent_path();
    try {
        set_thread_count(resolve_threads(opt.threads));
        std::ifstream is(manifest_path);
        if (!is) throw FormatError("cannot open manifest " + manifest_path.string());
        manifest = json::parse(is);
        cfg = parse_config(manifest.at("config"), manifest.at("config_base_dir").get<std::string>());
        nonlinear = manifest.at("command").get<std::string>() == "solve-nonlinear";
        for (const auto& f : manifest.at("fields")) {
            if (f.at("path").is_null()) continue;
            StateField u = read_field(mdir / f.at("path").get<std::string>());
            if (!(u.grid == cfg.grid) || u.m() != cfg.m()) throw GridMismatch("stored field does not match the configured grid");
            stored.emplace_back(f.at("t").get<double>(), to_physical(u));
        }
        if (stored.empty()) throw FormatError("manifest lists no field files");
    } catch (const json::exception& e) {
        std::cerr << "FormatError: manifest " << manifest_path.string() << ": " << e.what() << "\n";
        return kConfigError;
    } catch (const Error& e) {
        std::cerr << e.name() << ": " << e.what() << "\n";
        return kConfigError;
    }
    const fs::path dir = opt.out ? *opt.out : mdir;
    fs::create_directories(dir);

    OracleProblem pb;
    pb.sym = cfg.symbol;
    pb.beta = cfg.beta;
    pb.Phi = cfg.Phi;
    pb.forcing = cfg.make_source(nonlinear);
    if (nonlinear && cfg.nonlinear) pb.nonlinearity = cfg.nonlinear->fn;
    pb.dealias = cfg.solver.dealias;

    const double T = cfg.solver.T;
    const int N = cfg.solver.time_steps;
    // Each output time gets its own oracle grid ending exactly at that time,
    // with about the spacing T / (N 2^level).
    std::vector<std::vector<double>> disc(2, std::vector<double>(stored.size(), 0.0));
    double scale = 1.0;
    try {
        for (int level = 0; level < 2; ++level) {
            for (std::size_t i = 0; i < stored.size(); ++i) {
                const double t = stored[i].first;
                StateField ref = to_physical(cfg.Phi);
                if (t > 0.0) {
                    const int steps = std::max(8, static_cast<int>(std::lround(t / T * (N << level))));
                    ref = l1_field_march(pb, TimeGrid{t, steps}, {steps})[0];
                }
                disc[static_cast<std::size_t>(level)][i] = (stored[i].second.data - ref.data).cwiseAbs().maxCoeff();
                scale = std::max(scale, ref.data.cwiseAbs().maxCoeff());
            }
        }
    } catch (const Error& e) {
        std::cerr << e.name() << ": " << e.what() << "\n";
        return kFailure;
    }

    double coarse = 0.0, fine = 0.0;
    for (std::size_t i = 0; i < stored.size(); ++i) {
        coarse = std::max(coarse, disc[0][i]);
        fine = std::max(fine, disc[1][i]);
    }
    const double rel = fine / scale;
    const double rate = fine > 0.0 ? std::log2(coarse / fine) : INFINITY;
    const bool rate_applies = rel > 1e-12;
    const bool pass = rel <= cfg.verify.max_discrepancy && (!rate_applies || rate >= cfg.verify.min_rate);

    {
        std::ofstream csv(dir / "verify.csv", std::ios::trunc);
        csv << "t,steps_coarse,discrepancy_coarse,steps_fine,discrepancy_fine,rate\n";
        csv.precision(17);
        for (std::size_t i = 0; i < stored.size(); ++i) {
            const double r = disc[1][i] > 0.0 ? std::log2(disc[0][i] / disc[1][i]) : 0.0;
            csv << stored[i].first << "," << N << "," << disc[0][i] << "," << 2 * N << "," << disc[1][i] << "," << r << "\n";
        }
    }
    json summary;
    summary["tool"] = "mlfrac";
    summary["version"] = kVersion;
    summary["manifest"] = manifest_path.string();
    summary["oracle"] = "implicit L1 march";
    summary["steps"] = {N, 2 * N};
    summary["max_discrepancy"] = {coarse, fine};
    summary["relative_discrepancy"] = rel;
    summary["refinement_rate"] = rate_applies ? json(rate) : json(nullptr);
    summary["thresholds"] = {{"max_discrepancy", cfg.verify.max_discrepancy}, {"min_rate", cfg.verify.min_rate}};
    summary["pass"] = pass;
    write_json(dir / "verify.json", summary);
    if (opt.json) {
        std::cout << summary.dump(2) << "\n";
    } else {
        std::cout << "oracle discrepancy " << fine << " (relative " << rel << "), rate "
                  << (rate_applies ? std::to_string(rate) : std::string("n/a")) << ": " << (pass ? "PASS" : "FAIL") << "\n";
    }
    return pass ? kOk : kFailure;
}

int cmd_ml_eval(double rho, double mu, const std::vector<double>& z, bool as_json) {
    json rows = json::array();
    int code = kOk;
    for (double x : z) {
        try {
            const MLEvalResult r = ml_eval({rho, mu}, x);
            if (as_json) {
                rows.push_back({{"rho", rho}, {"mu", mu}, {"z", x}, {"value", r.value},
                                {"regime", std::string(to_string(r.regime))}, {"est_abs_error", r.est_abs_error}});
            } else {
                char buf[160];
                std::snprintf(buf, sizeof buf, "E_{%g,%g}(%.17g) = %.17g  [%s, est. error %.2e]", rho, mu, x, r.value,
                              std::string(to_string(r.regime)).c_str(), r.est_abs_error);
                std::cout << buf << "\n";
            }
        } catch (const Error& e) {
            code = kFailure;
            if (as_json) {
                rows.push_back({{"rho", rho}, {"mu", mu}, {"z", x}, {"error", e.name()}, {"message", e.what()}});
            } else {
                std::cerr << e.name() << ": " << e.what() << "\n";
            }
        }
    }
    if (as_json) std::cout << rows.dump(2) << "\n";
    return code;
}

} // namespace mlfrac::cli
