#include "mlfrac/nonlinear.hpp"

#include "mlfrac/mlf.hpp"
#include "mlfrac/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mlfrac {

double estimate_c1(const Propagator& prop, double L0, double t1) {
    if (!(L0 >= 0.0)) throw DomainError("L0 must be nonnegative");
    if (!(t1 > 0.0)) throw DomainError("t1 must be positive");
    if (L0 == 0.0) return 0.0;
    const double beta = prop.beta();
    // E_{beta,beta}(-x) is completely monotone for x >= 0, so the supremum over
    // eta in (0, t1] for any nonnegative eigenvalue is the eta -> 0 limit.
    double c_ker = 0.0;
    for (double lam : prop.distinct_lambdas()) {
        c_ker = std::max(c_ker, lam >= 0.0 ? rgamma(beta) : std::abs(mittag_leffler(beta, beta, -lam * std::pow(t1, beta))));
    }
    const double m = prop.m();
    return m * m * c_ker * L0 / beta;
}

double gronwall_bound(double K0, double K1, double rho, double t) {
    if (!(K0 >= 0.0) || !(K1 >= 0.0) || !(t >= 0.0)) throw DomainError("gronwall_bound needs K0, K1, t >= 0");
    if (!(rho > 0.0 && rho <= 1.0)) throw DomainError("gronwall_bound needs rho in (0, 1]");
    if (K0 == 0.0) return 0.0;
    return K0 * mittag_leffler(rho, 1.0, K1 * std::pow(t, rho));
}

LipschitzAudit audit_lipschitz(const NonlinearRHS& rhs, const SpectralGrid& grid, int m, double T, int samples,
                               std::uint64_t seed) {
    LipschitzAudit audit;
    if (!rhs.nonlinearity || samples <= 0) return audit;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scales[] = {0.01, 1.0, 10.0};
    std::vector<double> x(static_cast<std::size_t>(grid.dim()));
    std::vector<cplx> y(static_cast<std::size_t>(m)), z(y), hy(y), hz(y);
    for (int s = 0; s < samples; ++s) {
        const double t = T * unit(rng);
        for (int d = 0; d < grid.dim(); ++d) x[d] = grid.extent(d) * (unit(rng) - 0.5);
        const double sy = scales[s % 3];
        const double sz = unit(rng) < 0.5 ? sy : 1e-3 * sy;
        double dist = 0.0;
        for (int k = 0; k < m; ++k) {
            y[k] = sy * cplx(normal(rng), normal(rng));
            z[k] = y[k] + sz * cplx(normal(rng), normal(rng));
            dist += std::abs(y[k] - z[k]);
        }
        rhs.nonlinearity(t, x, y, hy);
        rhs.nonlinearity(t, x, z, hz);
        double worst = 0.0;
        for (int j = 0; j < m; ++j) worst = std::max(worst, std::abs(hy[j] - hz[j]));
        ++audit.samples;
        if (dist == 0.0) continue;
        const double ratio = worst / dist;
        audit.max_ratio = std::max(audit.max_ratio, ratio);
        if (worst > rhs.L0 * dist * (1.0 + 1e-12) + 1e-300) ++audit.violations;
    }
    return audit;
}

namespace {

// Evaluation of H(t, x, U) for the march, in modal coordinates.
class RhsEvaluator {
public:
    RhsEvaluator(const Propagator& prop, const NonlinearRHS& rhs, bool dealias)
        : prop_(prop), rhs_(rhs), dealias_(dealias) {}

    /// Frequency-space H(t, ., U) for a frequency-space U.
    StateField frequency(double t, const StateField& Uhat) const {
        StateField H = rhs_.forcing.at(t, prop_.grid(), prop_.m());
        if (rhs_.nonlinearity) H.data += pointwise(t, Uhat).data;
        return H;
    }

    /// Dealiased transform of the pointwise nonlinearity only.
    StateField pointwise(double t, const StateField& Uhat) const {
        const auto& g = prop_.grid();
        const int m = prop_.m();
        const StateField U = to_physical(Uhat);
        StateField N(g, m, Space::physical);
        parallel_for(g.size(), [&](std::size_t p) {
            const auto row = static_cast<Eigen::Index>(p);
            const Eigen::VectorXd x = g.x(p);
            std::vector<cplx> u(static_cast<std::size_t>(m)), out(static_cast<std::size_t>(m));
            for (int k = 0; k < m; ++k) u[k] = U.data(row, k);
            rhs_.nonlinearity(t, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), u, out);
            for (int k = 0; k < m; ++k) N.data(row, k) = out[k];
        });
        StateField Nhat = fft_forward(N);
        if (dealias_) dealias_two_thirds(Nhat);
        return Nhat;
    }

private:
    const Propagator& prop_;
    const NonlinearRHS& rhs_;
    bool dealias_;
};

// d(Y, Z) = sum_k max_t ||y_k - z_k||_{L2} over nodes [first, last], from modal differences.
double d_metric(const Propagator& prop, const std::vector<Eigen::MatrixXcd>& a, const std::vector<Eigen::MatrixXcd>& b,
                int first, int last) {
    const int m = prop.m();
    Eigen::VectorXd worst = Eigen::VectorXd::Zero(m);
    const double vol = prop.grid().box_volume();
    for (int n = first; n <= last; ++n) {
        const StateField diff = from_modal(prop, a[static_cast<std::size_t>(n)] - b[static_cast<std::size_t>(n)]);
        for (int k = 0; k < m; ++k) worst[k] = std::max(worst[k], std::sqrt(diff.data.col(k).squaredNorm() / vol));
    }
    return worst.sum();
}

double d_norm(const Propagator& prop, const std::vector<Eigen::MatrixXcd>& a, int first, int last) {
    const int m = prop.m();
    Eigen::VectorXd worst = Eigen::VectorXd::Zero(m);
    const double vol = prop.grid().box_volume();
    for (int n = first; n <= last; ++n) {
        const StateField f = from_modal(prop, a[static_cast<std::size_t>(n)]);
        for (int k = 0; k < m; ++k) worst[k] = std::max(worst[k], std::sqrt(f.data.col(k).squaredNorm() / vol));
    }
    return worst.sum();
}

} // namespace

NonlinearResult solve_nonlinear(const Propagator& prop, const StateField& Phi, const NonlinearRHS& rhs,
                                const std::vector<double>& t_out, const SolveConfig& cfg) {
    if (!(cfg.T > 0.0) || cfg.time_steps < 2) throw DomainError("solve_nonlinear needs T > 0 and time_steps >= 2");
    if (cfg.max_picard_iters < 1) throw DomainError("max_picard_iters must be at least 1");
    if (!(cfg.picard_tol > 0.0)) throw DomainError("picard_tol must be positive");
    if (!(cfg.target_delta > 0.0 && cfg.target_delta < 1.0)) throw DomainError("target_delta must lie in (0, 1)");
    if (!(rhs.L0 >= 0.0)) throw DomainError("declared L0 must be nonnegative");
    if (!(Phi.grid == prop.grid()) || Phi.m() != prop.m()) throw GridMismatch("initial data does not match the grid");
    for (double t : t_out) {
        if (!(t >= 0.0 && t <= cfg.T * (1.0 + 1e-12))) throw DomainError("output time outside [0, T]");
    }

    const LinearControl control{cfg.T, cfg.time_steps};
    NonlinearResult result;
    PicardReport& rep = result.report;
    const int N = cfg.time_steps;
    const double h = cfg.T / N;
    const double beta = prop.beta();
    const auto& grid = prop.grid();
    const int m = prop.m();
    rep.sobolev_index = grid.dim() / 2.0 + 0.5 + prop.symbol().tau_star();

    if (rhs.is_zero()) {
        result.fields = solve_linear(prop, Phi, SourceSpec::zero(), t_out, control);
        rep.converged = true;
        rep.t1 = cfg.T;
        rep.subintervals.push_back({0.0, cfg.T, 1, 0.0, 0.0, 0.0, 0.0});
        rep.K0 = sobolev_norm(Phi, rep.sobolev_index);
        rep.gronwall_bound = rep.K0;
        for (const auto& f : result.fields) rep.max_solution_norm = std::max(rep.max_solution_norm, sobolev_norm(f, rep.sobolev_index));
        return result;
    }

    rep.lipschitz = audit_lipschitz(rhs, grid, m, cfg.T, cfg.lipschitz_samples, cfg.seed);
    rep.lipschitz_warning = rep.lipschitz.violations > 0;

    rep.c1 = estimate_c1(prop, rhs.L0, cfg.T);
    const double t1_ideal = rep.c1 > 0.0 ? std::pow(cfg.target_delta / rep.c1, 1.0 / beta) : cfg.T;
    const int block = std::clamp(static_cast<int>(std::floor(t1_ideal / h * (1.0 + 1e-12))), 1, N);
    rep.t1 = block * h;

    const RhsEvaluator eval(prop, rhs, cfg.dealias);
    const DuhamelWeights w = duhamel_weights(prop, h, N);
    const StateField Phat = to_frequency(Phi);
    const Eigen::MatrixXcd phi_modal = to_modal(prop, Phat);

    // Free evolution F_n = E_beta(-lambda t_n^beta) phi in modal coordinates.
    std::vector<Eigen::MatrixXcd> F(static_cast<std::size_t>(N) + 1);
    for (int n = 0; n <= N; ++n) {
        const Eigen::VectorXd f = propagator_factors(prop, n * h);
        Eigen::MatrixXcd Fn(phi_modal.rows(), m);
        for (std::size_t p = 0; p < grid.size(); ++p) {
            const auto row = static_cast<Eigen::Index>(p);
            for (int q = 0; q < m; ++q) Fn(row, q) = f[prop.lambda_index(p, q)] * phi_modal(row, q);
        }
        F[static_cast<std::size_t>(n)] = std::move(Fn);
    }

    std::vector<Eigen::MatrixXcd> V(static_cast<std::size_t>(N) + 1);
    std::vector<Eigen::MatrixXcd> g(static_cast<std::size_t>(N) + 1);
    std::vector<StateField> Hnodes(static_cast<std::size_t>(N) + 1);
    V[0] = phi_modal;
    auto node_rhs = [&](int n) {
        Hnodes[static_cast<std::size_t>(n)] = eval.frequency(n * h, from_modal(prop, V[static_cast<std::size_t>(n)]));
        g[static_cast<std::size_t>(n)] = to_modal(prop, Hnodes[static_cast<std::size_t>(n)]);
    };
    node_rhs(0);

    // Coefficient of g_j in W_n: A_{n-j} (j >= 1) + B_{n-j-1} (j <= n-1).
    auto accumulate = [&](int n, int j_first, int j_last, Eigen::MatrixXcd& out) {
        parallel_for(grid.size(), [&](std::size_t p) {
            const auto row = static_cast<Eigen::Index>(p);
            for (int q = 0; q < m; ++q) {
                const auto li = static_cast<std::size_t>(prop.lambda_index(p, q));
                const Eigen::VectorXd& A = w.A[li];
                const Eigen::VectorXd& B = w.B[li];
                cplx s = 0.0;
                for (int j = j_first; j <= j_last; ++j) {
                    double c = 0.0;
                    if (j >= 1) c += A[n - j];
                    if (j <= n - 1) c += B[n - j - 1];
                    s += c * g[static_cast<std::size_t>(j)](row, q);
                }
                out(row, q) += s;
            }
        });
    };

    const double floor_scale = 1e3 * std::numeric_limits<double>::epsilon();
    bool all_converged = true;
    int converged_until = 0;
    for (int n0 = 0; n0 < N; n0 += block) {
        const int n1 = std::min(N, n0 + block);
        SubintervalReport sub;
        sub.t_start = n0 * h;
        sub.t_end = n1 * h;
        sub.delta_bound = rep.c1 * std::pow(sub.t_end - sub.t_start, beta);

        // Frozen history from completed subintervals.
        std::vector<Eigen::MatrixXcd> base(static_cast<std::size_t>(n1 - n0));
        for (int n = n0 + 1; n <= n1; ++n) {
            Eigen::MatrixXcd b = F[static_cast<std::size_t>(n)];
            accumulate(n, 0, n0, b);
            base[static_cast<std::size_t>(n - n0 - 1)] = std::move(b);
        }
        for (int n = n0 + 1; n <= n1; ++n) {
            V[static_cast<std::size_t>(n)] = V[static_cast<std::size_t>(n0)];
            node_rhs(n);
        }

        auto sweep = [&](std::vector<Eigen::MatrixXcd>& next) {
            for (int n = n0 + 1; n <= n1; ++n) {
                Eigen::MatrixXcd v = base[static_cast<std::size_t>(n - n0 - 1)];
                accumulate(n, n0 + 1, n, v);
                next[static_cast<std::size_t>(n)] = std::move(v);
            }
        };

        std::vector<Eigen::MatrixXcd> next(V.size());
        double prev_d = -1.0;
        bool done = false;
        for (int k = 1; k <= cfg.max_picard_iters; ++k) {
            sweep(next);
            const double d = d_metric(prop, next, V, n0 + 1, n1);
            const double scale = std::max(1.0, d_norm(prop, next, n0 + 1, n1));
            if (prev_d > floor_scale * scale && d > floor_scale * scale) {
                sub.contraction_factor = std::max(sub.contraction_factor, d / prev_d);
            }
            for (int n = n0 + 1; n <= n1; ++n) {
                V[static_cast<std::size_t>(n)] = next[static_cast<std::size_t>(n)];
                node_rhs(n);
            }
            sub.iterations = k;
            sub.final_delta = d;
            prev_d = d;
            if (d < cfg.picard_tol) {
                done = true;
                break;
            }
        }
        sweep(next);
        sub.fixed_point_residual = d_metric(prop, next, V, n0 + 1, n1);
        rep.subintervals.push_back(sub);
        if (!done) {
            all_converged = false;
            break;
        }
        converged_until = n1;
    }

    // A-priori constants: K0 = ||Phi||_a + T^beta/Gamma(beta+1) max ||H(t,.,0)||_a,
    // K1 = max(m L0, measured ||H(U) - H(0)||_a / ||U||_a).
    const double a = rep.sobolev_index;
    double h0_max = 0.0;
    double ratio_max = 0.0;
    const StateField zero(grid, m, Space::frequency);
    for (int n = 0; n <= converged_until; ++n) {
        const StateField H0 = eval.frequency(n * h, zero);
        h0_max = std::max(h0_max, sobolev_norm(H0, a));
        const StateField Un = from_modal(prop, V[static_cast<std::size_t>(n)]);
        const double un = sobolev_norm(Un, a);
        rep.max_solution_norm = std::max(rep.max_solution_norm, un);
        if (un > 0.0) {
            StateField diff = Hnodes[static_cast<std::size_t>(n)];
            diff.data -= H0.data;
            ratio_max = std::max(ratio_max, sobolev_norm(diff, a) / un);
        }
    }
    rep.K0 = sobolev_norm(Phi, a) + std::pow(cfg.T, beta) * rgamma(beta + 1.0) * h0_max;
    rep.K1 = std::max(m * rhs.L0, ratio_max);
    rep.gronwall_bound = gronwall_bound(rep.K0, rep.K1, beta, cfg.T);
    rep.converged = all_converged;

    // Fields at the output times from the nodal right-hand side.
    const TimeGrid tg{cfg.T, N};
    if (all_converged) {
        result.fields = solve_linear(prop, Phi, SourceSpec::sampled(tg, Hnodes), t_out, control);
        return result;
    }
    std::vector<double> partial_times;
    const double t_conv = converged_until * h;
    for (double t : t_out) {
        if (t <= t_conv * (1.0 + 1e-12)) partial_times.push_back(t);
    }
    std::vector<StateField> partial;
    if (!partial_times.empty()) {
        for (int n = converged_until + 1; n <= N; ++n) Hnodes[static_cast<std::size_t>(n)] = Hnodes[static_cast<std::size_t>(converged_until)];
        partial = solve_linear(prop, Phi, SourceSpec::sampled(tg, Hnodes), partial_times, control);
    }
    const auto& last = rep.subintervals.back();
    throw NoConvergence("Picard iteration did not converge on [" + std::to_string(last.t_start) + ", " +
                            std::to_string(last.t_end) + "] within " + std::to_string(cfg.max_picard_iters) +
                            " iterations (last delta " + std::to_string(last.final_delta) + ")",
                        rep, std::move(partial));
}

std::vector<StabilityRow> stability_probe(const Propagator& prop, const StateField& Phi1, const StateField& Phi2,
                                          const NonlinearRHS& rhs, const std::vector<double>& t_out,
                                          const SolveConfig& cfg) {
    const auto r1 = solve_nonlinear(prop, Phi1, rhs, t_out, cfg);
    const auto r2 = solve_nonlinear(prop, Phi2, rhs, t_out, cfg);
    const double a = prop.grid().dim() / 2.0 + 0.5 + prop.symbol().tau_star();
    StateField dphi = to_physical(Phi1);
    dphi.data -= to_physical(Phi2).data;
    const double scale = sobolev_norms(dphi, a).sum();
    std::vector<StabilityRow> rows;
    for (std::size_t i = 0; i < t_out.size(); ++i) {
        const Eigen::MatrixXcd diff = r1.fields[i].data - r2.fields[i].data;
        double worst = 0.0;
        for (Eigen::Index j = 0; j < diff.cols(); ++j) worst = std::max(worst, diff.col(j).cwiseAbs().maxCoeff());
        rows.push_back({t_out[i], worst, scale, scale > 0.0 ? worst / scale : 0.0});
    }
    return rows;
}

} // namespace mlfrac
