#include "mlfrac/oracle.hpp"

#include "mlfrac/errors.hpp"
#include "mlfrac/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mlfrac {

ComplexPath l1_ode_march(const Eigen::MatrixXcd& A, double beta, const Eigen::VectorXcd& u0, const ComplexPath& Hhat,
                         const TimeGrid& grid) {
    if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("l1_ode_march requires beta in (0,1]");
    grid.validate();
    const Eigen::Index m = u0.size();
    if (A.rows() != m || A.cols() != m) throw DomainError("l1_ode_march: A and u0 sizes differ");
    const bool has_source = Hhat.samples.cols() > 0;
    if (has_source && (Hhat.samples.rows() != grid.size() || Hhat.samples.cols() != m)) {
        throw DomainError("l1_ode_march: source samples do not match grid and dimension");
    }
    const int N = grid.steps;
    const double w0 = std::pow(grid.h(), -beta) / std::tgamma(2.0 - beta);
    const Eigen::VectorXd b = l1_weights(N, beta);
    const Eigen::MatrixXcd K = w0 * Eigen::MatrixXcd::Identity(m, m) + 0.5 * (A + A.adjoint());
    Eigen::LLT<Eigen::MatrixXcd> llt(K);
    if (llt.info() != Eigen::Success) throw SingularSystem("L1 step matrix is not positive definite");

    ComplexPath out(grid, m);
    out.samples.row(0) = u0.transpose();
    for (int n = 1; n <= N; ++n) {
        Eigen::VectorXcd rhs = w0 * out.samples.row(n - 1).transpose();
        for (int j = 1; j < n; ++j) {
            rhs -= w0 * b[j] * (out.samples.row(n - j) - out.samples.row(n - j - 1)).transpose();
        }
        if (has_source) rhs += Hhat.samples.row(n).transpose();
        out.samples.row(n) = llt.solve(rhs).transpose();
    }
    return out;
}

std::vector<StateField> l1_field_march(const OracleProblem& pb, const TimeGrid& grid,
                                       const std::vector<int>& output_steps) {
    grid.validate();
    for (int s : output_steps) {
        if (s < 0 || s > grid.steps) throw DomainError("oracle output step outside the time grid");
    }
    const SpectralGrid& g = pb.Phi.grid;
    const int m = pb.Phi.m();
    if (pb.sym.m() != m || pb.sym.n() != g.dim()) throw GridMismatch("oracle symbol does not match the field");
    const std::size_t P = g.size();
    const int N = grid.steps;
    const StateField Phat = to_frequency(pb.Phi);

    std::vector<Eigen::MatrixXcd> Hs;
    if (!pb.forcing.is_zero()) {
        Hs.reserve(static_cast<std::size_t>(N) + 1);
        for (int n = 0; n <= N; ++n) Hs.push_back(pb.forcing.at(grid.t(n), g, m).data);
    }

    std::vector<StateField> out;
    if (!pb.nonlinearity) {
        std::vector<Eigen::MatrixXcd> rows(output_steps.size(), Eigen::MatrixXcd(static_cast<Eigen::Index>(P), m));
        parallel_for(P, [&](std::size_t p) {
            const auto r = static_cast<Eigen::Index>(p);
            ComplexPath src;
            if (!Hs.empty()) {
                src = ComplexPath(grid, m);
                for (int n = 0; n <= N; ++n) src.samples.row(n) = Hs[static_cast<std::size_t>(n)].row(r);
            }
            const ComplexPath path = l1_ode_march(eval_symbol(pb.sym, g.xi(p)), pb.beta,
                                                  Phat.data.row(r).transpose(), src, grid);
            for (std::size_t i = 0; i < output_steps.size(); ++i) rows[i].row(r) = path.samples.row(output_steps[i]);
        });
        for (auto& r : rows) {
            StateField f(g, m, Space::frequency);
            f.data = std::move(r);
            out.push_back(to_physical(f));
        }
        return out;
    }

    // Nonlinear: all frequencies advance together.
    const double w0 = std::pow(grid.h(), -pb.beta) / std::tgamma(2.0 - pb.beta);
    const Eigen::VectorXd b = l1_weights(N, pb.beta);
    std::vector<Eigen::LLT<Eigen::MatrixXcd>> solvers(P);
    parallel_for(P, [&](std::size_t p) {
        const Eigen::MatrixXcd A = eval_symbol(pb.sym, g.xi(p));
        solvers[p].compute(w0 * Eigen::MatrixXcd::Identity(m, m) + 0.5 * (A + A.adjoint()));
    });
    for (const auto& s : solvers) {
        if (s.info() != Eigen::Success) throw SingularSystem("L1 step matrix is not positive definite");
    }

    auto nonlinear_hat = [&](double t, const Eigen::MatrixXcd& uhat) {
        StateField U(g, m, Space::frequency);
        U.data = uhat;
        const StateField u = to_physical(U);
        StateField v(g, m, Space::physical);
        parallel_for(P, [&](std::size_t p) {
            const auto r = static_cast<Eigen::Index>(p);
            const Eigen::VectorXd x = g.x(p);
            std::vector<cplx> in(static_cast<std::size_t>(m)), res(static_cast<std::size_t>(m));
            for (int k = 0; k < m; ++k) in[k] = u.data(r, k);
            pb.nonlinearity(t, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), in, res);
            for (int k = 0; k < m; ++k) v.data(r, k) = res[k];
        });
        StateField vh = fft_forward(v);
        if (pb.dealias) dealias_two_thirds(vh);
        return vh.data;
    };

    std::vector<Eigen::MatrixXcd> hist;
    hist.reserve(static_cast<std::size_t>(N) + 1);
    hist.push_back(Phat.data);
    for (int n = 1; n <= N; ++n) {
        Eigen::MatrixXcd base = w0 * hist[static_cast<std::size_t>(n) - 1];
        for (int j = 1; j < n; ++j) base -= w0 * b[j] * (hist[static_cast<std::size_t>(n - j)] - hist[static_cast<std::size_t>(n - j - 1)]);
        if (!Hs.empty()) base += Hs[static_cast<std::size_t>(n)];
        Eigen::MatrixXcd u = hist.back();
        bool converged = false;
        for (int it = 0; it < 200; ++it) {
            const Eigen::MatrixXcd rhs = base + nonlinear_hat(grid.t(n), u);
            Eigen::MatrixXcd next(u.rows(), u.cols());
            parallel_for(P, [&](std::size_t p) {
                const auto r = static_cast<Eigen::Index>(p);
                next.row(r) = solvers[p].solve(rhs.row(r).transpose()).transpose();
            });
            const double change = (next - u).cwiseAbs().maxCoeff();
            const double scale = std::max(1e-300, next.cwiseAbs().maxCoeff());
            u = std::move(next);
            if (change <= 1e-14 * scale) {
                converged = true;
                break;
            }
        }
        if (!converged) throw ConvergenceFailure("oracle implicit step did not converge");
        hist.push_back(std::move(u));
    }
    for (int s : output_steps) {
        StateField f(g, m, Space::frequency);
        f.data = hist[static_cast<std::size_t>(s)];
        out.push_back(to_physical(f));
    }
    return out;
}

ResidualReport residual_check(const std::vector<StateField>& U, const MatrixSymbol& sym, double beta,
                              const SourceSpec& H, const TimeGrid& grid) {
    grid.validate();
    if (U.size() < 8) throw InsufficientSamples("residual_check needs at least 8 time samples");
    if (static_cast<int>(U.size()) != grid.size()) throw InsufficientSamples("residual_check needs U at every time node");
    const SpectralGrid& g = U.front().grid;
    const int m = U.front().m();
    const std::size_t P = g.size();

    ComplexPath path(grid, static_cast<Eigen::Index>(P) * m);
    std::vector<StateField> Uhat;
    Uhat.reserve(U.size());
    for (int n = 0; n <= grid.steps; ++n) {
        const StateField& u = U[static_cast<std::size_t>(n)];
        if (!(u.grid == g) || u.m() != m) throw GridMismatch("residual_check fields differ in grid");
        const StateField phys = to_physical(u);
        path.samples.row(n) = Eigen::Map<const Eigen::RowVectorXcd>(phys.data.data(), phys.data.size());
        Uhat.push_back(to_frequency(u));
    }
    const ComplexPath dU = caputo_l1(path, beta);

    ResidualReport rep;
    for (int n = 0; n <= grid.steps; ++n) {
        StateField AU(g, m, Space::frequency);
        const StateField& uh = Uhat[static_cast<std::size_t>(n)];
        for (std::size_t p = 0; p < P; ++p) {
            const auto r = static_cast<Eigen::Index>(p);
            AU.data.row(r) = (eval_symbol(sym, g.xi(p)) * uh.data.row(r).transpose()).transpose();
        }
        AU.data -= H.at(grid.t(n), g, m).data;
        const StateField res = to_physical(AU);
        Eigen::MatrixXcd total = res.data;
        total += Eigen::Map<const Eigen::MatrixXcd>(dU.samples.row(n).eval().data(), static_cast<Eigen::Index>(P), m);
        rep.times.push_back(grid.t(n));
        rep.residual_linf.push_back(total.cwiseAbs().maxCoeff());
    }
    rep.refinement_rate = std::numeric_limits<double>::quiet_NaN();
    return rep;
}

double fit_refinement_rate(const std::vector<double>& steps, const std::vector<double>& errors) {
    if (steps.size() != errors.size() || steps.size() < 2) throw InsufficientSamples("rate fit needs two or more levels");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double k = static_cast<double>(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (!(errors[i] > 0.0)) return std::numeric_limits<double>::infinity();
        const double x = std::log(steps[i]);
        const double y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return -(k * sxy - sx * sy) / (k * sxx - sx * sx);
}

ResidualReport residual_study(const std::function<std::vector<StateField>(const TimeGrid&)>& solve,
                              const MatrixSymbol& sym, double beta, const SourceSpec& H, double T,
                              const std::vector<int>& steps) {
    if (steps.size() < 2) throw InsufficientSamples("residual_study needs at least two refinement levels");
    ResidualReport finest;
    std::vector<double> xs, ys;
    for (int s : steps) {
        const TimeGrid grid{T, s};
        ResidualReport rep = residual_check(solve(grid), sym, beta, H, grid);
        const double worst = *std::max_element(rep.residual_linf.begin() + 1, rep.residual_linf.end());
        xs.push_back(s);
        ys.push_back(worst);
        finest.sweep.emplace_back(s, worst);
        finest.times = std::move(rep.times);
        finest.residual_linf = std::move(rep.residual_linf);
    }
    finest.refinement_rate = fit_refinement_rate(xs, ys);
    return finest;
}

} // namespace mlfrac
