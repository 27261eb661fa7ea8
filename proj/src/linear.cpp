#include "mlfrac/linear.hpp"

#include "mlfrac/mlf.hpp"
#include "mlfrac/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace mlfrac {

Propagator::Propagator(SpectralGrid grid, MatrixSymbol sym, double beta)
    : grid_(std::move(grid)), sym_(std::move(sym)), beta_(beta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("beta must lie in (0, 1]");
    report_ = validate_conditions_A(sym_, grid_);
    if (!report_.solver_admissible()) {
        throw ValidationFailure("symbol has negative eigenvalues on the lattice (min " +
                                    std::to_string(report_.min_eigenvalue) +
                                    "); shrink the domain to raise the lowest nonzero frequency",
                                report_);
    }
    const std::size_t P = grid_.size();
    const int m = sym_.m();
    decomp_.resize(P);
    parallel_for(P, [&](std::size_t p) {
        const Eigen::MatrixXcd A = eval_symbol(sym_, grid_.xi(p));
        EigenDecomp d = eig_hermitian(A);
        const double tol = eigen_zero_tolerance(A.norm());
        for (Eigen::Index q = 0; q < d.lambdas.size(); ++q) {
            if (std::abs(d.lambdas[q]) <= tol) d.lambdas[q] = 0.0;
        }
        decomp_[p] = std::move(d);
    });

    std::vector<double> all;
    all.reserve(P * static_cast<std::size_t>(m));
    for (const auto& d : decomp_) {
        for (Eigen::Index q = 0; q < d.lambdas.size(); ++q) all.push_back(d.lambdas[q]);
    }
    std::sort(all.begin(), all.end());
    for (double v : all) {
        if (distinct_.empty() || v - distinct_.back() > 1e-13 * (1.0 + std::abs(v))) distinct_.push_back(v);
    }
    lambda_index_.resize(P * static_cast<std::size_t>(m));
    for (std::size_t p = 0; p < P; ++p) {
        for (int q = 0; q < m; ++q) {
            const double v = decomp_[p].lambdas[q];
            // Clusters are represented by their smallest member, so v maps to the last start <= v.
            auto it = std::upper_bound(distinct_.begin(), distinct_.end(), v);
            lambda_index_[p * static_cast<std::size_t>(m) + q] = static_cast<int>(it - distinct_.begin()) - 1;
        }
    }
}

StateField Propagator::apply_spectral(const StateField& Fhat, const Eigen::VectorXd& f) const {
    if (!(Fhat.grid == grid_) || Fhat.m() != m()) throw GridMismatch("field does not match the propagator grid");
    if (Fhat.space != Space::frequency) throw DomainError("apply_spectral expects a frequency-space field");
    StateField out(grid_, m(), Space::frequency);
    const int mm = m();
    parallel_for(grid_.size(), [&](std::size_t p) {
        const auto& d = decomp_[p];
        const auto row = static_cast<Eigen::Index>(p);
        Eigen::VectorXcd v = d.Minv * Fhat.data.row(row).transpose();
        for (int q = 0; q < mm; ++q) v[q] *= f[lambda_index(p, q)];
        out.data.row(row) = (d.M * v).transpose();
    });
    return out;
}

StateField Propagator::apply_symbol(const StateField& Fhat) const {
    if (!(Fhat.grid == grid_) || Fhat.m() != m()) throw GridMismatch("field does not match the propagator grid");
    StateField out(grid_, m(), Space::frequency);
    parallel_for(grid_.size(), [&](std::size_t p) {
        const auto row = static_cast<Eigen::Index>(p);
        out.data.row(row) = (eval_symbol(sym_, grid_.xi(p)) * Fhat.data.row(row).transpose()).transpose();
    });
    return out;
}

Eigen::VectorXd propagator_factors(const Propagator& prop, double t) {
    if (!(t >= 0.0)) throw DomainError("propagator time must be nonnegative");
    const auto& lam = prop.distinct_lambdas();
    Eigen::VectorXd out(static_cast<Eigen::Index>(lam.size()));
    const MLParams params{prop.beta(), 1.0};
    const double tb = std::pow(t, prop.beta());
    parallel_for(lam.size(), [&](std::size_t i) {
        out[static_cast<Eigen::Index>(i)] = t == 0.0 ? 1.0 : ml_eval(params, -lam[i] * tb).value;
    });
    return out;
}

StateField apply_S(const Propagator& prop, double t, const StateField& Phi) {
    if (!(Phi.grid == prop.grid()) || Phi.m() != prop.m()) throw GridMismatch("initial data does not match the grid");
    return to_physical(prop.apply_spectral(to_frequency(Phi), propagator_factors(prop, t)));
}

DuhamelWeights duhamel_weights(const Propagator& prop, double h, int count) {
    if (!(h > 0.0) || count < 1) throw DomainError("duhamel_weights needs h > 0 and count >= 1");
    const double beta = prop.beta();
    const auto& lam = prop.distinct_lambdas();
    DuhamelWeights w;
    w.h = h;
    w.count = count;
    w.A.resize(lam.size());
    w.B.resize(lam.size());
    const MLParams p1{beta, beta + 1.0};
    const MLParams p2{beta, beta + 2.0};
    parallel_for(lam.size(), [&](std::size_t li) {
        // K1(eta) = int_0^eta kernel, K2(eta) = int_0^eta K1.
        Eigen::VectorXd K1(count + 1), K2(count + 1);
        for (int i = 0; i <= count; ++i) {
            const double eta = i * h;
            if (i == 0) {
                K1[i] = 0.0;
                K2[i] = 0.0;
                continue;
            }
            const double eb = std::pow(eta, beta);
            const double z = -lam[li] * eb;
            K1[i] = eb * ml_eval(p1, z).value;
            K2[i] = eb * eta * ml_eval(p2, z).value;
        }
        Eigen::VectorXd A(count), B(count);
        for (int i = 0; i < count; ++i) {
            const double dK2 = K2[i + 1] - K2[i];
            A[i] = (dK2 - h * K1[i]) / h;
            B[i] = (h * K1[i + 1] - dK2) / h;
        }
        w.A[li] = std::move(A);
        w.B[li] = std::move(B);
    });
    return w;
}

Eigen::MatrixXcd to_modal(const Propagator& prop, const StateField& Fhat) {
    if (Fhat.space != Space::frequency) throw DomainError("to_modal expects a frequency-space field");
    Eigen::MatrixXcd out(Fhat.data.rows(), Fhat.data.cols());
    parallel_for(prop.grid().size(), [&](std::size_t p) {
        const auto row = static_cast<Eigen::Index>(p);
        out.row(row) = (prop.decomp(p).Minv * Fhat.data.row(row).transpose()).transpose();
    });
    return out;
}

StateField from_modal(const Propagator& prop, const Eigen::MatrixXcd& modal) {
    StateField out(prop.grid(), prop.m(), Space::frequency);
    parallel_for(prop.grid().size(), [&](std::size_t p) {
        const auto row = static_cast<Eigen::Index>(p);
        out.data.row(row) = (prop.decomp(p).M * modal.row(row).transpose()).transpose();
    });
    return out;
}

Eigen::MatrixXcd duhamel_sum(const Propagator& prop, const DuhamelWeights& w, const std::vector<Eigen::MatrixXcd>& g,
                             int n) {
    if (n > w.count || n >= static_cast<int>(g.size())) throw DomainError("duhamel_sum beyond tabulated range");
    const int m = prop.m();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(prop.grid().size()), m);
    if (n == 0) return out;
    parallel_for(prop.grid().size(), [&](std::size_t p) {
        const auto row = static_cast<Eigen::Index>(p);
        for (int q = 0; q < m; ++q) {
            const auto li = static_cast<std::size_t>(prop.lambda_index(p, q));
            const Eigen::VectorXd& A = w.A[li];
            const Eigen::VectorXd& B = w.B[li];
            cplx s = 0.0;
            for (int i = 0; i < n; ++i) s += A[i] * g[static_cast<std::size_t>(n - i)](row, q) + B[i] * g[static_cast<std::size_t>(n - i - 1)](row, q);
            out(row, q) = s;
        }
    });
    return out;
}

namespace {

std::vector<Eigen::MatrixXcd> modal_source_samples(const Propagator& prop, const SourceSpec& H, double h, int count) {
    std::vector<Eigen::MatrixXcd> g;
    g.reserve(static_cast<std::size_t>(count) + 1);
    for (int i = 0; i <= count; ++i) g.push_back(to_modal(prop, H.at(i * h, prop.grid(), prop.m())));
    return g;
}

} // namespace

StateField apply_duhamel(const Propagator& prop, double t, const SourceSpec& H, int nodes) {
    if (!(t > 0.0)) throw DomainError("apply_duhamel needs t > 0");
    if (nodes < 1) throw DomainError("apply_duhamel needs at least one node");
    if (H.is_zero()) return StateField(prop.grid(), prop.m(), Space::physical);
    if (nodes > 1 << 20) throw QuadratureBudgetExceeded("Duhamel node count exceeds 2^20");
    const double h = t / nodes;
    const auto w = duhamel_weights(prop, h, nodes);
    const auto g = modal_source_samples(prop, H, h, nodes);
    return to_physical(from_modal(prop, duhamel_sum(prop, w, g, nodes)));
}

std::vector<StateField> solve_linear(const Propagator& prop, const StateField& Phi, const SourceSpec& H,
                                     const std::vector<double>& t_out, const LinearControl& control) {
    if (!(control.T > 0.0) || control.time_steps < 1) throw DomainError("solve_linear needs T > 0 and time_steps >= 1");
    if (!(Phi.grid == prop.grid()) || Phi.m() != prop.m()) throw GridMismatch("initial data does not match the grid");
    if (!std::is_sorted(t_out.begin(), t_out.end())) throw DomainError("output times must be sorted");
    for (double t : t_out) {
        if (!(t >= 0.0 && t <= control.T * (1.0 + 1e-12))) throw DomainError("output time outside [0, T]");
    }
    const StateField Phat = to_frequency(Phi);
    const double h = control.T / control.time_steps;

    // Output times on the uniform grid share one weight table and one set of source samples.
    int shared_max = 0;
    for (double t : t_out) {
        const double r = t / h;
        const double n = std::round(r);
        if (std::abs(r - n) <= 1e-9 * std::max(1.0, r)) shared_max = std::max(shared_max, static_cast<int>(n));
    }
    DuhamelWeights shared_w;
    std::vector<Eigen::MatrixXcd> shared_g;
    if (!H.is_zero() && shared_max > 0) {
        shared_w = duhamel_weights(prop, h, shared_max);
        shared_g = modal_source_samples(prop, H, h, shared_max);
    }

    std::vector<StateField> out;
    out.reserve(t_out.size());
    for (double t : t_out) {
        StateField U = prop.apply_spectral(Phat, propagator_factors(prop, t));
        if (!H.is_zero() && t > 0.0) {
            const double r = t / h;
            const double n = std::round(r);
            StateField W;
            if (std::abs(r - n) <= 1e-9 * std::max(1.0, r)) {
                W = from_modal(prop, duhamel_sum(prop, shared_w, shared_g, static_cast<int>(n)));
            } else {
                const int nodes = std::max(1, static_cast<int>(std::ceil(r)));
                W = to_frequency(apply_duhamel(prop, t, H, nodes));
            }
            U.data += W.data;
        }
        out.push_back(to_physical(U));
    }
    return out;
}

CoerciveDiagnostic coercive_diagnostic(const Propagator& prop, const StateField& Phi, const SourceSpec& H, double t,
                                       const LinearControl& control) {
    if (!(t > 0.0)) throw DomainError("coercive_diagnostic needs t > 0");
    const StateField U = solve_linear(prop, Phi, H, {t}, control).front();
    const StateField Uhat = to_frequency(U);
    const StateField AUhat = prop.apply_symbol(Uhat);
    const StateField Hhat = H.at(t, prop.grid(), prop.m());
    StateField DbU(prop.grid(), prop.m(), Space::frequency);
    DbU.data = Hhat.data - AUhat.data;
    const StateField DbU_phys = to_physical(DbU);

    const int m = prop.m();
    CoerciveDiagnostic out;
    for (int j = 0; j < m; ++j) {
        double row = DbU_phys.data.col(j).cwiseAbs().maxCoeff();
        for (int k = 0; k < m; ++k) {
            StateField part(prop.grid(), 1, Space::frequency);
            for (std::size_t p = 0; p < prop.grid().size(); ++p) {
                const auto r = static_cast<Eigen::Index>(p);
                part.data(r, 0) = prop.symbol().at(j, k).eval(prop.grid().xi(p)) * Uhat.data(r, k);
            }
            row += to_physical(part).data.col(0).cwiseAbs().maxCoeff();
        }
        out.lhs = std::max(out.lhs, row);
    }

    const double a = prop.grid().dim() / 2.0 + 0.5 + prop.symbol().tau_star();
    const Eigen::VectorXd phi_norms = sobolev_norms(Phi, a);
    Eigen::VectorXd h_max = Eigen::VectorXd::Zero(m);
    if (!H.is_zero()) {
        const int steps = control.time_steps;
        for (int i = 0; i <= steps; ++i) {
            const double s = control.T * i / steps;
            h_max = h_max.cwiseMax(sobolev_norms(H.at(s, prop.grid(), m), a));
        }
    }
    out.rhs_scale = std::pow(t, -prop.beta()) * phi_norms.sum() + h_max.sum();
    out.ratio = out.rhs_scale > 0.0 ? out.lhs / out.rhs_scale : 0.0;
    return out;
}

GreenKernels green_kernels(const Propagator& prop, double t) {
    if (!(t > 0.0)) throw DomainError("green_kernels needs t > 0");
    const double beta = prop.beta();
    const auto& lam = prop.distinct_lambdas();
    const Eigen::VectorXd s = propagator_factors(prop, t);
    Eigen::VectorXd sp(static_cast<Eigen::Index>(lam.size()));
    const MLParams pbb{beta, beta};
    const double tb = std::pow(t, beta);
    for (std::size_t i = 0; i < lam.size(); ++i) {
        sp[static_cast<Eigen::Index>(i)] = std::pow(t, beta - 1.0) * ml_eval(pbb, -lam[i] * tb).value;
    }
    GreenKernels out;
    const int m = prop.m();
    for (int k = 0; k < m; ++k) {
        StateField unit(prop.grid(), m, Space::frequency);
        unit.data.col(k).setOnes();
        out.Z.push_back(to_physical(prop.apply_spectral(unit, s)));
        out.Y.push_back(to_physical(prop.apply_spectral(unit, sp)));
    }
    return out;
}

} // namespace mlfrac
