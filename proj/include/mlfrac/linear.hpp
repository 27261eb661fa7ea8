#pragma once

#include "mlfrac/grid.hpp"
#include "mlfrac/problem.hpp"
#include "mlfrac/symbol.hpp"

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace mlfrac {

/// Spectral solution operator for D_t^beta U + A(D) U = H on a lattice.
///
/// Construction validates the symbol, refuses any lattice point with a
/// negative eigenvalue, and caches the eigendecomposition at every lattice
/// point. Distinct eigenvalues are also indexed so that scalar kernels are
/// evaluated once per value rather than once per (point, mode).
class Propagator {
public:
    Propagator(SpectralGrid grid, MatrixSymbol sym, double beta);

    const SpectralGrid& grid() const { return grid_; }
    const MatrixSymbol& symbol() const { return sym_; }
    double beta() const { return beta_; }
    int m() const { return sym_.m(); }
    const ValidationReport& report() const { return report_; }

    const EigenDecomp& decomp(std::size_t p) const { return decomp_[p]; }
    /// Sorted distinct eigenvalues over the lattice.
    const std::vector<double>& distinct_lambdas() const { return distinct_; }
    /// Index into distinct_lambdas() of eigenvalue q at lattice point p.
    int lambda_index(std::size_t p, int q) const { return lambda_index_[p * static_cast<std::size_t>(m()) + q]; }

    /// Applies M diag(f(lambda_q)) M^* to every frequency sample; f is tabulated per distinct eigenvalue.
    StateField apply_spectral(const StateField& Fhat, const Eigen::VectorXd& f_per_lambda) const;
    /// Multiplies by A(xi) pointwise (frequency space in and out).
    StateField apply_symbol(const StateField& Fhat) const;

private:
    SpectralGrid grid_;
    MatrixSymbol sym_;
    double beta_;
    ValidationReport report_;
    std::vector<EigenDecomp> decomp_;
    std::vector<double> distinct_;
    std::vector<int> lambda_index_;
};

/// E_beta(-lambda t^beta) for every distinct eigenvalue.
Eigen::VectorXd propagator_factors(const Propagator& prop, double t);

/// U = S(t, D) Phi, returned in physical space.
StateField apply_S(const Propagator& prop, double t, const StateField& Phi);

/// Product-integration weights for the kernel eta^{beta-1} E_{beta,beta}(-lambda eta^beta)
/// against piecewise-linear data on nodes eta_i = i h: for each distinct
/// eigenvalue, A[i] multiplies g(t - eta_i) and B[i] multiplies g(t - eta_{i+1}).
struct DuhamelWeights {
    double h = 0.0;
    int count = 0;
    std::vector<Eigen::VectorXd> A;
    std::vector<Eigen::VectorXd> B;
};

DuhamelWeights duhamel_weights(const Propagator& prop, double h, int count);

/// W(t) = int_0^t S'(eta, D) H(t - eta) d eta with `nodes` equal subintervals.
/// Returned in physical space.
StateField apply_duhamel(const Propagator& prop, double t, const SourceSpec& H, int nodes = 256);

/// Eigen-coordinates M^* Hhat of a frequency-space field, row p holding the m modal values.
Eigen::MatrixXcd to_modal(const Propagator& prop, const StateField& Fhat);
/// Inverse of to_modal (frequency space).
StateField from_modal(const Propagator& prop, const Eigen::MatrixXcd& modal);

/// sum_{i<n} A_i g_{n-i} + B_i g_{n-i-1} for modal samples g[0..n] at spacing w.h.
Eigen::MatrixXcd duhamel_sum(const Propagator& prop, const DuhamelWeights& w, const std::vector<Eigen::MatrixXcd>& g,
                             int n);

struct LinearControl {
    double T = 1.0;
    /// Uniform quadrature nodes on [0, T]; output times off this grid get their own nodes of similar spacing.
    int time_steps = 256;
};

/// U(t) = S(t,D) Phi + W(t) at each output time, physical space.
std::vector<StateField> solve_linear(const Propagator& prop, const StateField& Phi, const SourceSpec& H,
                                     const std::vector<double>& t_out, const LinearControl& control);

struct CoerciveDiagnostic {
    double lhs = 0.0;
    double rhs_scale = 0.0;
    double ratio = 0.0;
};

/// lhs = max_j (||D^beta u_j||_inf + sum_k ||A_jk(D) u_k||_inf), with D^beta U
/// taken from the equation; rhs_scale = sum_k (t^-beta ||phi_k||_a + max_t ||h_k||_a),
/// a = n/2 + 0.5 + tau*.
CoerciveDiagnostic coercive_diagnostic(const Propagator& prop, const StateField& Phi, const SourceSpec& H, double t,
                                       const LinearControl& control);

struct GreenKernels {
    /// Z[k] holds column k: component j is Z_{j,k}(t, x). Same layout for Y.
    std::vector<StateField> Z;
    std::vector<StateField> Y;
};

GreenKernels green_kernels(const Propagator& prop, double t);

} // namespace mlfrac
