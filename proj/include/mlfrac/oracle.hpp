#pragma once

#include "mlfrac/fracops.hpp"
#include "mlfrac/grid.hpp"
#include "mlfrac/problem.hpp"
#include "mlfrac/symbol.hpp"

#include <functional>
#include <vector>

namespace mlfrac {

/// Implicit L1 march of D^beta u + A u = H for one frequency:
/// (w0 I + A) u_n = w0 u_{n-1} - w0 sum_{j>=1} b_j (u_{n-j} - u_{n-j-1}) + H_n,
/// w0 = h^-beta / Gamma(2 - beta). Hhat may have zero columns (no source).
ComplexPath l1_ode_march(const Eigen::MatrixXcd& A, double beta, const Eigen::VectorXcd& u0, const ComplexPath& Hhat,
                         const TimeGrid& grid);

/// Whole-field problem for the L1 oracle. The nonlinearity, if set, is
/// evaluated pointwise and its transform truncated by the 2/3 rule when `dealias`.
struct OracleProblem {
    MatrixSymbol sym;
    double beta = 1.0;
    StateField Phi;
    SourceSpec forcing;
    PointwiseNonlinearity nonlinearity;
    bool dealias = true;
};

/// Marches every lattice frequency with the implicit L1 scheme and returns
/// physical fields at the requested step indices. Nonlinear problems solve each
/// step by fixed-point iteration on the implicit equation.
std::vector<StateField> l1_field_march(const OracleProblem& problem, const TimeGrid& grid,
                                       const std::vector<int>& output_steps);

struct ResidualReport {
    std::vector<double> times;
    std::vector<double> residual_linf;
    /// Fitted convergence order; NaN until a refinement sweep fills it.
    double refinement_rate = 0.0;
    /// Per sweep level: (steps, max residual over t > 0).
    std::vector<std::pair<int, double>> sweep;
};

/// residual(t_i) = ||caputo_l1(U)(t_i) + A(D) U(t_i) - H(t_i)||_inf, U given at every node of `grid`.
ResidualReport residual_check(const std::vector<StateField>& U, const MatrixSymbol& sym, double beta,
                              const SourceSpec& H, const TimeGrid& grid);

/// Runs residual_check for each step count (solve(grid) must return U on all nodes)
/// and fits the rate of the max residual over t > 0. Returns the finest report.
ResidualReport residual_study(const std::function<std::vector<StateField>(const TimeGrid&)>& solve,
                              const MatrixSymbol& sym, double beta, const SourceSpec& H, double T,
                              const std::vector<int>& steps);

/// Least-squares slope p in error ~ C steps^-p.
double fit_refinement_rate(const std::vector<double>& steps, const std::vector<double>& errors);

} // namespace mlfrac
