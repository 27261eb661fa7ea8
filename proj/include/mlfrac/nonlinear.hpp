#pragma once

#include "mlfrac/linear.hpp"
#include "mlfrac/problem.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mlfrac {

/// H(t, x, U) = forcing(t, x) + nonlinearity(t, x, U(x)).
/// `L0` is the declared Lipschitz constant of the nonlinearity:
/// |h_j(Y) - h_j(Z)| <= L0 sum_k |y_k - z_k|.
struct NonlinearRHS {
    PointwiseNonlinearity nonlinearity;
    SourceSpec forcing;
    double L0 = 0.0;

    bool is_zero() const { return !nonlinearity && forcing.is_zero(); }
};

struct SolveConfig {
    double T = 1.0;
    int time_steps = 256;
    double picard_tol = 1e-10;
    double target_delta = 0.5;
    int max_picard_iters = 200;
    bool dealias = true;
    int lipschitz_samples = 1000;
    std::uint64_t seed = 1;
};

struct SubintervalReport {
    double t_start = 0.0;
    double t_end = 0.0;
    int iterations = 0;
    /// d(U^{k+1}, U^k) at the last iteration.
    double final_delta = 0.0;
    /// Largest observed d(U^{k+1},U^k) / d(U^k,U^{k-1}) above the roundoff floor.
    double contraction_factor = 0.0;
    /// c1 (t_end - t_start)^beta.
    double delta_bound = 0.0;
    /// d(T U, U) for the returned iterate.
    double fixed_point_residual = 0.0;
};

struct LipschitzAudit {
    int samples = 0;
    int violations = 0;
    double max_ratio = 0.0;
};

struct PicardReport {
    double c1 = 0.0;
    double t1 = 0.0;
    std::vector<SubintervalReport> subintervals;
    double K0 = 0.0;
    double K1 = 0.0;
    double sobolev_index = 0.0;
    double gronwall_bound = 0.0;
    /// max over time nodes of ||U(t)||_a, a = sobolev_index.
    double max_solution_norm = 0.0;
    LipschitzAudit lipschitz;
    bool lipschitz_warning = false;
    bool converged = false;
};

class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, PicardReport report, std::vector<StateField> partial)
        : Error(what), report_(std::move(report)), partial_(std::move(partial)) {}
    const char* name() const noexcept override { return "NoConvergence"; }
    const PicardReport& report() const { return report_; }
    /// Fields at the requested output times that lie in converged subintervals.
    const std::vector<StateField>& partial() const { return partial_; }

private:
    PicardReport report_;
    std::vector<StateField> partial_;
};

/// c1 = m^2 C_ker L0 / beta with C_ker = sup |E_{beta,beta}(-lambda eta^beta)| over
/// cached eigenvalues and eta in (0, t1].
double estimate_c1(const Propagator& prop, double L0, double t1);

/// K0 E_rho(K1 t^rho).
double gronwall_bound(double K0, double K1, double rho, double t);

/// Samples random (t, x, Y, Z) and checks the declared L0.
LipschitzAudit audit_lipschitz(const NonlinearRHS& rhs, const SpectralGrid& grid, int m, double T, int samples,
                               std::uint64_t seed);

struct NonlinearResult {
    std::vector<StateField> fields;
    PicardReport report;
};

/// Marches the Volterra equation U = S(t)Phi + int_0^t S'(t-eta) H(eta, U(eta)) d eta
/// over subintervals with c1 t1^beta <= target_delta, iterating to the fixed point on each.
/// Throws NoConvergence when an iteration cap is reached.
NonlinearResult solve_nonlinear(const Propagator& prop, const StateField& Phi, const NonlinearRHS& rhs,
                                const std::vector<double>& t_out, const SolveConfig& cfg);

struct StabilityRow {
    double t = 0.0;
    double max_difference = 0.0;
    double bound_scale = 0.0;
    double ratio = 0.0;
};

/// Solves from Phi1 and Phi2 and compares: max_j ||u1_j - u2_j||_inf against
/// sum_k ||phi1_k - phi2_k||_a with a = n/2 + 0.5 + tau*.
std::vector<StabilityRow> stability_probe(const Propagator& prop, const StateField& Phi1, const StateField& Phi2,
                                          const NonlinearRHS& rhs, const std::vector<double>& t_out,
                                          const SolveConfig& cfg);

} // namespace mlfrac
