#pragma once

#include "mlfrac/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>

namespace mlfrac {

/// Uniform time grid t_i = i T / steps, i = 0..steps.
struct TimeGrid {
    double T = 1.0;
    int steps = 2;

    double h() const { return T / steps; }
    double t(int i) const { return T * static_cast<double>(i) / steps; }
    int size() const { return steps + 1; }
    void validate() const {
        if (!(T > 0.0) || steps < 2) throw DomainError("TimeGrid requires T > 0 and steps >= 2");
    }
};

/// Samples of one or more time series on a TimeGrid: row i holds the values
/// at t_i, each column is an independent series (a component or lattice point).
template <typename Scalar>
struct SampledPath {
    TimeGrid grid;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> samples;

    SampledPath() = default;
    SampledPath(TimeGrid g, Eigen::Index series)
        : grid(g), samples(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(g.size(), series)) {}
    SampledPath(TimeGrid g, Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> s) : grid(g), samples(std::move(s)) {
        check();
    }

    void check() const {
        grid.validate();
        if (samples.rows() != grid.size()) {
            throw DomainError("SampledPath needs steps+1 = " + std::to_string(grid.size()) + " rows, got " +
                              std::to_string(samples.rows()));
        }
    }
};

using RealPath = SampledPath<double>;
using ComplexPath = SampledPath<std::complex<double>>;

/// L1 weights b_j = (j+1)^{1-beta} - j^{1-beta}, j = 0..count-1.
Eigen::VectorXd l1_weights(int count, double beta);

/// Product-integration weights a_{j,n}, j = 0..n, for the piecewise-linear
/// Riemann-Liouville integral at t_n (without the h^beta / Gamma(beta+2) factor).
Eigen::VectorXd rl_weights(int n, double beta);

/// L1 approximation of the Caputo derivative of order beta at every grid
/// point. Row 0 repeats the t_1 value. beta = 1 gives the backward difference.
template <typename Scalar>
SampledPath<Scalar> caputo_l1(const SampledPath<Scalar>& path, double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("caputo_l1 requires beta in (0,1]");
    path.check();
    const int steps = path.grid.steps;
    const double scale = std::pow(path.grid.h(), -beta) / std::tgamma(2.0 - beta);
    const Eigen::VectorXd b = l1_weights(steps, beta);
    const auto& f = path.samples;
    SampledPath<Scalar> out(path.grid, f.cols());
    for (int n = 1; n <= steps; ++n) {
        auto row = out.samples.row(n);
        for (int j = 0; j < n; ++j) {
            row += b[j] * (f.row(n - j) - f.row(n - j - 1));
        }
        row *= scale;
    }
    out.samples.row(0) = out.samples.row(1);
    return out;
}

/// Riemann-Liouville integral J^beta of the piecewise-linear interpolant;
/// exact for piecewise-linear data. Row 0 is zero.
template <typename Scalar>
SampledPath<Scalar> rl_integral(const SampledPath<Scalar>& path, double beta) {
    if (!(beta > 0.0)) throw DomainError("rl_integral requires beta > 0");
    path.check();
    const int steps = path.grid.steps;
    const double scale = std::pow(path.grid.h(), beta) / std::tgamma(beta + 2.0);
    const auto& f = path.samples;
    SampledPath<Scalar> out(path.grid, f.cols());
    for (int n = 1; n <= steps; ++n) {
        const Eigen::VectorXd a = rl_weights(n, beta);
        auto row = out.samples.row(n);
        for (int j = 0; j <= n; ++j) row += a[j] * f.row(j);
        row *= scale;
    }
    return out;
}

/// max |J^beta(caputo_l1 f) - (f - f(0))| over all samples.
template <typename Scalar>
double inverse_identity_check(const SampledPath<Scalar>& path, double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("inverse_identity_check requires beta in (0,1)");
    const auto recovered = rl_integral(caputo_l1(path, beta), beta);
    const auto shifted = path.samples.rowwise() - path.samples.row(0);
    return (recovered.samples - shifted).cwiseAbs().maxCoeff();
}

} // namespace mlfrac
