#pragma once

#include "mlfrac/fracops.hpp"
#include "mlfrac/grid.hpp"
#include "mlfrac/problem.hpp"
#include "mlfrac/symbol.hpp"

#include <string>
#include <vector>

namespace mlfrac::builtin {

/// [[|xi|^2, a.xi], [a.xi, |xi|^2]] in n = a.size() dimensions.
MatrixSymbol coupled_first_order(const std::vector<double>& a);

/// coeff (|xi|^2)^power on the diagonal of an m x m symbol in n dimensions.
MatrixSymbol diagonal_laplacian(int m, int n, int power = 1, double coeff = 1.0);

/// u_j(x) = amplitude_j exp(-|x - center|^2 / (2 width^2)).
StateField gaussian(const SpectralGrid& grid, const std::vector<cplx>& amplitudes, double width,
                    const std::vector<double>& center = {});

struct Nonlinearity {
    std::string name;
    PointwiseNonlinearity fn;
    double L0 = 0.0;
};

/// Named pointwise nonlinearities for m components, with their Lipschitz constants:
///   linear             h_j = sum_k c_jk u_k  (c: 1 value, m values as a diagonal, or m*m row-major)
///   sine               h_j = c_j sin(Re u_j)                 L0 = max |c_j|
///   cubic              h_j = c_j r^3 / (1 + r^2), r = Re u_j L0 = 9/8 max |c_j|
///   logistic-coupling  h_j = c_j tanh(Re u_{j+1 mod m})      L0 = max |c_j|
/// A single coefficient is broadcast to every component.
Nonlinearity nonlinearity(const std::string& name, const std::vector<double>& coeffs, int m);

/// Caputo derivative of e^{-t}: -t^{1-beta} E_{1,2-beta}(-t).
double caputo_of_exp_decay(double t, double beta);

/// Forcing F on the nodes of `time` such that U*(t) = e^{-t} G solves
/// D^beta U + A(D) U = F + N(U), with N dealiased as the solver does.
SourceSpec manufactured_forcing(const MatrixSymbol& sym, const StateField& G, double beta, const TimeGrid& time,
                                const PointwiseNonlinearity& N, bool dealias);

} // namespace mlfrac::builtin
