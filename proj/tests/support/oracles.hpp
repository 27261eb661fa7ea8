#pragma once

// Reference formulas used only by the tests. None of these call into the library.

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

namespace oracle {

/// e^{x^2} erfc(x) for x >= 0: direct product while representable, Laplace continued fraction beyond.
inline double erfcx(double x) {
    if (x <= 26.0) return std::exp(x * x) * std::erfc(x);
    double f = x;
    for (int k = 60; k >= 1; --k) f = x + (k / 2.0) / f;
    return 1.0 / (std::sqrt(std::numbers::pi) * f);
}

/// E_{1/2}(z) = e^{z^2} erfc(-z) for z <= 0.
inline double ml_half(double z) { return erfcx(-z); }

/// Caputo derivative of e^{-t} of order beta in (0,1), by tanh-sinh quadrature of
/// (1/Gamma(1-beta)) int_0^t (t-s)^{-beta} (-e^{-s}) ds after u = (t-s)^{1-beta}.
inline double caputo_exp_decay(double t, double beta) {
    if (t == 0.0) return 0.0;
    if (beta == 1.0) return -std::exp(-t);
    boost::math::quadrature::tanh_sinh<double> ts;
    const double p = 1.0 - beta;
    const double top = std::pow(t, p);
    // (t-s)^{-beta} ds = du / p with s = t - u^{1/p}
    auto f = [&](double u) { return -std::exp(-(t - std::pow(u, 1.0 / p))) / p; };
    return ts.integrate(f, 0.0, top) / std::tgamma(1.0 - beta);
}

/// Caputo derivative of t^2: 2 t^{2-beta} / Gamma(3-beta).
inline double caputo_t2(double t, double beta) { return 2.0 * std::pow(t, 2.0 - beta) / std::tgamma(3.0 - beta); }

/// Direct O(N^2) inverse of the forward transform int f(x) e^{+ix xi} dx on a 1D periodic lattice
/// x_j = -L/2 + j L/N, given samples at frequencies xi_k = 2 pi k / L in FFT order.
inline std::vector<std::complex<double>> inverse_dft_1d(const std::vector<std::complex<double>>& F, double L) {
    const int N = static_cast<int>(F.size());
    std::vector<std::complex<double>> out(N);
    for (int j = 0; j < N; ++j) {
        const double x = -0.5 * L + j * L / N;
        std::complex<double> s = 0.0;
        for (int k = 0; k < N; ++k) {
            const int kk = k < N / 2 ? k : k - N;
            const double xi = 2.0 * std::numbers::pi * kk / L;
            s += F[k] * std::polar(1.0, -x * xi);
        }
        out[j] = s / L;
    }
    return out;
}

} // namespace oracle
