#include "mlfrac/builtins.hpp"

#include "mlfrac/errors.hpp"
#include "mlfrac/mlf.hpp"
#include "mlfrac/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace mlfrac::builtin {

MatrixSymbol coupled_first_order(const std::vector<double>& a) {
    const int n = static_cast<int>(a.size());
    if (n < 1 || n > 3) throw ConfigError("coupled_first_order needs 1 to 3 coefficients");
    MatrixSymbol s(2, n);
    s.at(0, 0) = PolySymbol::norm_squared_power(n, 1);
    s.at(1, 1) = PolySymbol::norm_squared_power(n, 1);
    s.at(0, 1) = PolySymbol::linear(a);
    s.at(1, 0) = PolySymbol::linear(a);
    return s;
}

MatrixSymbol diagonal_laplacian(int m, int n, int power, double coeff) {
    if (m < 1 || n < 1 || n > 3 || power < 1) throw ConfigError("diagonal_laplacian: bad m, n or power");
    MatrixSymbol s(m, n);
    for (int j = 0; j < m; ++j) s.at(j, j) = PolySymbol::norm_squared_power(n, power) * coeff;
    return s;
}

StateField gaussian(const SpectralGrid& grid, const std::vector<cplx>& amplitudes, double width,
                    const std::vector<double>& center) {
    if (!(width > 0.0)) throw ConfigError("gaussian width must be positive");
    if (!center.empty() && static_cast<int>(center.size()) != grid.dim()) {
        throw ConfigError("gaussian center has the wrong dimension");
    }
    const int m = static_cast<int>(amplitudes.size());
    StateField f(grid, m);
    for (std::size_t p = 0; p < grid.size(); ++p) {
        Eigen::VectorXd x = grid.x(p);
        for (int d = 0; d < grid.dim() && !center.empty(); ++d) x[d] -= center[static_cast<std::size_t>(d)];
        const double g = std::exp(-x.squaredNorm() / (2.0 * width * width));
        for (int j = 0; j < m; ++j) f.data(static_cast<Eigen::Index>(p), j) = amplitudes[static_cast<std::size_t>(j)] * g;
    }
    return f;
}

namespace {

std::vector<double> broadcast(const std::vector<double>& c, int m, const std::string& name) {
    if (c.size() == 1) return std::vector<double>(static_cast<std::size_t>(m), c[0]);
    if (static_cast<int>(c.size()) == m) return c;
    throw ConfigError(name + " needs 1 or " + std::to_string(m) + " coefficients");
}

double max_abs(const std::vector<double>& c) {
    double v = 0.0;
    for (double x : c) v = std::max(v, std::abs(x));
    return v;
}

} // namespace

Nonlinearity nonlinearity(const std::string& name, const std::vector<double>& coeffs, int m) {
    Nonlinearity out{name, {}, 0.0};
    if (name == "linear") {
        Eigen::MatrixXd C = Eigen::MatrixXd::Zero(m, m);
        if (static_cast<int>(coeffs.size()) == m * m && m > 1) {
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k) C(j, k) = coeffs[static_cast<std::size_t>(j * m + k)];
        } else {
            const auto c = broadcast(coeffs, m, name);
            for (int j = 0; j < m; ++j) C(j, j) = c[static_cast<std::size_t>(j)];
        }
        out.L0 = C.cwiseAbs().maxCoeff();
        out.fn = [C, m](double, std::span<const double>, std::span<const cplx> u, std::span<cplx> h) {
            for (int j = 0; j < m; ++j) {
                cplx s = 0.0;
                for (int k = 0; k < m; ++k) s += C(j, k) * u[static_cast<std::size_t>(k)];
                h[static_cast<std::size_t>(j)] = s;
            }
        };
        return out;
    }
    const auto c = broadcast(coeffs, m, name);
    if (name == "sine") {
        out.L0 = max_abs(c);
        out.fn = [c, m](double, std::span<const double>, std::span<const cplx> u, std::span<cplx> h) {
            for (int j = 0; j < m; ++j) h[j] = c[j] * std::sin(u[j].real());
        };
    } else if (name == "cubic") {
        out.L0 = 9.0 / 8.0 * max_abs(c);
        out.fn = [c, m](double, std::span<const double>, std::span<const cplx> u, std::span<cplx> h) {
            for (int j = 0; j < m; ++j) {
                const double r = u[j].real();
                h[j] = c[j] * r * r * r / (1.0 + r * r);
            }
        };
    } else if (name == "logistic-coupling") {
        out.L0 = max_abs(c);
        out.fn = [c, m](double, std::span<const double>, std::span<const cplx> u, std::span<cplx> h) {
            for (int j = 0; j < m; ++j) h[j] = c[j] * std::tanh(u[static_cast<std::size_t>((j + 1) % m)].real());
        };
    } else {
        throw ConfigError("unknown nonlinearity '" + name + "' (linear, sine, cubic, logistic-coupling)");
    }
    return out;
}

double caputo_of_exp_decay(double t, double beta) {
    if (t == 0.0) return beta == 1.0 ? -1.0 : 0.0;
    return -std::pow(t, 1.0 - beta) * mittag_leffler(1.0, 2.0 - beta, -t);
}

SourceSpec manufactured_forcing(const MatrixSymbol& sym, const StateField& G, double beta, const TimeGrid& time,
                                const PointwiseNonlinearity& N, bool dealias) {
    time.validate();
    const SpectralGrid& grid = G.grid;
    const int m = G.m();
    if (sym.m() != m || sym.n() != grid.dim()) throw GridMismatch("manufactured_forcing: symbol does not match G");
    const StateField Ghat = to_frequency(G);
    StateField AG(grid, m, Space::frequency);
    parallel_for(grid.size(), [&](std::size_t p) {
        const auto r = static_cast<Eigen::Index>(p);
        AG.data.row(r) = (eval_symbol(sym, grid.xi(p)) * Ghat.data.row(r).transpose()).transpose();
    });
    const StateField Gphys = to_physical(G);

    std::vector<StateField> samples;
    samples.reserve(static_cast<std::size_t>(time.size()));
    for (int i = 0; i < time.size(); ++i) {
        const double t = time.t(i);
        const double decay = std::exp(-t);
        StateField F(grid, m, Space::frequency);
        F.data = caputo_of_exp_decay(t, beta) * Ghat.data + decay * AG.data;
        if (N) {
            StateField v(grid, m);
            parallel_for(grid.size(), [&](std::size_t p) {
                const auto r = static_cast<Eigen::Index>(p);
                const Eigen::VectorXd x = grid.x(p);
                std::vector<cplx> u(static_cast<std::size_t>(m)), h(static_cast<std::size_t>(m));
                for (int k = 0; k < m; ++k) u[static_cast<std::size_t>(k)] = decay * Gphys.data(r, k);
                N(t, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())), u, h);
                for (int k = 0; k < m; ++k) v.data(r, k) = h[static_cast<std::size_t>(k)];
            });
            StateField vh = fft_forward(v);
            if (dealias) dealias_two_thirds(vh);
            F.data -= vh.data;
        }
        samples.push_back(std::move(F));
    }
    return SourceSpec::sampled(time, std::move(samples));
}

} // namespace mlfrac::builtin
