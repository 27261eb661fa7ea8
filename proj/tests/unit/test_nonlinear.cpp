#include "doctest.h"

#include "mlfrac/builtins.hpp"
#include "mlfrac/nonlinear.hpp"

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"

#include <cmath>
#include <numbers>

using namespace mlfrac;
using fixture::max_abs_diff;

namespace {

struct Manufactured {
    SpectralGrid grid = fixture::periodic_1d(128);
    double beta = 0.5;
    MatrixSymbol sym = builtin::coupled_first_order({1.0});
    StateField G = builtin::gaussian(grid, {1.0, 0.5}, 0.3);
    builtin::Nonlinearity N = builtin::nonlinearity("sine", {0.1}, 2);
    SolveConfig cfg;

    Manufactured() { cfg.time_steps = 256; }

    NonlinearRHS rhs() const {
        return {N.fn, builtin::manufactured_forcing(sym, G, beta, TimeGrid{cfg.T, cfg.time_steps}, N.fn, cfg.dealias),
                N.L0};
    }
    StateField exact(double t) const {
        StateField u = G;
        u.data *= std::exp(-t);
        return u;
    }
};

} // namespace

TEST_CASE("estimate_c1 and gronwall_bound examples") {
    const SpectralGrid g = fixture::periodic_1d(32);
    const Propagator heat1(g, builtin::diagonal_laplacian(1, 1), 1.0);
    CHECK(estimate_c1(heat1, 1.0, 0.5) <= 1.0);
    const Propagator coupled(g, builtin::coupled_first_order({1.0}), 0.5);
    CHECK(estimate_c1(coupled, 2.0, 0.1) == doctest::Approx(4.0 / std::sqrt(std::numbers::pi) * 2.0 / 0.5).epsilon(1e-12));
    CHECK(estimate_c1(coupled, 2.0, 0.1) == doctest::Approx(9.0270333367641).epsilon(1e-10));
    CHECK(estimate_c1(coupled, 0.0, 0.1) == 0.0);

    CHECK(gronwall_bound(0.0, 3.0, 0.5, 2.0) == 0.0);
    CHECK(gronwall_bound(2.0, 1.5, 1.0, 0.7) == doctest::Approx(2.0 * std::exp(1.05)).epsilon(1e-13));
    CHECK(gronwall_bound(1.0, 1.0, 0.5, 1.0) == doctest::Approx(std::exp(1.0) * std::erfc(-1.0)).epsilon(1e-13));
    CHECK(gronwall_bound(1.0, 1.0, 0.5, 1.0) == doctest::Approx(5.00898).epsilon(1e-5));
    CHECK_THROWS_AS(gronwall_bound(1.0, 1.0, 1.5, 1.0), DomainError);
}

TEST_CASE("Lipschitz audit of the named nonlinearities") {
    const SpectralGrid g = fixture::periodic_1d(16);
    for (const char* name : {"linear", "sine", "cubic", "logistic-coupling"}) {
        const auto N = builtin::nonlinearity(name, {0.3, -0.7}, 2);
        const LipschitzAudit ok = audit_lipschitz({N.fn, SourceSpec::zero(), N.L0}, g, 2, 1.0, 1000, 5);
        INFO(name);
        CHECK(ok.samples == 1000);
        CHECK(ok.violations == 0);
        CHECK(ok.max_ratio <= N.L0 * (1.0 + 1e-12));
        const LipschitzAudit bad = audit_lipschitz({N.fn, SourceSpec::zero(), 0.1 * N.L0}, g, 2, 1.0, 1000, 5);
        CHECK(bad.violations > 0);
    }
    CHECK_THROWS_AS(builtin::nonlinearity("quartic", {1.0}, 2), ConfigError);
    CHECK_THROWS_AS(builtin::nonlinearity("sine", {1.0, 2.0, 3.0}, 2), ConfigError);
}

TEST_CASE("zero right-hand side reproduces the linear solve") {
    const SpectralGrid g = fixture::periodic_1d(64);
    const Propagator prop(g, builtin::coupled_first_order({1.0}), 0.5);
    const StateField Phi = builtin::gaussian(g, {1.0, -0.5}, 0.5);
    SolveConfig cfg;
    cfg.time_steps = 64;
    const std::vector<double> ts{0.0, 0.5, 1.0};
    const auto lin = solve_linear(prop, Phi, SourceSpec::zero(), ts, {cfg.T, cfg.time_steps});
    const auto res = solve_nonlinear(prop, Phi, NonlinearRHS{}, ts, cfg);
    REQUIRE(res.fields.size() == ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(res.fields[i].data == lin[i].data);
    CHECK(res.report.converged);
}

TEST_CASE("linear reaction term matches the shifted Mittag-Leffler mode") {
    const SpectralGrid g = fixture::periodic_1d(16);
    const Propagator prop(g, builtin::diagonal_laplacian(1, 1), 0.5);
    const std::size_t p = fixture::index_of_wavenumber(g, 1);
    const StateField Phi = to_physical(fixture::plane_wave(g, p, {1.0}));
    const auto N = builtin::nonlinearity("linear", {-2.0}, 1);
    double prev = 1e300;
    for (int steps : {64, 128, 256}) {
        SolveConfig cfg;
        cfg.time_steps = steps;
        const auto res = solve_nonlinear(prop, Phi, {N.fn, SourceSpec::zero(), N.L0}, {0.5, 1.0}, cfg);
        double err = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            const double t = i == 0 ? 0.5 : 1.0;
            const StateField U = to_frequency(res.fields[i]);
            err = std::max(err, std::abs(U.data(static_cast<Eigen::Index>(p), 0) / g.box_volume() -
                                         oracle::ml_half(-3.0 * std::sqrt(t))));
        }
        MESSAGE("steps=" << steps << " error=" << err);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 1e-4);
}

TEST_CASE("manufactured nonlinear solution") {
    const Manufactured mf;
    const Propagator prop(mf.grid, mf.sym, mf.beta);
    const std::vector<double> ts{0.25, 0.5, 1.0};
    const auto res = solve_nonlinear(prop, mf.G, mf.rhs(), ts, mf.cfg);
    double err = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) err = std::max(err, max_abs_diff(res.fields[i], mf.exact(ts[i])));
    MESSAGE("manufactured max error " << err);
    CHECK(err < 1e-4);

    const PicardReport& r = res.report;
    CHECK(r.converged);
    CHECK_FALSE(r.lipschitz_warning);
    CHECK(r.lipschitz.violations == 0);
    CHECK(r.max_solution_norm <= r.gronwall_bound);
    REQUIRE_FALSE(r.subintervals.empty());
    CHECK(r.subintervals.back().t_end == doctest::Approx(mf.cfg.T));
    for (const auto& s : r.subintervals) {
        CHECK(s.delta_bound <= mf.cfg.target_delta * (1.0 + 1e-12));
        CHECK(s.contraction_factor <= s.delta_bound);
        CHECK(s.fixed_point_residual <= 10.0 * mf.cfg.picard_tol);
        CHECK(s.final_delta < mf.cfg.picard_tol);
    }
}

TEST_CASE("iteration cap raises NoConvergence") {
    const Manufactured mf;
    const Propagator prop(mf.grid, mf.sym, mf.beta);
    SolveConfig cfg = mf.cfg;
    cfg.max_picard_iters = 1;
    cfg.picard_tol = 1e-14;
    try {
        solve_nonlinear(prop, mf.G, mf.rhs(), {1.0}, cfg);
        FAIL("expected NoConvergence");
    } catch (const NoConvergence& e) {
        CHECK_FALSE(e.report().converged);
        CHECK(e.partial().empty());
    }
    cfg.max_picard_iters = 0;
    CHECK_THROWS_AS(solve_nonlinear(prop, mf.G, mf.rhs(), {1.0}, cfg), DomainError);
}

TEST_CASE("stability probe") {
    const SpectralGrid g = fixture::periodic_1d(64);
    const Propagator prop(g, builtin::coupled_first_order({1.0}), 0.5);
    const StateField Phi = builtin::gaussian(g, {1.0, 0.5}, 0.5);
    const StateField bump = builtin::gaussian(g, {1.0, -1.0}, 0.4, {0.5});
    SolveConfig cfg;
    cfg.time_steps = 64;
    const std::vector<double> ts{0.5, 1.0};

    const auto same = stability_probe(prop, Phi, Phi, NonlinearRHS{}, ts, cfg);
    for (const auto& row : same) CHECK(row.max_difference == 0.0);

    const auto probe = [&](const NonlinearRHS& rhs, double eps) {
        StateField Phi2 = Phi;
        Phi2.data += eps * bump.data;
        return stability_probe(prop, Phi, Phi2, rhs, ts, cfg).back().ratio;
    };
    const auto lin = builtin::nonlinearity("linear", {-0.5}, 2);
    const NonlinearRHS linear_rhs{lin.fn, SourceSpec::zero(), lin.L0};
    const double r2 = probe(linear_rhs, 1e-2), r4 = probe(linear_rhs, 1e-4), r6 = probe(linear_rhs, 1e-6);
    CHECK(r4 == doctest::Approx(r2).epsilon(0.01));
    CHECK(r6 == doctest::Approx(r2).epsilon(0.01));

    const auto sine = builtin::nonlinearity("sine", {0.1}, 2);
    const NonlinearRHS sine_rhs{sine.fn, SourceSpec::zero(), sine.L0};
    const double s4 = probe(sine_rhs, 1e-4), s6 = probe(sine_rhs, 1e-6);
    CHECK(s4 / s6 < 2.0);
    CHECK(s6 / s4 < 2.0);
}
