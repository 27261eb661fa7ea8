#include "doctest.h"

#include "mlfrac/symbol.hpp"

#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace mlfrac;

namespace {

MatrixSymbol coupled_1d(double a) {
    MatrixSymbol s(2, 1);
    s.at(0, 0).add_term({2}, 1.0);
    s.at(1, 1).add_term({2}, 1.0);
    s.at(0, 1).add_term({1}, a);
    s.at(1, 0).add_term({1}, a);
    return s;
}

Eigen::MatrixXcd random_hermitian(int m, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXcd X(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) X(i, j) = {n(rng), n(rng)};
    return (X + X.adjoint()) / 2.0;
}

// Characteristic polynomial coefficients by Faddeev-LeVerrier, lowest degree first.
Eigen::VectorXd char_poly(const Eigen::MatrixXcd& A) {
    const int m = static_cast<int>(A.rows());
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(m + 1);
    c[m] = 1.0;
    Eigen::MatrixXcd Mk = Eigen::MatrixXcd::Zero(m, m);
    for (int k = 1; k <= m; ++k) {
        Mk = A * Mk + c[m - k + 1] * Eigen::MatrixXcd::Identity(m, m);
        c[m - k] = -(A * Mk).trace() / static_cast<double>(k);
    }
    return c.real();
}

} // namespace

TEST_CASE("symbol evaluation examples") {
    const MatrixSymbol s = coupled_1d(1.0);
    Eigen::MatrixXcd expect(2, 2);
    expect << 4.0, 2.0, 2.0, 4.0;
    CHECK((eval_symbol(s, Eigen::VectorXd::Constant(1, 2.0)) - expect).norm() == 0.0);
    CHECK(eval_symbol(s, Eigen::VectorXd::Zero(1)).norm() == 0.0);

    MatrixSymbol d(2, 2);
    d.at(0, 0) = PolySymbol::norm_squared_power(2, 1);
    d.at(1, 1) = PolySymbol::norm_squared_power(2, 2);
    const Eigen::MatrixXcd v = eval_symbol(d, Eigen::Vector2d(1.0, 1.0));
    CHECK(v(0, 0) == cplx(2.0));
    CHECK(v(1, 1) == cplx(4.0));
    CHECK(v(0, 1) == cplx(0.0));
    CHECK(d.ell_star_max() == 4);
    CHECK(d.ell_star_min() == 2);
    CHECK(d.tau_star() == 2);

    PolySymbol p(1);
    p.add_term({3}, 2.0).add_term({3}, -2.0);
    CHECK(p.is_zero());
    CHECK(p.order() == -1);
    CHECK(PolySymbol::norm_squared_power(3, 2).terms().size() == 6);
    CHECK(PolySymbol::norm_squared_power(3, 2).is_homogeneous());
}

TEST_CASE("validation of the coupled example") {
    MatrixSymbol s = coupled_1d(1.0);
    // |xi| up to pi N / L = 8.
    SpectralGrid g({16.0 * std::numbers::pi}, {128});
    const ValidationReport r = validate_conditions_A(s, g);
    CHECK(r.structural_ok());
    CHECK(r.hermitian_ok);
    CHECK(r.lattice_hermitian_defect < 1e-10);
    CHECK(r.r0 == doctest::Approx(1.0));
    REQUIRE(s.r0.has_value());
    CHECK(*s.r0 == doctest::Approx(1.0));
    CHECK(r.min_eigenvalue < 0.0);
    CHECK_FALSE(r.solver_admissible());
    for (const auto& np : r.nonpositive_points) CHECK(np.radius <= 1.0 + 1e-12);
}

TEST_CASE("positivity radius of a diagonal symbol is the smallest lattice radius") {
    MatrixSymbol d(2, 1);
    d.at(0, 0).add_term({2}, 1.0);
    d.at(1, 1).add_term({2}, 1.0);
    SpectralGrid g({4.0}, {32});
    const ValidationReport r = validate_conditions_A(d, g);
    CHECK(r.solver_admissible());
    CHECK(r.r0 == doctest::Approx(2.0 * std::numbers::pi / 4.0));
}

TEST_CASE("validation failures") {
    SUBCASE("order dominance") {
        MatrixSymbol s(2, 1);
        s.at(0, 0).add_term({2}, 1.0);
        s.at(1, 1).add_term({2}, 2.0);
        s.at(0, 1).add_term({3}, 1.0);
        s.at(1, 0).add_term({3}, 1.0);
        try {
            validate_structure(s);
            FAIL("expected ValidationFailure");
        } catch (const ValidationFailure& e) {
            const auto& v = e.report().dominance_violations;
            CHECK_FALSE(e.report().order_dominance_ok);
            CHECK(std::find(v.begin(), v.end(), std::pair{0, 1}) != v.end());
        }
    }
    SUBCASE("non-Hermitian coefficients") {
        MatrixSymbol s = coupled_1d(1.0);
        s.at(1, 0) = PolySymbol(1);
        s.at(1, 0).add_term({1}, cplx(0.0, 1.0));
        CHECK_THROWS_AS(validate_structure(s), ValidationFailure);
    }
    SUBCASE("non-elliptic diagonal") {
        MatrixSymbol s(1, 2);
        s.at(0, 0).add_term({2, 0}, 1.0);
        try {
            validate_structure(s);
            FAIL("expected ValidationFailure");
        } catch (const ValidationFailure& e) {
            CHECK_FALSE(e.report().diagonal_elliptic_ok);
        }
    }
    SUBCASE("inhomogeneous diagonal") {
        MatrixSymbol s(1, 1);
        s.at(0, 0).add_term({2}, 1.0).add_term({0}, 1.0);
        CHECK_THROWS_AS(validate_structure(s), ValidationFailure);
    }
}

TEST_CASE("Gershgorin segments") {
    Eigen::Matrix3d D = Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal();
    const auto sd = gershgorin_segments(D);
    for (int j = 0; j < 3; ++j) {
        CHECK(sd[static_cast<std::size_t>(j)].center == j + 1.0);
        CHECK(sd[static_cast<std::size_t>(j)].radius == 0.0);
    }
    Eigen::Matrix2d B;
    B << 4.0, 2.0, 2.0, 4.0;
    const auto sb = gershgorin_segments(B);
    CHECK(sb[0].center == 4.0);
    CHECK(sb[0].radius == 2.0);
    CHECK(sb[0].contains(2.0));
    CHECK(sb[0].contains(6.0));

    const MatrixSymbol s = coupled_1d(1.0);
    for (double xi : {-3.0, 0.3, 1.7, 5.0}) {
        const Eigen::MatrixXcd A = eval_symbol(s, Eigen::VectorXd::Constant(1, xi));
        const auto seg = gershgorin_segments(A);
        for (double lam : {xi * xi - std::abs(xi), xi * xi + std::abs(xi)}) {
            CHECK(std::any_of(seg.begin(), seg.end(), [&](const auto& sg) { return sg.contains(lam, 1e-12); }));
        }
    }
    Eigen::Matrix2d N;
    N << 1.0, 2.0, 0.0, 1.0;
    CHECK_THROWS_AS(gershgorin_segments(N), NotHermitian);
}

TEST_CASE("Gershgorin containment over random Hermitian matrices") {
    std::mt19937_64 rng(20261016);
    std::uniform_int_distribution<int> dim(1, 6);
    for (int trial = 0; trial < 1000; ++trial) {
        const Eigen::MatrixXcd H = random_hermitian(dim(rng), rng);
        const auto seg = gershgorin_segments(H);
        const Eigen::VectorXd lam = eig_hermitian(H).lambdas;
        for (double l : lam) {
            const double slack = 1e-12 * (1.0 + std::abs(l));
            REQUIRE(std::any_of(seg.begin(), seg.end(), [&](const auto& sg) { return sg.contains(l, slack); }));
        }
    }
}

TEST_CASE("eig_hermitian examples") {
    Eigen::MatrixXcd B(2, 2);
    B << 4.0, 2.0, 2.0, 4.0;
    const EigenDecomp e = eig_hermitian(B);
    CHECK(e.lambdas[0] == doctest::Approx(2.0));
    CHECK(e.lambdas[1] == doctest::Approx(6.0));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(e.M(0, 0) - r) < 1e-14);
    CHECK(std::abs(e.M(1, 0) + r) < 1e-14);
    CHECK(std::abs(e.M(0, 1) - r) < 1e-14);
    CHECK(std::abs(e.M(1, 1) - r) < 1e-14);

    const EigenDecomp id = eig_hermitian(Eigen::MatrixXcd::Identity(3, 3));
    CHECK((id.lambdas - Eigen::Vector3d::Ones()).norm() == 0.0);
    CHECK((id.M - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-15);
}

TEST_CASE("eig_hermitian agrees with characteristic-polynomial roots") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 2 + trial % 4;
        const Eigen::MatrixXcd H = random_hermitian(m, rng);
        const EigenDecomp e = eig_hermitian(H);

        Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
        solver.compute(char_poly(H));
        std::vector<double> roots;
        for (const auto& z : solver.roots()) roots.push_back(z.real());
        std::sort(roots.begin(), roots.end());
        const double scale = H.norm();
        for (int q = 0; q < m; ++q) CHECK(std::abs(e.lambdas[q] - roots[static_cast<std::size_t>(q)]) < 1e-8 * scale);

        const Eigen::MatrixXcd rebuilt = e.M * e.lambdas.asDiagonal() * e.M.adjoint();
        CHECK((rebuilt - H).norm() < 1e-12 * scale);
        CHECK((e.M.adjoint() * e.M - Eigen::MatrixXcd::Identity(m, m)).norm() < 1e-12);
        CHECK((e.Minv - e.M.adjoint()).norm() < 1e-12);
        CHECK(e.M.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
        for (int q = 0; q < m; ++q) {
            Eigen::Index first = 0;
            while (std::abs(e.M(first, q)) <= 1e-12) ++first;
            CHECK(e.M(first, q).imag() == 0.0);
            CHECK(e.M(first, q).real() > 0.0);
        }
    }
}

TEST_CASE("eigenvalue asymptotics") {
    const auto rows = corollary_asymptotics_check(coupled_1d(1.0), {4.0, 16.0, 64.0});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].max_deviation == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(rows[1].max_deviation == doctest::Approx(0.0625).epsilon(1e-12));
    CHECK(rows[2].max_deviation == doctest::Approx(0.015625).epsilon(1e-12));

    MatrixSymbol d(2, 2);
    d.at(0, 0) = PolySymbol::norm_squared_power(2, 1);
    d.at(1, 1) = PolySymbol::norm_squared_power(2, 2);
    for (const auto& row : corollary_asymptotics_check(d, {1.0, 10.0})) CHECK(row.max_deviation < 1e-14);

    MatrixSymbol bad(2, 1);
    bad.at(0, 0).add_term({2}, 1.0);
    bad.at(1, 1).add_term({2}, 1.0);
    bad.at(0, 1).add_term({2}, 1.0);
    bad.at(1, 0).add_term({2}, 1.0);
    CHECK_THROWS_AS(corollary_asymptotics_check(bad, {4.0}), ValidationFailure);
}
