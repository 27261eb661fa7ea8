#include "doctest.h"

#include "mlfrac/errors.hpp"
#include "mlfrac/mlf.hpp"

#include "../support/oracles.hpp"

#include <cmath>
#include <vector>

using namespace mlfrac;

namespace {

struct RefRow {
    double rho, mu, z;
    long double value;
};

const RefRow kReference[] = {
#include "../data/ml_reference.inc"
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace

TEST_CASE("ml_eval: worked examples") {
    CHECK(std::abs(mittag_leffler(1.0, 1.0, -1.0) - 0.36787944117144233) < 1e-12);
    CHECK(std::abs(mittag_leffler(0.5, 0.5, 0.0) - 0.56418958354775628) < 1e-12);
    // e^4 erfc(2); the commonly quoted 0.2554025 is off in the sixth digit.
    CHECK(std::abs(mittag_leffler(0.5, 1.0, -2.0) - oracle::ml_half(-2.0)) < 1e-12);
    CHECK(std::abs(oracle::ml_half(-2.0) - 0.25539567631050574) < 1e-15);
    CHECK(std::abs(mittag_leffler(0.5, 1.0, 1.0) - 5.00898) < 1e-5);
}

TEST_CASE("ml_eval: frozen high-precision table") {
    double worst = 0.0;
    for (const auto& r : kReference) {
        const auto res = ml_eval({r.rho, r.mu}, r.z);
        const double ref = static_cast<double>(r.value);
        const double err = std::abs(res.value - ref);
        const double scale = std::abs(ref);
        worst = std::max(worst, err / scale);
        INFO("rho=" << r.rho << " mu=" << r.mu << " z=" << r.z << " got " << res.value << " want " << ref
                    << " regime " << to_string(res.regime));
        CHECK(err <= 1e-12 * scale + 1e-15);
        CHECK(err <= std::max(res.est_abs_error, 1e-12 * (1.0 + scale)));
    }
    MESSAGE("worst relative error vs table: " << worst);
}

TEST_CASE("ml_eval: half-order identity and exponential collapse") {
    for (double z = -50.0; z <= 0.0; z += 0.125) {
        INFO("z=" << z);
        CHECK(rel(mittag_leffler(0.5, 1.0, z), oracle::ml_half(z)) <= 1e-10);
    }
    for (double z = -50.0; z <= 5.0; z += 0.125) {
        INFO("z=" << z);
        CHECK(rel(mittag_leffler(1.0, 1.0, z), std::exp(z)) <= 1e-12);
    }
}

TEST_CASE("ml_eval: recurrence E(rho,mu) = z E(rho,mu+rho) + 1/Gamma(mu)") {
    for (double rho : {0.3, 0.5, 0.8}) {
        for (double mu : {rho, 1.0, rho + 1.0}) {
            for (double z = -50.0; z <= 3.0; z += 0.37) {
                const double lhs = mittag_leffler(rho, mu, z);
                const double rhs = z * mittag_leffler(rho, mu + rho, z) + 1.0 / std::tgamma(mu);
                INFO("rho=" << rho << " mu=" << mu << " z=" << z);
                CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
            }
        }
    }
}

TEST_CASE("ml_eval: errors and regimes") {
    CHECK_THROWS_AS(ml_eval({0.0, 1.0}, -1.0), DomainError);
    CHECK_THROWS_AS(ml_eval({1.5, 1.0}, -1.0), DomainError);
    CHECK_THROWS_AS(ml_eval({0.5, 0.0}, -1.0), DomainError);
    CHECK_THROWS_AS(ml_eval({0.5, -1.0}, -1.0), DomainError);
    CHECK_THROWS_AS(ml_eval({0.5, 1.0}, 40.0), OverflowError);
    CHECK_THROWS_AS(ml_eval({1.0, 1.0}, 800.0), OverflowError);
    CHECK(ml_eval({0.5, 1.0}, -1.0).regime == MLRegime::series);
    CHECK(ml_eval({0.5, 1.0}, -40.0).regime == MLRegime::asymptotic);
    CHECK(to_string(MLRegime::integral) == "integral");
    // deterministic
    CHECK(ml_eval({0.7, 1.7}, -3.3).value == ml_eval({0.7, 1.7}, -3.3).value);
}

TEST_CASE("rgamma") {
    CHECK(rgamma(0.0) == 0.0);
    CHECK(rgamma(-3.0) == 0.0);
    CHECK(rel(rgamma(0.5), 1.0 / std::sqrt(std::numbers::pi)) < 1e-15);
    CHECK(rel(rgamma(-0.5), -0.5 / std::sqrt(std::numbers::pi)) < 1e-14);
    CHECK(rel(rgamma(-10.3), 1.0 / std::tgamma(-10.3)) < 1e-13);
    CHECK(rgamma(150.0) > 0.0);
    CHECK(rgamma(200.0) == 0.0);
}

TEST_CASE("ml_bound_check examples and envelope") {
    CHECK(ml_bound_check({0.8, 1.0}, 0.0, 1.0));
    CHECK(ml_bound_check({1.0, 1.0}, 10.0, 1.0));
    double cmin = 0.0;
    for (double t = 0.0; t <= 1000.0; t += 0.5) {
        CHECK(ml_bound_check({0.5, 0.5}, t, 2.0));
        cmin = std::max(cmin, std::abs(mittag_leffler(0.5, 0.5, -t)) * (1.0 + t));
    }
    MESSAGE("minimal admissible C for (0.5, 0.5) on [0, 1000]: " << cmin);
}

TEST_CASE("complete monotonicity surrogate: E_{rho,1}(-t) nonincreasing") {
    for (double rho : {0.2, 0.3, 0.5, 0.7, 0.9, 1.0}) {
        double prev = mittag_leffler(rho, 1.0, 0.0);
        for (double t = 0.01; t <= 200.0; t *= 1.02) {
            const double v = mittag_leffler(rho, 1.0, -t);
            INFO("rho=" << rho << " t=" << t);
            CHECK(v <= prev * (1.0 + 1e-13));
            prev = v;
        }
    }
}

TEST_CASE("Laplace pair examples") {
    CHECK(ml_laplace_pair_check({1.0, 1.0}, 1.0, 2.0) < 1e-10);
    CHECK(ml_laplace_pair_check({0.5, 0.5}, 1.0, 3.0) < 1e-8);
    CHECK(ml_laplace_pair_check({0.7, 1.0}, 5.0, 10.0) < 1e-8);
    CHECK_THROWS_AS(ml_laplace_pair_check({0.5, 1.0}, 4.0, 1.0), DomainError);
}

TEST_CASE("kernel envelope t^{rho-1} E_{rho,rho}(-lambda t^rho) <= C lambda^{eps-1} t^{eps rho - 1}") {
    const double eps = 0.5;
    for (double rho : {0.3, 0.5, 0.8}) {
        double cmax = 0.0;
        for (double lambda = 0.1; lambda <= 1000.0; lambda *= 1.5) {
            for (double t = 1e-4; t <= 100.0; t *= 1.5) {
                const double k = std::pow(t, rho - 1.0) * mittag_leffler(rho, rho, -lambda * std::pow(t, rho));
                const double env = std::pow(lambda, eps - 1.0) * std::pow(t, eps * rho - 1.0);
                cmax = std::max(cmax, k / env);
            }
        }
        INFO("rho=" << rho);
        CHECK(std::isfinite(cmax));
        CHECK(cmax < 10.0);
    }
}
