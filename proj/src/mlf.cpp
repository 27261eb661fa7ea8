#include "mlfrac/mlf.hpp"

#include "mlfrac/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

namespace mlfrac {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kSeriesRadius = 5.0;
constexpr double kAcceptRel = 2e-14;
// Largest exponent before exp() overflows a double.
constexpr double kMaxExp = 709.0;

using cplx = std::complex<double>;

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::nearbyint(x); }

// Arguments mu - rho k are formed in floating point; snap those within
// roundoff of a pole of Gamma onto it.
double snap_to_pole(double x) {
    const double r = std::nearbyint(x);
    return (r <= 0.0 && std::abs(x - r) <= 64.0 * kEps * std::max(1.0, std::abs(x))) ? r : x;
}

// log|1/Gamma(x)| and sign, via reflection for x < 0.5.
double log_abs_rgamma(double x, int& sign) {
    if (is_nonpositive_integer(x)) {
        sign = 0;
        return -std::numeric_limits<double>::infinity();
    }
    if (x >= 0.5) {
        sign = 1;
        return -std::lgamma(x);
    }
    // 1/Gamma(x) = Gamma(1 - x) sin(pi x) / pi
    const double s = std::sin(std::numbers::pi * x);
    sign = s > 0 ? 1 : -1;
    return std::lgamma(1.0 - x) + std::log(std::abs(s)) - std::log(std::numbers::pi);
}

std::string describe(const MLParams& p, double z) {
    return "rho=" + std::to_string(p.rho) + " mu=" + std::to_string(p.mu) + " z=" + std::to_string(z);
}

struct SeriesOut {
    double value;
    // Sum of |term| weighted by its rounding exposure; times eps bounds the rounding error.
    double abs_sum;
    double tail;
};

// Power series; terms formed in log space so large |z| does not overflow early.
SeriesOut power_series(const MLParams& p, double z) {
    const double logz = std::log(std::abs(z));
    double sum = 1.0 / std::tgamma(p.mu);
    if (!std::isfinite(sum)) sum = rgamma(p.mu);
    double abs_sum = std::abs(sum);
    double tail = 0.0;
    double prev_abs = abs_sum;
    for (int k = 1; k < 100000; ++k) {
        int sign = 0;
        const double lg = log_abs_rgamma(p.rho * k + p.mu, sign);
        const double log_mag = k * logz + lg;
        if (log_mag > kMaxExp) {
            if (z > 0.0) throw OverflowError("Mittag-Leffler series overflow at " + describe(p, z));
            // Alternating series beyond double range: unusable, let the caller fall back.
            const double inf = std::numeric_limits<double>::infinity();
            return {std::numeric_limits<double>::quiet_NaN(), inf, inf};
        }
        double term = sign * std::exp(log_mag);
        if (z < 0 && (k % 2 == 1)) term = -term;
        sum += term;
        abs_sum += std::abs(term) * (2.0 + std::abs(log_mag));
        const double mag = std::abs(term);
        // Terms decrease monotonically once rho k + mu passes the peak; stop
        // when the ratio of the current term to the running sum drops below 1e-16.
        if (mag <= prev_abs && mag <= 1e-17 * std::abs(sum) && k > 2) {
            tail = mag;
            break;
        }
        prev_abs = mag;
    }
    return {sum, abs_sum, tail};
}

struct AsymptoticOut {
    double value;
    double error;
};

// E_{rho,mu}(z) ~ -sum_{k>=1} z^{-k} / Gamma(mu - rho k), z -> -inf, 0 < rho < 1.
// Truncated before the smallest nonzero term; that term bounds the error.
AsymptoticOut asymptotic_series(const MLParams& p, double z) {
    const double logx = std::log(-z);
    double sum = 0.0;
    double last_nonzero = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 4000; ++k) {
        int sign = 0;
        const double lg = log_abs_rgamma(snap_to_pole(p.mu - p.rho * k), sign);
        if (sign == 0) continue;
        const double mag = std::exp(-k * logx + lg);
        if (mag >= last_nonzero) {
            return {sum, last_nonzero};
        }
        // -z^{-k} with z = -x: -(-1)^k x^{-k}
        const double term = ((k % 2 == 0) ? -1.0 : 1.0) * sign * mag;
        if (mag < 1e-18 * std::abs(sum)) {
            return {sum + term, mag};
        }
        sum += term;
        last_nonzero = mag;
    }
    return {sum, last_nonzero};
}

struct IntegralOut {
    double value;
    double error;
};

// Hankel contour around the branch cut on the negative axis: two rays
// arg s = +-pi for |s| >= R joined by the circle |s| = R. For z = -x < 0 and
// rho < 1 there are no poles on the principal sheet, so
//   E = (1/pi) int_R^inf e^{-r} Im[-g(r e^{i pi})] dr
//     + (1/pi) int_0^pi Re[e^s s g(s)] dtheta,  s = R e^{i theta},
// where g(s) = s^(rho-mu) / (s^rho + x).
IntegralOut hankel_integral(const MLParams& p, double z) {
    using boost::math::quadrature::gauss_kronrod;
    const double x = -z;
    const double rho = p.rho;
    const double mu = p.mu;
    const double pole_radius = std::pow(x, 1.0 / rho);
    double R = 1.0;
    if (std::abs(pole_radius - 1.0) < 0.5) R = 0.5 * pole_radius;

    const double sin_mu = std::sin(std::numbers::pi * mu);
    const double sin_rho_mu = std::sin(std::numbers::pi * (rho - mu));
    const double cos_rho = std::cos(std::numbers::pi * rho);
    auto ray = [&](double r) {
        const double rr = std::pow(r, rho);
        const double denom = rr * rr + 2.0 * x * rr * cos_rho + x * x;
        return std::exp(-r) * std::pow(r, rho - mu) * (rr * sin_mu - x * sin_rho_mu) / denom;
    };
    auto circle = [&](double theta) {
        const cplx s = std::polar(R, theta);
        const cplx lg = std::log(s);
        const cplx s_rho = std::exp(rho * lg);
        const cplx num = std::exp(s + (rho - mu + 1.0) * lg);
        return (num / (s_rho + x)).real();
    };

    double err_ray = 0.0;
    double err_circle = 0.0;
    double l1_ray = 0.0;
    double l1_circle = 0.0;
    // e^{-r} below 1e-22 of the integrand scale past R + 50.
    const double ray_part =
        gauss_kronrod<double, 61>::integrate(ray, R, R + 50.0, 8, 1e-14, &err_ray, &l1_ray);
    const double circle_part =
        gauss_kronrod<double, 61>::integrate(circle, 0.0, std::numbers::pi, 8, 1e-14, &err_circle, &l1_circle);
    const double value = (ray_part + circle_part) / std::numbers::pi;
    const double error =
        (err_ray + err_circle) / std::numbers::pi + 8.0 * kEps * (l1_ray + l1_circle) / std::numbers::pi;
    return {value, error};
}

// rho = 1: E_{1,mu}(-x) = e^{-x}/Gamma(mu) * 1F1(mu-1; mu; x) (Kummer), whose
// series has positive terms for mu >= 1.
SeriesOut kummer_series(double mu, double x) {
    const double pref = std::exp(-x) * rgamma(mu);
    if (mu == 1.0) return {pref, pref, 0.0};
    double sum = 1.0;
    double power = 1.0; // x^k / k!
    double tail = 0.0;
    for (int k = 1; k < 100000; ++k) {
        power *= x / k;
        const double term = (mu - 1.0) / (mu - 1.0 + k) * power;
        sum += term;
        if (k > x && std::abs(term) < 1e-17 * std::abs(sum)) {
            tail = std::abs(term);
            break;
        }
    }
    return {pref * sum, std::abs(pref) * sum, std::abs(pref) * tail};
}

} // namespace

void MLParams::validate() const {
    if (!(rho > 0.0 && rho <= 1.0)) throw DomainError("Mittag-Leffler rho must lie in (0,1], got " + std::to_string(rho));
    if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("Mittag-Leffler mu must be positive, got " + std::to_string(mu));
}

std::string_view to_string(MLRegime regime) {
    switch (regime) {
    case MLRegime::series: return "series";
    case MLRegime::asymptotic: return "asymptotic";
    case MLRegime::integral: return "integral";
    }
    return "unknown";
}

double rgamma(double x) {
    int sign = 0;
    const double lg = log_abs_rgamma(x, sign);
    if (sign == 0) return 0.0;
    if (x > 0.0 && x < 170.0) return 1.0 / std::tgamma(x);
    return sign * std::exp(lg);
}

MLEvalResult ml_eval(const MLParams& params, double z) {
    params.validate();
    if (!std::isfinite(z)) throw DomainError("Mittag-Leffler argument must be finite");
    if (z == 0.0) return {rgamma(params.mu), MLRegime::series, 0.0};

    if (z > 0.0) {
        if (std::log(z) / params.rho > std::log(kMaxExp)) {
            throw OverflowError("E_{rho,mu}(z) exceeds double range for " + describe(params, z));
        }
        const auto s = power_series(params, z);
        if (!std::isfinite(s.value)) throw OverflowError("E_{rho,mu}(z) exceeds double range for " + describe(params, z));
        return {s.value, MLRegime::series, s.tail + kEps * s.abs_sum};
    }

    if (params.rho == 1.0) {
        const double x = -z;
        if (params.mu >= 1.0) {
            const auto s = kummer_series(params.mu, x);
            return {s.value, MLRegime::series, s.tail + kEps * s.abs_sum};
        }
        // mu < 1: the Kummer form cancels; only the direct series is usable.
        const auto s = power_series(params, z);
        const double err = s.tail + kEps * s.abs_sum;
        if (err > 1e-10 * std::abs(s.value)) {
            throw DomainError("E_{1,mu}(z) with mu < 1 is not supported this far out: " + describe(params, z));
        }
        return {s.value, MLRegime::series, err};
    }

    if (-z <= kSeriesRadius) {
        const auto s = power_series(params, z);
        const double err = s.tail + kEps * s.abs_sum;
        if (err <= kAcceptRel * std::abs(s.value)) return {s.value, MLRegime::series, err};
    } else {
        const auto a = asymptotic_series(params, z);
        if (a.error <= kAcceptRel * std::abs(a.value)) return {a.value, MLRegime::asymptotic, a.error};
    }
    const auto q = hankel_integral(params, z);
    return {q.value, MLRegime::integral, q.error};
}

double mittag_leffler(double rho, double mu, double z) { return ml_eval({rho, mu}, z).value; }

bool ml_bound_check(const MLParams& params, double t, double C) {
    if (!(t >= 0.0)) throw DomainError("ml_bound_check requires t >= 0");
    return std::abs(ml_eval(params, -t).value) <= C / (1.0 + t);
}

double ml_laplace_pair_check(const MLParams& params, double lambda, double s) {
    params.validate();
    if (!(s > 0.0) || !(lambda > 0.0)) throw DomainError("Laplace pair check requires s > 0 and lambda > 0");
    if (!(lambda * std::pow(s, -params.rho) < 1.0)) throw DomainError("Laplace pair check requires lambda s^-rho < 1");

    // |E_{rho,mu}(-y)| <= 1/Gamma(mu) * 2 covers the integrand; pick the
    // truncation point where e^{-s t} t^{mu-1} has dropped below 1e-17.
    double t_max = 40.0 / s;
    for (int i = 0; i < 60; ++i) {
        const double tail = std::exp(-s * t_max) * std::pow(t_max, params.mu - 1.0) / s;
        if (tail < 1e-17) break;
        t_max *= 1.25;
    }
    // t = u^{1/mu} absorbs the t^{mu-1} weight: t^{mu-1} dt = du / mu.
    const double u_max = std::pow(t_max, params.mu);
    auto integrand = [&](double u) {
        const double t = std::pow(u, 1.0 / params.mu);
        return std::exp(-s * t) * ml_eval(params, -lambda * std::pow(t, params.rho)).value / params.mu;
    };
    boost::math::quadrature::tanh_sinh<double> integrator(12);
    double error = 0.0;
    double l1 = 0.0;
    const double integral = integrator.integrate(integrand, 0.0, u_max, 1e-14, &error, &l1);
    if (!(error <= 1e-10 * std::max(1.0, l1))) {
        throw QuadratureError("Laplace pair quadrature did not reach tolerance (error " + std::to_string(error) + ")");
    }
    const double closed_form = std::pow(s, params.rho - params.mu) / (std::pow(s, params.rho) + lambda);
    return std::abs(integral - closed_form);
}

} // namespace mlfrac
