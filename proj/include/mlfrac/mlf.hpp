#pragma once

#include <string_view>

namespace mlfrac {

/// Parameters (rho, mu) of the two-parameter Mittag-Leffler function
/// E_{rho,mu}(z) = sum_k z^k / Gamma(rho k + mu), with 0 < rho <= 1 and mu > 0.
struct MLParams {
    double rho = 1.0;
    double mu = 1.0;

    /// Throws DomainError unless 0 < rho <= 1 and mu > 0.
    void validate() const;
};

enum class MLRegime { series, asymptotic, integral };

std::string_view to_string(MLRegime regime);

struct MLEvalResult {
    double value = 0.0;
    MLRegime regime = MLRegime::series;
    /// Bound on the truncation/quadrature error of the branch actually taken.
    double est_abs_error = 0.0;
};

/// Evaluates E_{rho,mu}(z) for real z.
///
/// Negative arguments use the power series while cancellation is harmless,
/// the algebraic asymptotic expansion for large |z|, and otherwise a Hankel
/// contour integral of the inverse Laplace transform of
/// s^(rho-mu) / (s^rho - z). Positive arguments use the series (all terms
/// positive) and raise OverflowError once exp(z^(1/rho)) leaves double range.
MLEvalResult ml_eval(const MLParams& params, double z);

/// Shorthand for ml_eval(params, z).value.
double mittag_leffler(double rho, double mu, double z);

/// 1 / Gamma(x) for any real x (zero at the poles of Gamma).
double rgamma(double x);

/// |E_{rho,mu}(-t)| <= C / (1 + t).
bool ml_bound_check(const MLParams& params, double t, double C);

/// |int_0^inf e^{-s t} t^{mu-1} E_{rho,mu}(-lambda t^rho) dt - s^{rho-mu}/(s^rho+lambda)|,
/// with the integral computed by tanh-sinh quadrature on a truncated range.
/// Requires s > 0, lambda > 0 and lambda s^{-rho} < 1.
double ml_laplace_pair_check(const MLParams& params, double lambda, double s);

} // namespace mlfrac
