#include "mlfrac/fracops.hpp"

namespace mlfrac {

Eigen::VectorXd l1_weights(int count, double beta) {
    Eigen::VectorXd b(count);
    const double p = 1.0 - beta;
    for (int j = 0; j < count; ++j) b[j] = j == 0 ? 1.0 : std::pow(j + 1.0, p) - std::pow(static_cast<double>(j), p);
    return b;
}

Eigen::VectorXd rl_weights(int n, double beta) {
    Eigen::VectorXd a(n + 1);
    const double q = beta + 1.0;
    a[0] = std::pow(n - 1.0, q) - (n - 1.0 - beta) * std::pow(static_cast<double>(n), beta);
    for (int j = 1; j < n; ++j) {
        const double m = n - j;
        a[j] = std::pow(m + 1.0, q) - 2.0 * std::pow(m, q) + std::pow(m - 1.0, q);
    }
    a[n] = 1.0;
    return a;
}

} // namespace mlfrac
