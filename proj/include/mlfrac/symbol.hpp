#pragma once

#include "mlfrac/errors.hpp"
#include "mlfrac/grid.hpp"

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mlfrac {

using MultiIndex = std::vector<int>;

/// Polynomial sum_alpha a_alpha xi^alpha in n real variables with complex coefficients.
class PolySymbol {
public:
    PolySymbol() = default;
    explicit PolySymbol(int n) : n_(n) {}

    /// Adds c to the coefficient of xi^alpha; terms that cancel to zero are dropped.
    PolySymbol& add_term(const MultiIndex& alpha, cplx c);

    int dim() const { return n_; }
    const std::map<MultiIndex, cplx>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    /// Largest |alpha| among stored terms; -1 for the zero polynomial.
    int order() const;
    bool is_homogeneous() const;

    template <typename Derived>
    cplx eval(const Eigen::MatrixBase<Derived>& xi) const {
        cplx sum = 0.0;
        for (const auto& [alpha, c] : terms_) {
            double mono = 1.0;
            for (int d = 0; d < n_; ++d) {
                for (int p = 0; p < alpha[d]; ++p) mono *= xi[d];
            }
            sum += c * mono;
        }
        return sum;
    }

    /// Polynomial with conjugated coefficients (its value is conj of this one at real xi).
    PolySymbol conj() const;

    PolySymbol operator+(const PolySymbol& other) const;
    PolySymbol operator*(cplx s) const;

    /// (|xi|^2)^p expanded into monomials.
    static PolySymbol norm_squared_power(int n, int p);
    /// sum_j a_j xi_j.
    static PolySymbol linear(const std::vector<double>& a);

private:
    int n_ = 0;
    std::map<MultiIndex, cplx> terms_;
};

/// m x m matrix of PolySymbols together with the order metadata of its entries.
class MatrixSymbol {
public:
    MatrixSymbol() = default;
    MatrixSymbol(int m, int n);

    int m() const { return m_; }
    int n() const { return n_; }
    PolySymbol& at(int j, int k) { return entries_[static_cast<std::size_t>(j * m_ + k)]; }
    const PolySymbol& at(int j, int k) const { return entries_[static_cast<std::size_t>(j * m_ + k)]; }

    int order(int j, int k) const { return at(j, k).order(); }
    int ell_star_max() const;
    int ell_star_min() const;
    int tau_star() const { return ell_star_max() - ell_star_min(); }

    /// Positivity radius recorded by the last successful validation.
    std::optional<double> r0;

private:
    int m_ = 0;
    int n_ = 0;
    std::vector<PolySymbol> entries_;
};

template <typename Derived>
Eigen::MatrixXcd eval_symbol(const MatrixSymbol& sym, const Eigen::MatrixBase<Derived>& xi) {
    Eigen::MatrixXcd out(sym.m(), sym.m());
    for (int j = 0; j < sym.m(); ++j) {
        for (int k = 0; k < sym.m(); ++k) out(j, k) = sym.at(j, k).eval(xi);
    }
    return out;
}

struct NonpositivePoint {
    std::size_t index = 0;
    double radius = 0.0;
    double min_eigenvalue = 0.0;
};

struct ValidationReport {
    bool hermitian_ok = false;
    bool order_dominance_ok = false;
    bool diagonal_homogeneous_ok = false;
    bool diagonal_elliptic_ok = false;
    /// Entries (j,k) whose coefficients are not conjugate to those of (k,j).
    std::vector<std::pair<int, int>> hermitian_violations;
    /// Pairs (k,j), k != j, with order(k,j) >= order(j,j).
    std::vector<std::pair<int, int>> dominance_violations;
    std::vector<int> non_homogeneous_diagonals;
    std::vector<int> non_elliptic_diagonals;
    double lattice_hermitian_defect = 0.0;
    double r0 = 0.0;
    double min_eigenvalue = 0.0;
    /// Lattice points whose smallest eigenvalue is not positive (at most 64 listed).
    std::vector<NonpositivePoint> nonpositive_points;
    std::size_t nonpositive_count = 0;

    bool structural_ok() const {
        return hermitian_ok && order_dominance_ok && diagonal_homogeneous_ok && diagonal_elliptic_ok;
    }
    /// Structurally valid and no sampled eigenvalue is negative.
    bool solver_admissible() const;
    std::string summary() const;
};

class ValidationFailure : public Error {
public:
    ValidationFailure(const std::string& what, ValidationReport report)
        : Error(what), report_(std::move(report)) {}
    const char* name() const noexcept override { return "ValidationFailure"; }
    const ValidationReport& report() const { return report_; }

private:
    ValidationReport report_;
};

/// Tolerance below which an eigenvalue counts as zero at a matrix of Frobenius norm `scale`.
inline double eigen_zero_tolerance(double scale) { return 1e-12 * (1.0 + scale); }

/// Coefficient-level checks only (no lattice). Throws ValidationFailure on failure.
ValidationReport validate_structure(const MatrixSymbol& sym);

/// Full check on the lattice of `grid`; records the positivity radius in sym.r0.
///
/// R0 is the smallest positive lattice radius r such that A(xi) is positive
/// definite at every lattice point with |xi| > r.
ValidationReport validate_conditions_A(MatrixSymbol& sym, const SpectralGrid& grid);

/// Unit vectors used to sample the sphere: +-1 for n=1, 256 angles for n=2,
/// a 256-point Fibonacci lattice for n=3.
std::vector<Eigen::VectorXd> sphere_directions(int n, int count = 256);

/// Relative Frobenius distance from Hermitian: ||H - H^*|| / max(||H||, tiny).
template <typename Derived>
double hermitian_defect(const Eigen::MatrixBase<Derived>& H) {
    const double scale = H.norm();
    if (scale == 0.0) return 0.0;
    return (H - H.adjoint()).norm() / scale;
}

struct GershgorinSegment {
    double center = 0.0;
    double radius = 0.0;
    bool contains(double x, double slack = 0.0) const { return std::abs(x - center) <= radius + slack; }
};

template <typename Derived>
std::vector<GershgorinSegment> gershgorin_segments(const Eigen::MatrixBase<Derived>& H) {
    if (H.rows() != H.cols()) throw NotHermitian("gershgorin_segments needs a square matrix");
    if (hermitian_defect(H) > 1e-10) throw NotHermitian("gershgorin_segments needs a Hermitian matrix");
    std::vector<GershgorinSegment> out;
    out.reserve(static_cast<std::size_t>(H.rows()));
    for (Eigen::Index j = 0; j < H.rows(); ++j) {
        double r = 0.0;
        for (Eigen::Index k = 0; k < H.cols(); ++k) {
            if (k != j) r += std::abs(H(j, k));
        }
        out.push_back({std::real(H(j, j)), r});
    }
    return out;
}

struct EigenDecomp {
    Eigen::VectorXd lambdas;
    Eigen::MatrixXcd M;
    Eigen::MatrixXcd Minv;
};

/// Ascending eigenvalues and orthonormal eigenvectors (columns of M), with the
/// first non-negligible component of every eigenvector real and positive.
EigenDecomp eig_hermitian(const Eigen::MatrixXcd& H);

struct AsymptoticsRow {
    double radius = 0.0;
    double max_deviation = 0.0;
};

/// For each radius, max over sphere directions of max_j |lambda_j / d_j - 1| where
/// the sorted eigenvalues are paired with the sorted diagonal values.
std::vector<AsymptoticsRow> corollary_asymptotics_check(const MatrixSymbol& sym, const std::vector<double>& radii);

} // namespace mlfrac
