#include "mlfrac/symbol.hpp"

#include "mlfrac/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mlfrac {

PolySymbol& PolySymbol::add_term(const MultiIndex& alpha, cplx c) {
    if (static_cast<int>(alpha.size()) != n_) {
        throw DomainError("multi-index length " + std::to_string(alpha.size()) + " does not match dimension " +
                          std::to_string(n_));
    }
    for (int a : alpha) {
        if (a < 0) throw DomainError("multi-index entries must be nonnegative");
    }
    const cplx sum = terms_[alpha] + c;
    if (sum == cplx(0.0)) {
        terms_.erase(alpha);
    } else {
        terms_[alpha] = sum;
    }
    return *this;
}

int PolySymbol::order() const {
    int ell = -1;
    for (const auto& [alpha, c] : terms_) {
        int s = 0;
        for (int a : alpha) s += a;
        ell = std::max(ell, s);
    }
    return ell;
}

bool PolySymbol::is_homogeneous() const {
    const int ell = order();
    for (const auto& [alpha, c] : terms_) {
        int s = 0;
        for (int a : alpha) s += a;
        if (s != ell) return false;
    }
    return true;
}

PolySymbol PolySymbol::conj() const {
    PolySymbol out(n_);
    for (const auto& [alpha, c] : terms_) out.terms_[alpha] = std::conj(c);
    return out;
}

PolySymbol PolySymbol::operator+(const PolySymbol& other) const {
    if (other.n_ != n_) throw DomainError("PolySymbol dimensions differ");
    PolySymbol out = *this;
    for (const auto& [alpha, c] : other.terms_) out.add_term(alpha, c);
    return out;
}

PolySymbol PolySymbol::operator*(cplx s) const {
    PolySymbol out(n_);
    if (s == cplx(0.0)) return out;
    for (const auto& [alpha, c] : terms_) out.terms_[alpha] = c * s;
    return out;
}

namespace {

double factorial(int k) { return std::tgamma(k + 1.0); }

// Calls f(alpha) for every alpha in N^n with |alpha| = total.
template <typename F>
void for_each_composition(int n, int total, MultiIndex& alpha, int axis, F&& f) {
    if (axis == n - 1) {
        alpha[axis] = total;
        f(alpha);
        return;
    }
    for (int a = 0; a <= total; ++a) {
        alpha[axis] = a;
        for_each_composition(n, total - a, alpha, axis + 1, f);
    }
}

} // namespace

PolySymbol PolySymbol::norm_squared_power(int n, int p) {
    if (n < 1 || p < 0) throw DomainError("norm_squared_power needs n >= 1 and p >= 0");
    PolySymbol out(n);
    MultiIndex k(static_cast<std::size_t>(n));
    for_each_composition(n, p, k, 0, [&](const MultiIndex& kk) {
        double coef = factorial(p);
        MultiIndex alpha(static_cast<std::size_t>(n));
        for (int d = 0; d < n; ++d) {
            coef /= factorial(kk[d]);
            alpha[d] = 2 * kk[d];
        }
        out.add_term(alpha, std::round(coef));
    });
    return out;
}

PolySymbol PolySymbol::linear(const std::vector<double>& a) {
    const int n = static_cast<int>(a.size());
    PolySymbol out(n);
    for (int d = 0; d < n; ++d) {
        MultiIndex alpha(static_cast<std::size_t>(n), 0);
        alpha[d] = 1;
        if (a[d] != 0.0) out.add_term(alpha, a[d]);
    }
    return out;
}

MatrixSymbol::MatrixSymbol(int m, int n) : m_(m), n_(n) {
    if (m < 1 || n < 1 || n > 3) throw DomainError("MatrixSymbol needs m >= 1 and 1 <= n <= 3");
    entries_.assign(static_cast<std::size_t>(m * m), PolySymbol(n));
}

int MatrixSymbol::ell_star_max() const {
    int v = order(0, 0);
    for (int j = 1; j < m_; ++j) v = std::max(v, order(j, j));
    return v;
}

int MatrixSymbol::ell_star_min() const {
    int v = order(0, 0);
    for (int j = 1; j < m_; ++j) v = std::min(v, order(j, j));
    return v;
}

bool ValidationReport::solver_admissible() const {
    return structural_ok() && !(min_eigenvalue < 0.0);
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    os << "hermitian=" << (hermitian_ok ? "ok" : "FAIL");
    for (auto [j, k] : hermitian_violations) os << " (" << j << "," << k << ")";
    os << "; order_dominance=" << (order_dominance_ok ? "ok" : "FAIL");
    for (auto [k, j] : dominance_violations) os << " (" << k << "," << j << ")";
    os << "; diagonal_homogeneous=" << (diagonal_homogeneous_ok ? "ok" : "FAIL");
    os << "; diagonal_elliptic=" << (diagonal_elliptic_ok ? "ok" : "FAIL");
    os << "; R0=" << r0 << "; min_eigenvalue=" << min_eigenvalue;
    return os.str();
}

std::vector<Eigen::VectorXd> sphere_directions(int n, int count) {
    std::vector<Eigen::VectorXd> out;
    if (n == 1) {
        out.push_back(Eigen::VectorXd::Constant(1, 1.0));
        out.push_back(Eigen::VectorXd::Constant(1, -1.0));
    } else if (n == 2) {
        for (int i = 0; i < count; ++i) {
            const double a = 2.0 * std::numbers::pi * i / count;
            Eigen::VectorXd v(2);
            v << std::cos(a), std::sin(a);
            out.push_back(v);
        }
    } else if (n == 3) {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < count; ++i) {
            const double z = 1.0 - 2.0 * (i + 0.5) / count;
            const double r = std::sqrt(1.0 - z * z);
            Eigen::VectorXd v(3);
            v << r * std::cos(golden * i), r * std::sin(golden * i), z;
            out.push_back(v);
        }
    } else {
        throw DomainError("sphere_directions supports n = 1, 2, 3");
    }
    return out;
}

ValidationReport validate_structure(const MatrixSymbol& sym) {
    ValidationReport rep;
    const int m = sym.m();

    for (int j = 0; j < m; ++j) {
        for (int k = j; k < m; ++k) {
            const auto& a = sym.at(j, k).terms();
            const auto& b = sym.at(k, j).terms();
            bool ok = a.size() == b.size();
            double scale = 0.0;
            for (const auto& [alpha, c] : a) scale = std::max(scale, std::abs(c));
            for (const auto& [alpha, c] : a) {
                if (!ok) break;
                auto it = b.find(alpha);
                ok = it != b.end() && std::abs(it->second - std::conj(c)) <= 1e-12 * scale;
            }
            if (!ok) rep.hermitian_violations.emplace_back(j, k);
        }
    }
    rep.hermitian_ok = rep.hermitian_violations.empty();

    for (int j = 0; j < m; ++j) {
        for (int k = 0; k < m; ++k) {
            if (k != j && !sym.at(k, j).is_zero() && sym.order(k, j) >= sym.order(j, j)) {
                rep.dominance_violations.emplace_back(k, j);
            }
        }
    }
    rep.order_dominance_ok = rep.dominance_violations.empty();

    const auto dirs = sphere_directions(sym.n());
    for (int j = 0; j < m; ++j) {
        const PolySymbol& d = sym.at(j, j);
        if (d.is_zero() || !d.is_homogeneous()) rep.non_homogeneous_diagonals.push_back(j);
        bool elliptic = !d.is_zero();
        double peak = 0.0;
        for (const auto& w : dirs) peak = std::max(peak, std::abs(d.eval(w)));
        for (const auto& w : dirs) {
            const cplx v = d.eval(w);
            if (!(v.real() > 1e-10 * peak) || std::abs(v.imag()) > 1e-12 * std::abs(v)) elliptic = false;
        }
        if (!elliptic) rep.non_elliptic_diagonals.push_back(j);
    }
    rep.diagonal_homogeneous_ok = rep.non_homogeneous_diagonals.empty();
    rep.diagonal_elliptic_ok = rep.non_elliptic_diagonals.empty();

    if (!rep.structural_ok()) throw ValidationFailure("matrix symbol fails structural validation: " + rep.summary(), rep);
    return rep;
}

ValidationReport validate_conditions_A(MatrixSymbol& sym, const SpectralGrid& grid) {
    if (grid.dim() != sym.n()) throw GridMismatch("symbol dimension does not match grid dimension");
    ValidationReport rep = validate_structure(sym);

    const std::size_t P = grid.size();
    std::vector<double> min_eig(P);
    std::vector<double> defect(P);
    std::vector<double> tol(P);
    parallel_for(P, [&](std::size_t p) {
        const Eigen::MatrixXcd A = eval_symbol(sym, grid.xi(p));
        defect[p] = hermitian_defect(A);
        const Eigen::MatrixXcd Hs = 0.5 * (A + A.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Hs, Eigen::EigenvaluesOnly);
        min_eig[p] = es.eigenvalues()[0];
        tol[p] = eigen_zero_tolerance(A.norm());
    });

    rep.lattice_hermitian_defect = *std::max_element(defect.begin(), defect.end());
    if (rep.lattice_hermitian_defect > 1e-10) {
        rep.hermitian_ok = false;
        throw ValidationFailure("matrix symbol is not Hermitian on the lattice: " + rep.summary(), rep);
    }

    double smallest_radius = 0.0;
    double worst_bad_radius = 0.0;
    rep.min_eigenvalue = 0.0;
    bool first = true;
    for (std::size_t p = 0; p < P; ++p) {
        const double r = grid.xi_norm(p);
        if (r > 0.0 && (smallest_radius == 0.0 || r < smallest_radius)) smallest_radius = r;
        const double lam = std::abs(min_eig[p]) <= tol[p] ? 0.0 : min_eig[p];
        if (first || lam < rep.min_eigenvalue) rep.min_eigenvalue = lam;
        first = false;
        if (lam <= 0.0) {
            worst_bad_radius = std::max(worst_bad_radius, r);
            ++rep.nonpositive_count;
            if (rep.nonpositive_points.size() < 64) rep.nonpositive_points.push_back({p, r, min_eig[p]});
        }
    }
    rep.r0 = std::max(smallest_radius, worst_bad_radius);
    sym.r0 = rep.r0;
    return rep;
}

EigenDecomp eig_hermitian(const Eigen::MatrixXcd& H) {
    if (H.rows() != H.cols()) throw NotHermitian("eig_hermitian needs a square matrix");
    if (hermitian_defect(H) > 1e-10) throw NotHermitian("eig_hermitian needs a Hermitian matrix");
    const Eigen::MatrixXcd Hs = 0.5 * (H + H.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Hs);
    if (es.info() != Eigen::Success) throw ConvergenceFailure("Hermitian eigensolver did not converge");
    EigenDecomp out;
    out.lambdas = es.eigenvalues();
    out.M = es.eigenvectors();
    for (Eigen::Index q = 0; q < out.M.cols(); ++q) {
        for (Eigen::Index i = 0; i < out.M.rows(); ++i) {
            const cplx c = out.M(i, q);
            if (std::abs(c) > 1e-12) {
                out.M.col(q) *= std::abs(c) / c;
                out.M(i, q) = std::abs(c);
                break;
            }
        }
    }
    out.Minv = out.M.adjoint();
    return out;
}

std::vector<AsymptoticsRow> corollary_asymptotics_check(const MatrixSymbol& sym, const std::vector<double>& radii) {
    validate_structure(sym);
    if (!std::is_sorted(radii.begin(), radii.end())) throw DomainError("radii must be increasing");
    if (sym.r0) {
        for (double r : radii) {
            if (r < *sym.r0) throw DomainError("radii must not be below R0");
        }
    }
    const auto dirs = sphere_directions(sym.n());
    std::vector<AsymptoticsRow> out;
    for (double r : radii) {
        double worst = 0.0;
        for (const auto& w : dirs) {
            const Eigen::VectorXd xi = r * w;
            const Eigen::MatrixXcd A = eval_symbol(sym, xi);
            Eigen::VectorXd lam = eig_hermitian(A).lambdas;
            Eigen::VectorXd diag = A.diagonal().real();
            std::sort(diag.data(), diag.data() + diag.size());
            for (Eigen::Index j = 0; j < lam.size(); ++j) {
                worst = std::max(worst, std::abs(lam[j] / diag[j] - 1.0));
            }
        }
        out.push_back({r, worst});
    }
    return out;
}

} // namespace mlfrac
