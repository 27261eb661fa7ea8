#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace mlfrac {

using cplx = std::complex<double>;

/// Truncated periodic lattice on [-L_d/2, L_d/2) per axis, N_d points each.
///
/// Lattice points are stored row-major (last axis fastest). In frequency
/// space the same flat index addresses the wavenumber k_d in FFT order
/// (0..N/2-1, -N/2..-1), i.e. xi_d = 2 pi k_d / L_d.
class SpectralGrid {
public:
    static constexpr std::size_t kDefaultPointCap = std::size_t{1} << 22;

    SpectralGrid() = default;
    SpectralGrid(std::vector<double> extent, std::vector<int> points, std::size_t point_cap = kDefaultPointCap);

    int dim() const { return n_; }
    double extent(int axis) const { return extent_[axis]; }
    int points(int axis) const { return points_[axis]; }
    std::size_t size() const { return size_; }

    /// Stride of `axis` in the flat index.
    std::size_t stride(int axis) const { return strides_[axis]; }
    /// Index along `axis` of flat point `flat`.
    int axis_index(std::size_t flat, int axis) const {
        return static_cast<int>((flat / strides_[axis]) % static_cast<std::size_t>(points_[axis]));
    }

    double coordinate(int axis, int j) const { return -0.5 * extent_[axis] + j * extent_[axis] / points_[axis]; }
    /// Signed wavenumber index k for storage index j.
    int wavenumber(int axis, int j) const { return j < points_[axis] / 2 ? j : j - points_[axis]; }
    double frequency(int axis, int j) const;

    Eigen::VectorXd x(std::size_t flat) const;
    Eigen::VectorXd xi(std::size_t flat) const;
    double xi_norm(std::size_t flat) const;

    /// Physical-space quadrature weight prod L_d / N_d.
    double cell_volume() const;
    /// prod L_d.
    double box_volume() const;

    bool operator==(const SpectralGrid& other) const;

private:
    int n_ = 0;
    std::array<double, 3> extent_{};
    std::array<int, 3> points_{};
    std::array<std::size_t, 3> strides_{};
    std::size_t size_ = 0;
};

enum class Space { physical, frequency };

/// m-component complex field on a SpectralGrid. data(p, c) is component c at
/// lattice point p, so each component is a contiguous column.
struct StateField {
    SpectralGrid grid;
    Space space = Space::physical;
    Eigen::MatrixXcd data;

    StateField() = default;
    StateField(SpectralGrid g, int m, Space s = Space::physical)
        : grid(std::move(g)), space(s), data(Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(grid.size()), m)) {}

    int m() const { return static_cast<int>(data.cols()); }
};

/// Forward transform F[f](xi) = int f(x) e^{+i x xi} dx on the lattice.
StateField fft_forward(const StateField& f);
/// Inverse transform (2 pi)^{-n} int F(xi) e^{-i x xi} dxi; exact inverse of fft_forward.
StateField fft_inverse(const StateField& F);

StateField to_frequency(const StateField& f);
StateField to_physical(const StateField& f);

/// Discrete (2 pi)^{-n} sum |F[f]|^2 (1 + |xi|^2)^a dxi, square-rooted and
/// summed over components in quadrature. a = 0 is the L2 norm.
double sobolev_norm(const StateField& f, double a);

/// Per-component Sobolev norms.
Eigen::VectorXd sobolev_norms(const StateField& f, double a);

/// max |F(-xi) - conj F(xi)| / max |F| over wavenumbers whose negation is on the lattice.
double conjugate_symmetry_defect(const StateField& f);

/// Zeros frequency-space entries with |k_d| > N_d / 3 on any axis.
void dealias_two_thirds(StateField& F);

/// Fraction of L2 mass (squared) in the outer 1/16 of each axis.
double boundary_mass_fraction(const StateField& physical);

} // namespace mlfrac
