#include "mlfrac/grid.hpp"

#include "mlfrac/errors.hpp"
#include "mlfrac/parallel.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <string>

namespace mlfrac {

SpectralGrid::SpectralGrid(std::vector<double> extent, std::vector<int> points, std::size_t point_cap) {
    if (extent.size() != points.size() || extent.empty() || extent.size() > 3) {
        throw DomainError("SpectralGrid needs 1..3 axes with matching extent and point counts");
    }
    n_ = static_cast<int>(extent.size());
    size_ = 1;
    for (int d = 0; d < n_; ++d) {
        const int N = points[d];
        if (!(extent[d] > 0.0) || !std::isfinite(extent[d])) throw DomainError("SpectralGrid extent must be positive");
        if (N < 4 || (N & (N - 1)) != 0) {
            throw DomainError("SpectralGrid points per axis must be a power of two >= 4, got " + std::to_string(N));
        }
        extent_[d] = extent[d];
        points_[d] = N;
        size_ *= static_cast<std::size_t>(N);
    }
    if (size_ > point_cap) throw DomainError("SpectralGrid exceeds the point cap of " + std::to_string(point_cap));
    std::size_t s = 1;
    for (int d = n_ - 1; d >= 0; --d) {
        strides_[d] = s;
        s *= static_cast<std::size_t>(points_[d]);
    }
}

double SpectralGrid::frequency(int axis, int j) const {
    return 2.0 * std::numbers::pi * wavenumber(axis, j) / extent_[axis];
}

Eigen::VectorXd SpectralGrid::x(std::size_t flat) const {
    Eigen::VectorXd out(n_);
    for (int d = 0; d < n_; ++d) out[d] = coordinate(d, axis_index(flat, d));
    return out;
}

Eigen::VectorXd SpectralGrid::xi(std::size_t flat) const {
    Eigen::VectorXd out(n_);
    for (int d = 0; d < n_; ++d) out[d] = frequency(d, axis_index(flat, d));
    return out;
}

double SpectralGrid::xi_norm(std::size_t flat) const { return xi(flat).norm(); }

double SpectralGrid::cell_volume() const {
    double v = 1.0;
    for (int d = 0; d < n_; ++d) v *= extent_[d] / points_[d];
    return v;
}

double SpectralGrid::box_volume() const {
    double v = 1.0;
    for (int d = 0; d < n_; ++d) v *= extent_[d];
    return v;
}

bool SpectralGrid::operator==(const SpectralGrid& other) const {
    if (n_ != other.n_) return false;
    for (int d = 0; d < n_; ++d) {
        if (extent_[d] != other.extent_[d] || points_[d] != other.points_[d]) return false;
    }
    return true;
}

namespace {

enum class Direction { forward, inverse };

// One axis of the transform, applied to every line along `axis` of every component.
void transform_axis(Eigen::MatrixXcd& data, const SpectralGrid& grid, int axis, Direction dir) {
    const int N = grid.points(axis);
    const std::size_t stride = grid.stride(axis);
    const std::size_t lines_per_component = grid.size() / static_cast<std::size_t>(N);
    const std::size_t total_lines = lines_per_component * static_cast<std::size_t>(data.cols());
    const double L = grid.extent(axis);

    parallel_for(total_lines, [&](std::size_t line) {
        thread_local Eigen::FFT<double> fft;
        thread_local std::vector<cplx> in;
        thread_local std::vector<cplx> out;
        in.resize(N);
        out.resize(N);
        const auto component = static_cast<Eigen::Index>(line / lines_per_component);
        const std::size_t l = line % lines_per_component;
        // Base offset of this line: split l into the parts above and below `axis`.
        const std::size_t base = (l / stride) * stride * N + (l % stride);
        cplx* col = data.col(component).data();
        for (int j = 0; j < N; ++j) in[j] = col[base + j * stride];
        if (dir == Direction::forward) {
            // sum_j f_j e^{+2 pi i j k / N} = N * inv(f)_k; the (-1)^k phase
            // accounts for the lattice starting at -L/2.
            fft.inv(out, in);
            for (int k = 0; k < N; ++k) out[k] *= (k % 2 == 0 ? L : -L);
        } else {
            for (int k = 0; k < N; ++k) in[k] *= (k % 2 == 0 ? 1.0 : -1.0);
            fft.fwd(out, in);
            for (int j = 0; j < N; ++j) out[j] /= L;
        }
        for (int j = 0; j < N; ++j) col[base + j * stride] = out[j];
    });
}

} // namespace

StateField fft_forward(const StateField& f) {
    if (f.space != Space::physical) throw DomainError("fft_forward expects a physical-space field");
    StateField out = f;
    for (int d = 0; d < f.grid.dim(); ++d) transform_axis(out.data, out.grid, d, Direction::forward);
    out.space = Space::frequency;
    return out;
}

StateField fft_inverse(const StateField& F) {
    if (F.space != Space::frequency) throw DomainError("fft_inverse expects a frequency-space field");
    StateField out = F;
    for (int d = 0; d < F.grid.dim(); ++d) transform_axis(out.data, out.grid, d, Direction::inverse);
    out.space = Space::physical;
    return out;
}

StateField to_frequency(const StateField& f) { return f.space == Space::frequency ? f : fft_forward(f); }
StateField to_physical(const StateField& f) { return f.space == Space::physical ? f : fft_inverse(f); }

Eigen::VectorXd sobolev_norms(const StateField& f, double a) {
    if (!(a >= 0.0)) throw DomainError("sobolev_norm requires a >= 0");
    const StateField F = to_frequency(f);
    const std::size_t P = F.grid.size();
    Eigen::VectorXd weight(static_cast<Eigen::Index>(P));
    for (std::size_t p = 0; p < P; ++p) {
        const double r2 = F.grid.xi(p).squaredNorm();
        weight[static_cast<Eigen::Index>(p)] = a == 0.0 ? 1.0 : std::pow(1.0 + r2, a);
    }
    Eigen::VectorXd out(F.m());
    for (int c = 0; c < F.m(); ++c) {
        const double s = (F.data.col(c).cwiseAbs2().array() * weight.array()).sum();
        out[c] = std::sqrt(s / F.grid.box_volume());
    }
    return out;
}

double sobolev_norm(const StateField& f, double a) { return sobolev_norms(f, a).norm(); }

double conjugate_symmetry_defect(const StateField& f) {
    const StateField F = to_frequency(f);
    const auto& g = F.grid;
    double defect = 0.0;
    const double scale = std::max(F.data.cwiseAbs().maxCoeff(), 1e-300);
    for (std::size_t p = 0; p < g.size(); ++p) {
        std::size_t q = 0;
        bool on_lattice = true;
        for (int d = 0; d < g.dim(); ++d) {
            const int N = g.points(d);
            const int j = g.axis_index(p, d);
            if (g.wavenumber(d, j) == -N / 2) {
                on_lattice = false;
                break;
            }
            q += static_cast<std::size_t>((N - j) % N) * g.stride(d);
        }
        if (!on_lattice) continue;
        for (int c = 0; c < F.m(); ++c) {
            const auto pi = static_cast<Eigen::Index>(p);
            const auto qi = static_cast<Eigen::Index>(q);
            defect = std::max(defect, std::abs(F.data(qi, c) - std::conj(F.data(pi, c))));
        }
    }
    return defect / scale;
}

void dealias_two_thirds(StateField& F) {
    if (F.space != Space::frequency) throw DomainError("dealias_two_thirds expects a frequency-space field");
    const auto& g = F.grid;
    for (std::size_t p = 0; p < g.size(); ++p) {
        for (int d = 0; d < g.dim(); ++d) {
            if (3 * std::abs(g.wavenumber(d, g.axis_index(p, d))) > g.points(d)) {
                F.data.row(static_cast<Eigen::Index>(p)).setZero();
                break;
            }
        }
    }
}

double boundary_mass_fraction(const StateField& physical) {
    const StateField f = to_physical(physical);
    const auto& g = f.grid;
    double total = 0.0;
    double band = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        const double w = f.data.row(static_cast<Eigen::Index>(p)).squaredNorm();
        total += w;
        for (int d = 0; d < g.dim(); ++d) {
            const int N = g.points(d);
            const int j = g.axis_index(p, d);
            const int margin = std::max(1, N / 16);
            if (j < margin || j >= N - margin) {
                band += w;
                break;
            }
        }
    }
    return total > 0.0 ? band / total : 0.0;
}

} // namespace mlfrac
