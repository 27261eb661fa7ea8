#pragma once

#include "mlfrac/builtins.hpp"
#include "mlfrac/grid.hpp"

#include <cmath>
#include <numbers>

namespace fixture {

using mlfrac::cplx;

/// 2 pi periodic 1D lattice; |xi| runs over the integers so the coupled example is admissible.
inline mlfrac::SpectralGrid periodic_1d(int N) { return mlfrac::SpectralGrid({2.0 * std::numbers::pi}, {N}); }

/// Frequency-space field with value box_volume at wavenumber index j, i.e. a unit plane wave.
inline mlfrac::StateField plane_wave(const mlfrac::SpectralGrid& g, std::size_t p, const std::vector<cplx>& amp) {
    mlfrac::StateField F(g, static_cast<int>(amp.size()), mlfrac::Space::frequency);
    for (std::size_t c = 0; c < amp.size(); ++c) F.data(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(c)) = g.box_volume() * amp[c];
    return F;
}

inline std::size_t index_of_wavenumber(const mlfrac::SpectralGrid& g, int k) {
    const int N = g.points(0);
    return static_cast<std::size_t>((k % N + N) % N);
}

inline double max_abs_diff(const mlfrac::StateField& a, const mlfrac::StateField& b) {
    return (a.data - b.data).cwiseAbs().maxCoeff();
}

} // namespace fixture
