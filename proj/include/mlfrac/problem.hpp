#pragma once

#include "mlfrac/fracops.hpp"
#include "mlfrac/grid.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace mlfrac {

/// Time-dependent source H(t, x). Values are always returned in frequency space.
class SourceSpec {
public:
    enum class Kind { zero, sampled, callback };
    using Callback = std::function<StateField(double t)>;

    SourceSpec() = default;

    static SourceSpec zero() { return SourceSpec(); }
    /// Samples at the nodes of `grid`, linearly interpolated in time.
    static SourceSpec sampled(TimeGrid grid, std::vector<StateField> samples);
    /// fn(t) may return a field in either space.
    static SourceSpec callback(Callback fn);
    /// Time-independent source.
    static SourceSpec constant(StateField value);

    Kind kind() const { return kind_; }
    bool is_zero() const { return kind_ == Kind::zero; }

    /// H(t) in frequency space on `grid` with m components.
    StateField at(double t, const SpectralGrid& grid, int m) const;

private:
    Kind kind_ = Kind::zero;
    TimeGrid grid_;
    std::shared_ptr<const std::vector<StateField>> samples_;
    Callback fn_;
};

/// Pointwise map (t, x, U(x)) -> H(t, x, U(x)) with m inputs and m outputs.
using PointwiseNonlinearity =
    std::function<void(double t, std::span<const double> x, std::span<const cplx> u, std::span<cplx> out)>;

} // namespace mlfrac
