#include "mlfrac/problem.hpp"

#include "mlfrac/errors.hpp"

#include <algorithm>
#include <cmath>

namespace mlfrac {

SourceSpec SourceSpec::sampled(TimeGrid grid, std::vector<StateField> samples) {
    grid.validate();
    if (static_cast<int>(samples.size()) != grid.size()) {
        throw DomainError("sampled source needs one field per time node");
    }
    for (auto& s : samples) s = to_frequency(s);
    SourceSpec out;
    out.kind_ = Kind::sampled;
    out.grid_ = grid;
    out.samples_ = std::make_shared<const std::vector<StateField>>(std::move(samples));
    return out;
}

SourceSpec SourceSpec::callback(Callback fn) {
    SourceSpec out;
    out.kind_ = Kind::callback;
    out.fn_ = std::move(fn);
    return out;
}

SourceSpec SourceSpec::constant(StateField value) {
    auto shared = std::make_shared<const StateField>(to_frequency(value));
    return callback([shared](double) { return *shared; });
}

StateField SourceSpec::at(double t, const SpectralGrid& grid, int m) const {
    switch (kind_) {
    case Kind::zero:
        return StateField(grid, m, Space::frequency);
    case Kind::sampled: {
        const auto& s = *samples_;
        if (!(s.front().grid == grid) || s.front().m() != m) throw GridMismatch("sampled source grid mismatch");
        if (t < -1e-12 * grid_.T || t > grid_.T * (1.0 + 1e-12)) {
            throw DomainError("sampled source queried outside [0, T]");
        }
        const double pos = std::clamp(t / grid_.h(), 0.0, static_cast<double>(grid_.steps));
        const int i = std::min(static_cast<int>(std::floor(pos)), grid_.steps - 1);
        const double w = pos - i;
        StateField out = s[static_cast<std::size_t>(i)];
        if (w != 0.0) out.data = (1.0 - w) * s[static_cast<std::size_t>(i)].data + w * s[static_cast<std::size_t>(i) + 1].data;
        return out;
    }
    case Kind::callback: {
        StateField out = to_frequency(fn_(t));
        if (!(out.grid == grid) || out.m() != m) throw GridMismatch("source callback returned a field on another grid");
        return out;
    }
    }
    return StateField(grid, m, Space::frequency);
}

} // namespace mlfrac
