#pragma once

#include "mlfrac/builtins.hpp"
#include "mlfrac/nonlinear.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mlfrac::cli {

using nlohmann::json;

struct VerifyThresholds {
    double max_discrepancy = 1e-3;
    double min_rate = 0.5;
};

/// Fully parsed run configuration. `raw` keeps the document as read so the
/// manifest can carry an exact copy.
struct RunConfig {
    json raw;
    std::filesystem::path base_dir;
    std::string problem;
    MatrixSymbol symbol;
    SpectralGrid grid;
    double beta = 1.0;
    std::vector<double> t_out;
    StateField Phi;
    json source;
    std::optional<builtin::Nonlinearity> nonlinear;
    SolveConfig solver;
    std::string output;
    VerifyThresholds verify;

    int m() const { return symbol.m(); }
    /// Source for the given mode; the manufactured source includes the nonlinearity only when asked to.
    SourceSpec make_source(bool with_nonlinearity) const;
    /// e^{-t} Phi for the manufactured source, empty otherwise.
    std::optional<StateField> exact(double t) const;
};

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64-bit hash of the canonical serialization, as 16 hex digits.
std::string config_hash(const json& doc);

} // namespace mlfrac::cli
