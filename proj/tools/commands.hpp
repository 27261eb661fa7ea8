#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mlfrac::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kNoConvergence = 3 };

struct Options {
    std::filesystem::path config;
    std::optional<std::filesystem::path> out;
    std::optional<int> threads;
    bool emit_csv = false;
    bool json = false;
};

/// --threads if given, else MLFRAC_THREADS, else 0 (all hardware threads).
unsigned resolve_threads(const std::optional<int>& flag);

int cmd_validate_symbol(const Options& opt);
int cmd_solve(const Options& opt, bool nonlinear);
int cmd_verify(const std::filesystem::path& manifest, const Options& opt);
int cmd_ml_eval(double rho, double mu, const std::vector<double>& z, bool json);

} // namespace mlfrac::cli
