#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spinpointer/config.hpp"

namespace spinpointer {

inline constexpr const char* kToolVersion = "0.1.0";

/// Command-line overrides applied on top of a parsed config.
struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<unsigned> threads;
};

struct RunOutputs {
    std::filesystem::path out_dir;
    std::vector<std::filesystem::path> csv_files;
    std::vector<std::filesystem::path> svg_files;
    std::filesystem::path manifest;
};

/// Built-in experiment presets (fig3..fig6). Throws ValidationError on an
/// unknown name.
std::string preset_config_text(const std::string& name);
std::vector<std::string> preset_names();

/// Runs the configured sweep: CSV table, SVG overlay chart and a JSON manifest
/// from which every row can be re-derived.
RunOutputs run_sweep(const ExperimentConfig& config, const RunOverrides& overrides = {});

/// Fisher-information and sensitivity table over a theta grid.
RunOutputs run_fisher_table(const ExperimentConfig& config,
                            const RunOverrides& overrides = {});

/// Pixel-array vs two-bin comparison: Fisher table over the theta grid plus a
/// Monte Carlo estimator-spread comparison at the fixed working angle.
RunOutputs run_compare_baseline(const ExperimentConfig& config,
                                const RunOverrides& overrides = {});

/// One simulated window, printed as key=value lines.
std::string run_single_window(const ExperimentConfig& config,
                              const RunOverrides& overrides = {});

/// 64-bit FNV-1a of a text blob (config fingerprint in the manifest).
std::uint64_t fnv1a64(const std::string& text);

}  // namespace spinpointer
