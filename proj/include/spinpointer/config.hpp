#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spinpointer/montecarlo.hpp"
#include "spinpointer/shel_optics.hpp"

namespace spinpointer {

/// Direct (g, sigma) model parameters, the alternative to a full optical setup.
struct DirectModel {
    double g = 0.0;       // um
    double sigma = 27.0;  // um
};

struct SweepConfig {
    SweepParameter kind = SweepParameter::theta;
    std::vector<double> grid;
    double theta_fixed = 0.01;  // rad, used by n_photons/window sweeps
};

struct RunConfig {
    std::size_t trials = 10;
    std::uint64_t master_seed = 12345;
    std::string output = "out";
    double theta_lo = 0.004;
    double theta_hi = 0.3;
    EvalMode mode = EvalMode::exact;
    unsigned threads = 1;
};

/// Fully resolved experiment description. Exactly one of {setup, model} is set.
struct ExperimentConfig {
    std::optional<OpticalSetup> setup;
    std::optional<DirectModel> model;
    SweepConfig sweep;
    SourceSpec source = SourceSpec::rate(50000.0);
    double window_ms = 10.0;
    NoiseSpec noise;
    RunConfig run;

    WeakMeasurementModel build_model() const;
    SweepRequest build_sweep_request() const;
};

/// Parses the sectioned key=value document ([setup]/[model], [sweep], [source],
/// [noise], [run]) and resolves defaults. Angles accept a "deg" suffix and are
/// stored in radians. Unknown sections or keys are rejected.
ExperimentConfig parse_config(const std::string& text);

/// Serializes the resolved config back to the document format (used by the
/// run manifest so each output row is re-derivable).
std::string format_config(const ExperimentConfig& config);

}  // namespace spinpointer
