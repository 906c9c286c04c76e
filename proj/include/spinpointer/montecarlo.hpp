#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "spinpointer/core_model.hpp"
#include "spinpointer/estimation.hpp"

namespace spinpointer {

/// Opt-in detector and source imperfections. Defaults are ideal.
struct NoiseSpec {
    double background_rate = 0.0;     // counts/s per detector
    double power_rel_sigma = 0.0;     // relative std of source power per window
    double detector_efficiency = 1.0;
};

/// Photon supply per integration window: either a Poisson process at a fixed
/// post-selected rate, or an exact per-window photon number.
struct SourceSpec {
    static SourceSpec rate(double counts_per_s);
    static SourceSpec fixed(std::uint64_t n);

    bool is_rate() const { return rate_counts_per_s.has_value(); }
    double expected_photons(double window_ms, double efficiency) const;

    std::optional<double> rate_counts_per_s;
    std::optional<std::uint64_t> fixed_n;
};

/// One integration window's detector counts.
struct CountRecord {
    std::uint64_t n_plus = 0;
    std::uint64_t n_minus = 0;
    double window_ms = 0.0;
    double theta_true = 0.0;
    std::uint64_t seed = 0;

    std::uint64_t total() const { return n_plus + n_minus; }
    bool has_counts() const { return total() > 0; }
    /// (N+ - N-)/(N+ + N-); defined only when total() > 0.
    double contrast() const;
};

/// Samples one window: power factor ~ N(1, power_rel_sigma) clipped at 0,
/// N ~ Poisson(power * rate * window * efficiency) or N = fixed_n,
/// N+ ~ Binomial(N, p(+|theta)), plus independent Poisson background per
/// detector. Deterministic in `seed`.
CountRecord simulate_window(double theta, const WeakMeasurementModel& model,
                            const SourceSpec& source, const NoiseSpec& noise,
                            double window_ms, std::uint64_t seed);

/// Same sampling with a precomputed p(+|theta) (avoids re-integrating the
/// outcome probabilities per trial).
CountRecord simulate_window_with_p(double theta, double p_plus,
                                   const SourceSpec& source, const NoiseSpec& noise,
                                   double window_ms, std::uint64_t seed);

/// Repeated windows with per-trial streams derived from master_seed.
/// Statistics are reduced in trial order and are independent of `threads`.
struct TrialStats {
    std::vector<CountRecord> records;
    double mean_contrast = 0.0;
    double std_contrast = 0.0;   // sample std (n-1)
    std::size_t n_valid = 0;     // windows with at least one count
};

TrialStats run_trials(double theta, const WeakMeasurementModel& model,
                      const SourceSpec& source, const NoiseSpec& noise,
                      double window_ms, std::size_t n_trials,
                      std::uint64_t master_seed, unsigned threads = 1);

enum class SweepParameter { theta, n_photons, window };

struct SweepRequest {
    SweepParameter parameter = SweepParameter::theta;
    std::vector<double> grid;
    double theta_fixed = 0.01;   // used by n_photons/window sweeps
    SourceSpec source = SourceSpec::rate(50000.0);
    NoiseSpec noise;
    double window_ms = 10.0;
    std::size_t n_trials = 10;
    std::uint64_t master_seed = 1;
    unsigned threads = 1;
    bool estimate = true;
    SearchInterval interval;
    EvalMode mode = EvalMode::exact;
};

struct SweepRow {
    double grid_value = 0.0;
    double mean_contrast = 0.0;
    double std_contrast = 0.0;
    double exact_contrast = 0.0;
    double theta_hat_mean = 0.0;
    double theta_hat_std = 0.0;
    double crb_std = 0.0;   // sqrt(1/(E[N] F)) at the true theta
    double fisher = 0.0;    // at the true theta, request mode
    std::size_t n_valid = 0;
};

/// One row per grid point; trials inside a point run concurrently and
/// per-point seeds derive from (master_seed, point index).
std::vector<SweepRow> sweep(const SweepRequest& request,
                            const WeakMeasurementModel& model);

/// Deterministic index-parallel loop used by the drivers; results must be
/// written to per-index slots by `fn`.
void parallel_for_index(std::size_t count, unsigned threads,
                        const std::function<void(std::size_t)>& fn);

}  // namespace spinpointer
