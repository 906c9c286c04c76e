#include "spinpointer/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <thread>

#include "spinpointer/rng.hpp"

namespace spinpointer {

SourceSpec SourceSpec::rate(double counts_per_s) {
    if (!(counts_per_s > 0.0)) throw ValidationError("post_rate must be > 0");
    SourceSpec s;
    s.rate_counts_per_s = counts_per_s;
    return s;
}

SourceSpec SourceSpec::fixed(std::uint64_t n) {
    if (n == 0) throw ValidationError("fixed_n must be > 0");
    SourceSpec s;
    s.fixed_n = n;
    return s;
}

double SourceSpec::expected_photons(double window_ms, double efficiency) const {
    if (is_rate()) return *rate_counts_per_s * (window_ms / 1000.0) * efficiency;
    return static_cast<double>(*fixed_n);
}

double CountRecord::contrast() const {
    const std::uint64_t n = total();
    if (n == 0) throw ValidationError("contrast undefined for an empty window");
    return (static_cast<double>(n_plus) - static_cast<double>(n_minus)) /
           static_cast<double>(n);
}

void parallel_for_index(std::size_t count, unsigned threads,
                        const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    const unsigned workers = std::min<std::size_t>(threads, count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
                fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

CountRecord simulate_window_with_p(double theta, double p_plus,
                                   const SourceSpec& source, const NoiseSpec& noise,
                                   double window_ms, std::uint64_t seed) {
    if (!(window_ms > 0.0)) throw ValidationError("window must be > 0");
    if (!(p_plus >= 0.0 && p_plus <= 1.0))
        throw ValidationError("p_plus must lie in [0, 1]");

    SplitMix64 rng(seed);
    CountRecord rec;
    rec.window_ms = window_ms;
    rec.theta_true = theta;
    rec.seed = seed;

    std::uint64_t n = 0;
    if (source.is_rate()) {
        double power = 1.0;
        if (noise.power_rel_sigma > 0.0) {
            std::normal_distribution<double> gauss(1.0, noise.power_rel_sigma);
            power = std::max(0.0, gauss(rng));
        }
        const double mean = power * (*source.rate_counts_per_s) *
                            (window_ms / 1000.0) * noise.detector_efficiency;
        if (mean > 0.0) {
            std::poisson_distribution<std::uint64_t> poisson(mean);
            n = poisson(rng);
        }
    } else {
        n = *source.fixed_n;
    }

    if (n > 0) {
        std::binomial_distribution<std::uint64_t> split(n, p_plus);
        rec.n_plus = split(rng);
        rec.n_minus = n - rec.n_plus;
    }

    if (noise.background_rate > 0.0) {
        const double bg_mean = noise.background_rate * (window_ms / 1000.0);
        std::poisson_distribution<std::uint64_t> bg(bg_mean);
        rec.n_plus += bg(rng);
        rec.n_minus += bg(rng);
    }
    return rec;
}

CountRecord simulate_window(double theta, const WeakMeasurementModel& model,
                            const SourceSpec& source, const NoiseSpec& noise,
                            double window_ms, std::uint64_t seed) {
    const double p = outcome_probabilities_exact(theta, model).p_plus;
    return simulate_window_with_p(theta, p, source, noise, window_ms, seed);
}

TrialStats run_trials(double theta, const WeakMeasurementModel& model,
                      const SourceSpec& source, const NoiseSpec& noise,
                      double window_ms, std::size_t n_trials,
                      std::uint64_t master_seed, unsigned threads) {
    if (n_trials < 2) throw ValidationError("run_trials needs n_trials >= 2");

    const double p = outcome_probabilities_exact(theta, model).p_plus;

    TrialStats stats;
    stats.records.resize(n_trials);
    parallel_for_index(n_trials, threads, [&](std::size_t i) {
        stats.records[i] = simulate_window_with_p(
            theta, p, source, noise, window_ms, derive_seed(master_seed, i));
    });

    // Serial reduction in trial order keeps the statistics thread-count
    // independent.
    double sum = 0.0;
    std::size_t valid = 0;
    for (const auto& rec : stats.records) {
        if (!rec.has_counts()) continue;
        sum += rec.contrast();
        ++valid;
    }
    stats.n_valid = valid;
    if (valid > 0) stats.mean_contrast = sum / static_cast<double>(valid);
    if (valid > 1) {
        double ss = 0.0;
        for (const auto& rec : stats.records) {
            if (!rec.has_counts()) continue;
            const double d = rec.contrast() - stats.mean_contrast;
            ss += d * d;
        }
        stats.std_contrast = std::sqrt(ss / static_cast<double>(valid - 1));
    }
    return stats;
}

std::vector<SweepRow> sweep(const SweepRequest& request,
                            const WeakMeasurementModel& model) {
    if (request.grid.empty()) throw ValidationError("sweep grid must be non-empty");

    std::vector<SweepRow> rows(request.grid.size());
    bool interval_checked = false;

    for (std::size_t k = 0; k < request.grid.size(); ++k) {
        const double value = request.grid[k];
        double theta = request.theta_fixed;
        SourceSpec source = request.source;
        double window = request.window_ms;
        switch (request.parameter) {
            case SweepParameter::theta:
                theta = value;
                break;
            case SweepParameter::n_photons:
                if (!(value >= 1.0))
                    throw ValidationError("photon-number grid entries must be >= 1");
                source = SourceSpec::fixed(static_cast<std::uint64_t>(value));
                break;
            case SweepParameter::window:
                window = value;
                break;
        }

        SweepRow row;
        row.grid_value = value;
        try {
            const std::uint64_t point_seed = derive_seed(request.master_seed, k);
            const TrialStats stats =
                run_trials(theta, model, source, request.noise, window,
                           request.n_trials, point_seed, request.threads);
            row.mean_contrast = stats.mean_contrast;
            row.std_contrast = stats.std_contrast;
            row.n_valid = stats.n_valid;
            row.exact_contrast = contrast_exact(theta, model);
            row.fisher = fisher_information(theta, model, request.mode);
            const double n_expected =
                source.expected_photons(window, request.noise.detector_efficiency);
            row.crb_std = row.fisher > 0.0 && n_expected > 0.0
                              ? std::sqrt(1.0 / (n_expected * row.fisher))
                              : std::numeric_limits<double>::infinity();

            if (request.estimate) {
                if (!interval_checked) {
                    // One monotonicity scan covers the whole sweep; per-trial
                    // estimates then skip re-validation.
                    estimate_theta(CountRecord{1, 1, window, theta, 0}, model,
                                   request.interval, request.mode, true);
                    interval_checked = true;
                }
                std::vector<double> hats(stats.records.size(),
                                         std::numeric_limits<double>::quiet_NaN());
                parallel_for_index(stats.records.size(), request.threads,
                                   [&](std::size_t i) {
                                       if (!stats.records[i].has_counts()) return;
                                       hats[i] = estimate_theta(stats.records[i], model,
                                                                request.interval,
                                                                request.mode, false)
                                                     .theta_hat;
                                   });
                double sum = 0.0;
                std::size_t cnt = 0;
                for (double h : hats) {
                    if (std::isnan(h)) continue;
                    sum += h;
                    ++cnt;
                }
                if (cnt > 0) row.theta_hat_mean = sum / static_cast<double>(cnt);
                if (cnt > 1) {
                    double ss = 0.0;
                    for (double h : hats) {
                        if (std::isnan(h)) continue;
                        const double d = h - row.theta_hat_mean;
                        ss += d * d;
                    }
                    row.theta_hat_std = std::sqrt(ss / static_cast<double>(cnt - 1));
                }
            }
        } catch (const Error& e) {
            throw Error("sweep point " + std::to_string(k) + " (value " +
                        std::to_string(value) + "): " + e.what());
        }
        rows[k] = row;
    }
    return rows;
}

}  // namespace spinpointer
