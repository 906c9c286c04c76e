#pragma once

#include <cstdint>
#include <vector>

#include "spinpointer/core_model.hpp"
#include "spinpointer/estimation.hpp"

namespace spinpointer {

/// Uniform pixel array over the split variable u in [-u_max, u_max].
struct PixelArraySpec {
    int n_pixels = 256;
    double u_max = 0.0;           // 1/um; pick >= 8/sigma to capture the density
    double read_noise_sigma = 0.0;  // counts per pixel per frame

    void validate() const;
    double edge(int i) const;    // i in [0, n_pixels]
    double center(int i) const;  // i in [0, n_pixels)
};

/// One readout frame of the pixel array.
struct FrameRecord {
    std::vector<std::uint64_t> pixel_counts;
    double window_ms = 0.0;
    double theta_true = 0.0;
    std::uint64_t seed = 0;

    std::uint64_t total() const;
};

/// Normalized post-selected density integrated over each pixel interval.
/// Entries sum to the in-range mass (<= 1).
std::vector<double> pixel_probabilities(double theta, const WeakMeasurementModel& model,
                                        const PixelArraySpec& pixels);

/// Multinomial photon allocation over the pixels plus additive Gaussian read
/// noise rounded to counts and floored at zero. Deterministic per seed.
FrameRecord simulate_frame(double theta, const WeakMeasurementModel& model,
                           const PixelArraySpec& pixels, std::uint64_t n_photons,
                           std::uint64_t seed);

/// Inverts the count-weighted mean pixel coordinate through the map
/// theta -> E[u | theta] on a monotonic branch. The report's fisher/crb fields
/// carry the Gaussian (delta-method) information of the centroid statistic.
EstimationReport centroid_estimate(const FrameRecord& frame,
                                   const WeakMeasurementModel& model,
                                   const PixelArraySpec& pixels,
                                   SearchInterval interval);

struct FisherComparison {
    double f_twobin = 0.0;
    double f_pixels = 0.0;
    double ratio = 0.0;  // f_twobin / f_pixels
    std::vector<int> excluded_pixels;  // probability below 1e-15
};

/// Per-photon Fisher information of the pixel histogram (finite differences)
/// against the two-bin pointer at the same angle.
FisherComparison fisher_comparison(double theta, const WeakMeasurementModel& model,
                                   const PixelArraySpec& pixels);

}  // namespace spinpointer
