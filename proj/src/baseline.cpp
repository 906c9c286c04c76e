#include "spinpointer/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "spinpointer/quadrature.hpp"
#include "spinpointer/rng.hpp"

namespace spinpointer {

namespace {

constexpr double kTailSigmas = 8.0;
constexpr double kFdStep = 1e-6;
constexpr double kPixelFloor = 1e-15;
constexpr int kBranchScanPoints = 33;

double std_normal_pdf(double t) {
    constexpr double inv_sqrt_2pi = 0.3989422804014327;
    return inv_sqrt_2pi * std::exp(-0.5 * t * t);
}

// |M(t/sigma)|^2 * phi(t) for the angle-parameterized model, shared by every
// integral below. t = u * sigma.
struct Density {
    double c0, cr, ci, w;

    double operator()(double t) const {
        return (c0 + cr * std::cos(w * t) + ci * std::sin(w * t)) *
               std_normal_pdf(t);
    }
};

Density density_at(double theta, const WeakMeasurementModel& model) {
    const WeakMeasurementModel m = with_angle(model, theta);
    const auto es = m.obs.eigensystem();
    const Complex a1 = inner_product(m.post, es.v1) * inner_product(es.v1, m.pre);
    const Complex a2 = inner_product(m.post, es.v2) * inner_product(es.v2, m.pre);
    const Complex cross = a1 * std::conj(a2);
    return {std::norm(a1) + std::norm(a2), 2.0 * cross.real(), 2.0 * cross.imag(),
            (m.g / m.meter.sigma) * (es.lambda1 - es.lambda2)};
}

double mass(const Density& d, double t_lo, double t_hi) {
    return integrate(d, t_lo, t_hi, 1e-10, 1e-280);
}

// Post-selection normalization, split at zero exactly like the two-bin path.
double total_mass(const Density& d) {
    return mass(d, -kTailSigmas, 0.0) + mass(d, 0.0, kTailSigmas);
}

// E[t | theta] of the normalized density (t units).
double mean_t(double theta, const WeakMeasurementModel& model) {
    const Density d = density_at(theta, model);
    auto t_weighted = [&](double t) { return t * d(t); };
    const double num = integrate(t_weighted, -kTailSigmas, 0.0, 1e-10, 1e-16) +
                       integrate(t_weighted, 0.0, kTailSigmas, 1e-10, 1e-16);
    return num / total_mass(d);
}

double var_t(double theta, const WeakMeasurementModel& model) {
    const Density d = density_at(theta, model);
    auto t2_weighted = [&](double t) { return t * t * d(t); };
    const double m2 = (integrate(t2_weighted, -kTailSigmas, 0.0, 1e-10, 1e-16) +
                       integrate(t2_weighted, 0.0, kTailSigmas, 1e-10, 1e-16)) /
                      total_mass(d);
    const double m1 = mean_t(theta, model);
    return m2 - m1 * m1;
}

}  // namespace

void PixelArraySpec::validate() const {
    if (n_pixels < 2) throw ValidationError("pixel array needs n_pixels >= 2");
    if (!(u_max > 0.0)) throw ValidationError("pixel range u_max must be > 0");
    if (read_noise_sigma < 0.0) throw ValidationError("read noise must be >= 0");
}

double PixelArraySpec::edge(int i) const {
    return u_max * (2.0 * static_cast<double>(i) / n_pixels - 1.0);
}

double PixelArraySpec::center(int i) const {
    return 0.5 * (edge(i) + edge(i + 1));
}

std::uint64_t FrameRecord::total() const {
    std::uint64_t n = 0;
    for (auto c : pixel_counts) n += c;
    return n;
}

std::vector<double> pixel_probabilities(double theta, const WeakMeasurementModel& model,
                                        const PixelArraySpec& pixels) {
    pixels.validate();
    const Density d = density_at(theta, model);
    const double p_ps = total_mass(d);
    if (!(p_ps > 1e-30))
        throw VanishingPostselection("post-selection probability below floor");

    const double sigma = model.meter.sigma;
    std::vector<double> probs(pixels.n_pixels);
    for (int i = 0; i < pixels.n_pixels; ++i) {
        const double t_lo = std::max(-kTailSigmas, pixels.edge(i) * sigma);
        const double t_hi = std::min(kTailSigmas, pixels.edge(i + 1) * sigma);
        probs[i] = t_lo < t_hi ? mass(d, t_lo, t_hi) / p_ps : 0.0;
    }
    return probs;
}

FrameRecord simulate_frame(double theta, const WeakMeasurementModel& model,
                           const PixelArraySpec& pixels, std::uint64_t n_photons,
                           std::uint64_t seed) {
    const std::vector<double> probs = pixel_probabilities(theta, model, pixels);

    SplitMix64 rng(seed);
    FrameRecord frame;
    frame.theta_true = theta;
    frame.seed = seed;
    frame.pixel_counts.assign(probs.size(), 0);

    // Sequential conditional binomials; photons beyond the array range are lost.
    std::uint64_t remaining = n_photons;
    double mass_left = 1.0;
    for (std::size_t i = 0; i < probs.size() && remaining > 0; ++i) {
        const double p_cond = std::clamp(probs[i] / mass_left, 0.0, 1.0);
        std::uint64_t c = 0;
        if (p_cond >= 1.0) {
            c = remaining;
        } else if (p_cond > 0.0) {
            std::binomial_distribution<std::uint64_t> bin(remaining, p_cond);
            c = bin(rng);
        }
        frame.pixel_counts[i] = c;
        remaining -= c;
        mass_left -= probs[i];
    }

    if (pixels.read_noise_sigma > 0.0) {
        std::normal_distribution<double> gauss(0.0, pixels.read_noise_sigma);
        for (auto& c : frame.pixel_counts) {
            const long long noisy =
                static_cast<long long>(c) + std::llround(gauss(rng));
            c = noisy > 0 ? static_cast<std::uint64_t>(noisy) : 0;
        }
    }
    return frame;
}

EstimationReport centroid_estimate(const FrameRecord& frame,
                                   const WeakMeasurementModel& model,
                                   const PixelArraySpec& pixels,
                                   SearchInterval interval) {
    pixels.validate();
    if (!(interval.lo < interval.hi))
        throw ValidationError("search interval must satisfy lo < hi");
    const std::uint64_t total = frame.total();
    if (total == 0) throw EmptyFrame("frame contains no counts");
    if (frame.pixel_counts.size() != static_cast<std::size_t>(pixels.n_pixels))
        throw ValidationError("frame length does not match the pixel array");

    const double sigma = model.meter.sigma;
    auto map = [&](double t) { return mean_t(t, model) / sigma; };  // E[u|theta]

    // Strict monotonicity scan; a flat map (e.g. g = 0) carries no signal.
    double prev = map(interval.lo);
    int dir = 0;
    for (int i = 1; i < kBranchScanPoints; ++i) {
        const double t = interval.lo +
                         (interval.hi - interval.lo) * i / (kBranchScanPoints - 1);
        const double cur = map(t);
        const int step = cur > prev ? 1 : (cur < prev ? -1 : 0);
        if (step == 0 || (dir != 0 && step != dir))
            throw NonMonotonicInterval(
                "mean(u|theta) is not strictly monotonic on the search interval");
        dir = step;
        prev = cur;
    }

    double centroid = 0.0;
    for (int i = 0; i < pixels.n_pixels; ++i)
        centroid += static_cast<double>(frame.pixel_counts[i]) * pixels.center(i);
    centroid /= static_cast<double>(total);

    const double m_lo = map(interval.lo);
    const double m_hi = map(interval.hi);
    const double m_min = std::min(m_lo, m_hi);
    const double m_max = std::max(m_lo, m_hi);

    EstimationReport report;
    report.n_total = total;
    if (centroid <= m_min || centroid >= m_max) {
        report.theta_hat = std::abs(centroid - m_lo) <= std::abs(centroid - m_hi)
                               ? interval.lo
                               : interval.hi;
        report.saturated = true;
    } else {
        double lo = interval.lo, hi = interval.hi;
        const bool increasing = m_hi > m_lo;
        for (int it = 0; it < 200 && (hi - lo) > 1e-12; ++it) {
            const double mid = 0.5 * (lo + hi);
            const bool below = map(mid) < centroid;
            if (below == increasing)
                lo = mid;
            else
                hi = mid;
        }
        report.theta_hat = 0.5 * (lo + hi);
    }

    // Delta-method information of the centroid statistic.
    const double slope = richardson_derivative(map, report.theta_hat, kFdStep);
    const double var_u = var_t(report.theta_hat, model) / (sigma * sigma);
    report.sensitivity = slope;
    if (var_u > 0.0 && slope != 0.0) {
        report.fisher = slope * slope / var_u;
        report.crb_var = 1.0 / (static_cast<double>(total) * report.fisher);
        report.std_theta = std::sqrt(report.crb_var);
    }
    return report;
}

FisherComparison fisher_comparison(double theta, const WeakMeasurementModel& model,
                                   const PixelArraySpec& pixels) {
    FisherComparison cmp;
    cmp.f_twobin = fisher_information(theta, model, EvalMode::exact);

    const std::vector<double> p0 = pixel_probabilities(theta, model, pixels);
    const auto pv = [&](double t) { return pixel_probabilities(t, model, pixels); };
    const std::vector<double> pp = pv(theta + kFdStep);
    const std::vector<double> pm = pv(theta - kFdStep);
    const std::vector<double> pp2 = pv(theta + 0.5 * kFdStep);
    const std::vector<double> pm2 = pv(theta - 0.5 * kFdStep);

    for (int i = 0; i < pixels.n_pixels; ++i) {
        if (p0[i] < kPixelFloor) {
            cmp.excluded_pixels.push_back(i);
            continue;
        }
        const double d1 = (pp[i] - pm[i]) / (2.0 * kFdStep);
        const double d2 = (pp2[i] - pm2[i]) / kFdStep;
        const double dp = (4.0 * d2 - d1) / 3.0;
        cmp.f_pixels += dp * dp / p0[i];
    }
    cmp.ratio = cmp.f_pixels > 0.0 ? cmp.f_twobin / cmp.f_pixels : 0.0;
    return cmp;
}

}  // namespace spinpointer
