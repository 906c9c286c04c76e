#include "spinpointer/estimation.hpp"

#include <algorithm>
#include <cmath>

#include "spinpointer/montecarlo.hpp"
#include "spinpointer/quadrature.hpp"

namespace spinpointer {

namespace {

constexpr double kSqrt2OverPi = 0.7978845608028654;
constexpr double kFdStep = 1e-6;  // rad
constexpr int kBranchScanPoints = 33;

double contrast_on_curve(double theta, const WeakMeasurementModel& m, EvalMode mode) {
    return mode == EvalMode::firstorder ? contrast_firstorder(theta, m)
                                        : contrast_exact(theta, m);
}

}  // namespace

double probability_plus(double theta, const WeakMeasurementModel& model, EvalMode mode) {
    if (mode == EvalMode::firstorder)
        return 0.5 * (1.0 + contrast_firstorder(theta, model));
    return outcome_probabilities_exact(theta, model).p_plus;
}

double pointer_variance(const OutcomeProbabilities& probs, std::uint64_t n_total) {
    if (n_total < 1) throw ValidationError("pointer variance needs n_total >= 1");
    return 4.0 * probs.p_plus * probs.p_minus / static_cast<double>(n_total);
}

double sensitivity(double theta, const WeakMeasurementModel& model, EvalMode mode) {
    if (mode == EvalMode::firstorder) {
        const double s = std::sin(theta);
        if (s == 0.0)
            throw AngleSingularity("first-order sensitivity undefined at theta = 0 mod pi");
        const double a = model.g / model.meter.sigma;
        const double x = a * (std::cos(theta) / s);
        const double csc2 = 1.0 / (s * s);
        const double one_px2 = 1.0 + x * x;
        return -2.0 * kSqrt2OverPi * a * csc2 * (1.0 - x * x) / (one_px2 * one_px2);
    }
    return richardson_derivative(
        [&](double t) { return contrast_exact(t, model); }, theta, kFdStep);
}

double fisher_information(double theta, const WeakMeasurementModel& model, EvalMode mode) {
    if (mode == EvalMode::firstorder) {
        const double p = 0.5 * (1.0 + contrast_firstorder(theta, model));
        if (!(p > 0.0) || !(p < 1.0))
            throw DegenerateOutcome("outcome probability hit 0 or 1");
        const double dp = 0.5 * sensitivity(theta, model, mode);
        return dp * dp * (1.0 / p + 1.0 / (1.0 - p));
    }
    // Exact mode evaluates the sum over both bins with per-bin Richardson
    // differences; a two-pixel array then reproduces this value bitwise.
    const double h = kFdStep;
    const auto p0 = outcome_probabilities_exact(theta, model);
    const auto pp = outcome_probabilities_exact(theta + h, model);
    const auto pm = outcome_probabilities_exact(theta - h, model);
    const auto pp2 = outcome_probabilities_exact(theta + 0.5 * h, model);
    const auto pm2 = outcome_probabilities_exact(theta - 0.5 * h, model);
    if (!(p0.p_plus > 0.0) || !(p0.p_minus > 0.0))
        throw DegenerateOutcome("outcome probability hit 0 or 1");
    auto rich = [h](double fp, double fm, double fp2, double fm2) {
        const double d1 = (fp - fm) / (2.0 * h);
        const double d2 = (fp2 - fm2) / h;
        return (4.0 * d2 - d1) / 3.0;
    };
    const double dpp = rich(pp.p_plus, pm.p_plus, pp2.p_plus, pm2.p_plus);
    const double dpm = rich(pp.p_minus, pm.p_minus, pp2.p_minus, pm2.p_minus);
    return dpp * dpp / p0.p_plus + dpm * dpm / p0.p_minus;
}

CrbResult crb_variance(double theta, const WeakMeasurementModel& model,
                       std::uint64_t n_total, EvalMode mode) {
    if (n_total < 1) throw ValidationError("crb_variance needs n_total >= 1");

    double p, slope;
    if (mode == EvalMode::firstorder) {
        p = 0.5 * (1.0 + contrast_firstorder(theta, model));
        slope = sensitivity(theta, model, mode);
    } else {
        p = outcome_probabilities_exact(theta, model).p_plus;
        const double dp = richardson_derivative(
            [&](double t) { return probability_plus(t, model, mode); }, theta, kFdStep);
        slope = 2.0 * dp;
    }
    if (!(p > 0.0) || !(p < 1.0))
        throw DegenerateOutcome("outcome probability hit 0 or 1");
    if (slope == 0.0) throw DegenerateOutcome("zero slope; Fisher information vanishes");

    const double n = static_cast<double>(n_total);
    const OutcomeProbabilities probs{p, 1.0 - p, 1.0};
    const double ep_var = pointer_variance(probs, n_total) / (slope * slope);
    const double dp_half = 0.5 * slope;
    const double fisher = dp_half * dp_half * (1.0 / p + 1.0 / (1.0 - p));
    const double crb = 1.0 / (n * fisher);

    const double rel = std::abs(crb - ep_var) / std::max(crb, ep_var);
    if (!(rel <= 1e-12))
        throw Error("Cramer-Rao identity violated beyond 1e-12 relative");
    return {crb, ep_var};
}

EstimationReport estimate_theta(const CountRecord& counts,
                                const WeakMeasurementModel& model,
                                SearchInterval interval, EvalMode mode,
                                bool validate) {
    if (!(interval.lo < interval.hi))
        throw ValidationError("search interval must satisfy lo < hi");
    const std::uint64_t n = counts.n_plus + counts.n_minus;
    if (n == 0) throw ValidationError("cannot estimate from an empty record");

    auto p_curve = [&](double t) { return probability_plus(t, model, mode); };

    if (validate) {
        // p+ must be strictly monotonic across the interval, i.e. the signal
        // slope may not change sign inside.
        double prev = p_curve(interval.lo);
        int dir = 0;
        for (int i = 1; i < kBranchScanPoints; ++i) {
            const double t = interval.lo + (interval.hi - interval.lo) * i /
                                               (kBranchScanPoints - 1);
            const double cur = p_curve(t);
            const int step = cur > prev ? 1 : (cur < prev ? -1 : 0);
            if (step == 0 || (dir != 0 && step != dir))
                throw NonMonotonicInterval(
                    "p(+|theta) is not strictly monotonic on the search interval");
            dir = step;
            prev = cur;
        }
    }

    const double p_lo = p_curve(interval.lo);
    const double p_hi = p_curve(interval.hi);
    const double p_min = std::min(p_lo, p_hi);
    const double p_max = std::max(p_lo, p_hi);
    const double p_obs =
        static_cast<double>(counts.n_plus) / static_cast<double>(n);

    EstimationReport report;
    report.n_total = n;

    if (p_obs <= p_min || p_obs >= p_max) {
        // Observed contrast outside the branch range: pin to the nearer
        // endpoint and flag saturation.
        const bool nearer_lo = std::abs(p_obs - p_lo) <= std::abs(p_obs - p_hi);
        report.theta_hat = nearer_lo ? interval.lo : interval.hi;
        report.saturated = true;
    } else {
        double lo = interval.lo, hi = interval.hi;
        const bool increasing = p_hi > p_lo;
        for (int it = 0; it < 200 && (hi - lo) > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
            const double mid = 0.5 * (lo + hi);
            const bool below = p_curve(mid) < p_obs;
            if (below == increasing)
                lo = mid;
            else
                hi = mid;
        }
        report.theta_hat = 0.5 * (lo + hi);
        report.saturated = counts.n_plus == 0 || counts.n_minus == 0;
    }

    report.fisher = fisher_information(report.theta_hat, model, mode);
    report.crb_var = 1.0 / (static_cast<double>(n) * report.fisher);
    report.std_theta = std::sqrt(report.crb_var);
    report.sensitivity = sensitivity(report.theta_hat, model, mode);
    return report;
}

}  // namespace spinpointer
