#pragma once

#include <cstdint>

#include "spinpointer/core_model.hpp"

namespace spinpointer {

/// Which signal curve estimation-theory quantities are evaluated on.
enum class EvalMode { exact, firstorder };

struct CountRecord;  // montecarlo.hpp

/// Point summary attached to a theta estimate.
struct EstimationReport {
    double theta_hat = 0.0;     // rad
    double std_theta = 0.0;     // rad, sqrt of crb_var
    double fisher = 0.0;        // 1/rad^2, per detected photon
    double crb_var = 0.0;       // rad^2, 1/(N * fisher)
    double sensitivity = 0.0;   // d<O>/dtheta at theta_hat
    std::uint64_t n_total = 0;
    bool saturated = false;     // estimate pinned at an interval endpoint
};

struct SearchInterval {
    double lo = 0.004;
    double hi = 0.3;
};

/// p(+|theta) on the chosen curve.
double probability_plus(double theta, const WeakMeasurementModel& model, EvalMode mode);

/// Var[O] = 4 p+ p- / N of the two-bin pointer after N detections.
double pointer_variance(const OutcomeProbabilities& probs, std::uint64_t n_total);

/// Slope d<O>/dtheta. Analytic for the first-order curve; Richardson-refined
/// centered difference (h = 1e-6 rad) for the exact curve.
double sensitivity(double theta, const WeakMeasurementModel& model, EvalMode mode);

/// F_theta = sum_{+-} (d_theta p)^2 / p, per detected photon.
/// Throws DegenerateOutcome when p+ is 0 or 1.
double fisher_information(double theta, const WeakMeasurementModel& model, EvalMode mode);

/// Both algebraic routes to the estimator variance; they agree to a few ulp
/// for a binary outcome and crb_variance enforces 1e-12 relative agreement.
struct CrbResult {
    double crb_var;                // 1/(N F_theta)
    double error_propagation_var;  // Var[O] / |d<O>/dtheta|^2
};

CrbResult crb_variance(double theta, const WeakMeasurementModel& model,
                       std::uint64_t n_total, EvalMode mode);

/// Maximum-likelihood theta from one count record, by inverting p+(theta) on a
/// monotonic branch (inversion and MLE coincide for a binomial outcome).
/// Out-of-range observed contrast pins the estimate to the nearer endpoint and
/// sets the saturation flag. `validate` controls the monotonic-branch scan.
EstimationReport estimate_theta(const CountRecord& counts,
                                const WeakMeasurementModel& model,
                                SearchInterval interval,
                                EvalMode mode = EvalMode::exact,
                                bool validate = true);

}  // namespace spinpointer
