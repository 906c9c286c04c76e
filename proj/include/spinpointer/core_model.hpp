#pragma once

#include <complex>
#include <utility>

#include "spinpointer/errors.hpp"

namespace spinpointer {

using Complex = std::complex<double>;

/// Normalized state of the two-level system, expressed on the basis
/// {|a1>, |a2>} that diagonalizes the default observable.
struct TwoLevelState {
    Complex a1{1.0, 0.0};
    Complex a2{0.0, 0.0};

    double norm_sq() const { return std::norm(a1) + std::norm(a2); }
    bool is_normalized(double tol = 1e-12) const;

    /// Builds a state from unnormalized amplitudes.
    static TwoLevelState normalized(Complex c1, Complex c2);
};

/// <bra|ket> on the two-level system.
Complex inner_product(const TwoLevelState& bra, const TwoLevelState& ket);

/// 2x2 Hermitian system observable. Defaults to |a1><a1| - |a2><a2|.
struct SystemObservable {
    double m11 = 1.0;
    double m22 = -1.0;
    Complex m12{0.0, 0.0};  // m21 = conj(m12)

    static SystemObservable default_split() { return SystemObservable{}; }
    static SystemObservable from_matrix(Complex a11, Complex a12, Complex a21,
                                        Complex a22, double tol = 1e-12);

    /// A|psi> (result not normalized).
    TwoLevelState apply(const TwoLevelState& psi) const;

    struct Eigensystem {
        double lambda1, lambda2;
        TwoLevelState v1, v2;
    };
    Eigensystem eigensystem() const;
};

/// Gaussian meter profile f(q) = (2/(pi sigma^2))^(1/4) exp(-q^2/sigma^2).
/// The conjugate-variable density is then Gaussian with variance 1/sigma^2.
struct MeterSpec {
    double sigma = 27.0;  // um
};

/// Everything needed to evaluate the measurement chain: selection states,
/// coupling strength g (um), meter width and the system observable.
struct WeakMeasurementModel {
    TwoLevelState pre;
    TwoLevelState post;
    double g = 0.0;  // um
    MeterSpec meter;
    SystemObservable obs;
};

/// Two-bin outcome probabilities conditioned on post-selection success.
struct OutcomeProbabilities {
    double p_plus = 0.5;
    double p_minus = 0.5;
    double p_ps = 1.0;
};

/// Angle-parameterized selection pair: |pre> = (|a1> + |a2>)/sqrt(2) and the
/// nearly orthogonal post state whose overlap with |pre> equals sin(theta)
/// (real, >= 0 on [0, pi]).
std::pair<TwoLevelState, TwoLevelState> postselect_angle_states(double theta);

/// <post|A|pre> / <post|pre>. Throws ZeroOverlap when |<post|pre>| < eps.
/// For the angle-parameterized pair this evaluates to i*cot(theta).
Complex weak_value(const TwoLevelState& pre, const TwoLevelState& post,
                   const SystemObservable& obs, double eps = 1e-14);

/// Copy of `base` with pre/post replaced by the angle-parameterized pair.
WeakMeasurementModel with_angle(const WeakMeasurementModel& base, double theta);

/// Kraus amplitude M(u) = <post| exp(-i g A u) |pre>, u in 1/um.
Complex kraus_amplitude(double u, const WeakMeasurementModel& model);

/// Post-selection success probability, integral of |M(u)|^2 over the
/// conjugate-variable density (adaptive quadrature over +-8 std).
double postselection_probability(const WeakMeasurementModel& model);
double postselection_probability(double theta, const WeakMeasurementModel& model);

/// Exact two-bin probabilities: the normalized post-selected density split at
/// u = 0. Throws VanishingPostselection when p_ps falls below `ps_floor`.
OutcomeProbabilities outcome_probabilities_exact(const WeakMeasurementModel& model,
                                                 double ps_floor = 1e-30);
OutcomeProbabilities outcome_probabilities_exact(double theta,
                                                 const WeakMeasurementModel& model,
                                                 double ps_floor = 1e-30);

/// p_plus - p_minus from the exact two-bin probabilities.
double contrast_exact(double theta, const WeakMeasurementModel& model);

/// First-order contrast 2*sqrt(2/pi)*(g/sigma)*cot(theta) / (1 + ((g/sigma)cot(theta))^2).
/// Throws AngleSingularity where cot is undefined.
double contrast_firstorder(double theta, const WeakMeasurementModel& model);

/// General first-order contrast 2*(g/sigma)*sqrt(2/pi)*Im(A_w) / (1 + (g/sigma)^2 |A_w|^2),
/// valid for an arbitrary selection pair; reduces to contrast_firstorder for
/// the angle-parameterized states.
double contrast_general_firstorder(const WeakMeasurementModel& model);
double contrast_general_firstorder(double theta, const WeakMeasurementModel& model);

}  // namespace spinpointer
