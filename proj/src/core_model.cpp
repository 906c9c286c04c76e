#include "spinpointer/core_model.hpp"

#include <cmath>

#include "spinpointer/quadrature.hpp"

namespace spinpointer {

namespace {

constexpr double kSqrt2OverPi = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kTailSigmas = 8.0;  // integration window, +-8 std of the density

const Complex kI{0.0, 1.0};

void require_valid(const WeakMeasurementModel& m) {
    if (!(m.meter.sigma > 0.0)) throw ValidationError("meter sigma must be > 0");
    if (!std::isfinite(m.g)) throw ValidationError("coupling g must be finite");
    if (!m.pre.is_normalized() || !m.post.is_normalized())
        throw ValidationError("selection states must be normalized");
}

// Branch decomposition of M(u): with A = sum_k lambda_k |v_k><v_k|,
//   M(u) = sum_k <post|v_k><v_k|pre> exp(-i g lambda_k u).
struct KrausBranches {
    Complex amp1, amp2;
    double lam1, lam2;
};

KrausBranches kraus_branches(const WeakMeasurementModel& m) {
    const auto es = m.obs.eigensystem();
    return {inner_product(m.post, es.v1) * inner_product(es.v1, m.pre),
            inner_product(m.post, es.v2) * inner_product(es.v2, m.pre),
            es.lambda1, es.lambda2};
}

// |M(t/sigma)|^2 written as c0 + cr*cos(w t) + ci*sin(w t), t = u*sigma.
struct DensityTerms {
    double c0, cr, ci, w;
};

DensityTerms density_terms(const WeakMeasurementModel& m) {
    const auto br = kraus_branches(m);
    const Complex cross = br.amp1 * std::conj(br.amp2);
    const double w = (m.g / m.meter.sigma) * (br.lam1 - br.lam2);
    return {std::norm(br.amp1) + std::norm(br.amp2), 2.0 * cross.real(),
            2.0 * cross.imag(), w};
}

double std_normal_pdf(double t) {
    constexpr double inv_sqrt_2pi = 0.3989422804014327;
    return inv_sqrt_2pi * std::exp(-0.5 * t * t);
}

// Unnormalized post-selected mass of one half-line bin, in t = u*sigma units.
double bin_mass(const DensityTerms& d, double t_lo, double t_hi) {
    return integrate(
        [&](double t) {
            const double m2 =
                d.c0 + d.cr * std::cos(d.w * t) + d.ci * std::sin(d.w * t);
            return m2 * std_normal_pdf(t);
        },
        t_lo, t_hi, 1e-10, 1e-280);
}

}  // namespace

bool TwoLevelState::is_normalized(double tol) const {
    return std::abs(norm_sq() - 1.0) <= tol;
}

TwoLevelState TwoLevelState::normalized(Complex c1, Complex c2) {
    const double n = std::sqrt(std::norm(c1) + std::norm(c2));
    if (!(n > 0.0)) throw ValidationError("cannot normalize the zero state");
    return {c1 / n, c2 / n};
}

Complex inner_product(const TwoLevelState& bra, const TwoLevelState& ket) {
    return std::conj(bra.a1) * ket.a1 + std::conj(bra.a2) * ket.a2;
}

SystemObservable SystemObservable::from_matrix(Complex a11, Complex a12,
                                               Complex a21, Complex a22,
                                               double tol) {
    if (std::abs(a11.imag()) > tol || std::abs(a22.imag()) > tol ||
        std::abs(a12 - std::conj(a21)) > tol)
        throw ValidationError("observable matrix is not Hermitian");
    return {a11.real(), a22.real(), a12};
}

TwoLevelState SystemObservable::apply(const TwoLevelState& psi) const {
    return {m11 * psi.a1 + m12 * psi.a2,
            std::conj(m12) * psi.a1 + m22 * psi.a2};
}

SystemObservable::Eigensystem SystemObservable::eigensystem() const {
    if (std::abs(m12) == 0.0)
        return {m11, m22, TwoLevelState{1.0, 0.0}, TwoLevelState{0.0, 1.0}};
    const double mean = 0.5 * (m11 + m22);
    const double d = 0.5 * (m11 - m22);
    const double rad = std::sqrt(d * d + std::norm(m12));
    const double lam1 = mean + rad;
    const double lam2 = mean - rad;
    // (A - lambda I) v = 0 with v = (m12, lambda - m11); nonzero since m12 != 0.
    return {lam1, lam2, TwoLevelState::normalized(m12, Complex{lam1 - m11, 0.0}),
            TwoLevelState::normalized(m12, Complex{lam2 - m11, 0.0})};
}

std::pair<TwoLevelState, TwoLevelState> postselect_angle_states(double theta) {
    if (!std::isfinite(theta)) throw ValidationError("theta must be finite");
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    TwoLevelState pre{Complex{inv_sqrt2, 0.0}, Complex{inv_sqrt2, 0.0}};
    // |post> = i (e^{-i theta}|a2> - e^{i theta}|a1>)/sqrt(2);
    // fixes <post|pre> = sin(theta), real and >= 0 on [0, pi].
    TwoLevelState post{-kI * std::exp(kI * theta) * inv_sqrt2,
                       kI * std::exp(-kI * theta) * inv_sqrt2};
    return {pre, post};
}

Complex weak_value(const TwoLevelState& pre, const TwoLevelState& post,
                   const SystemObservable& obs, double eps) {
    const Complex overlap = inner_product(post, pre);
    if (std::abs(overlap) < eps)
        throw ZeroOverlap("post-selection overlap below epsilon; weak value diverges");
    return inner_product(post, obs.apply(pre)) / overlap;
}

WeakMeasurementModel with_angle(const WeakMeasurementModel& base, double theta) {
    WeakMeasurementModel m = base;
    auto [pre, post] = postselect_angle_states(theta);
    m.pre = pre;
    m.post = post;
    return m;
}

Complex kraus_amplitude(double u, const WeakMeasurementModel& model) {
    require_valid(model);
    const auto br = kraus_branches(model);
    return br.amp1 * std::exp(-kI * (model.g * br.lam1 * u)) +
           br.amp2 * std::exp(-kI * (model.g * br.lam2 * u));
}

double postselection_probability(const WeakMeasurementModel& model) {
    require_valid(model);
    const auto d = density_terms(model);
    return bin_mass(d, -kTailSigmas, 0.0) + bin_mass(d, 0.0, kTailSigmas);
}

double postselection_probability(double theta, const WeakMeasurementModel& model) {
    return postselection_probability(with_angle(model, theta));
}

OutcomeProbabilities outcome_probabilities_exact(const WeakMeasurementModel& model,
                                                 double ps_floor) {
    require_valid(model);
    const auto d = density_terms(model);
    const double mass_minus = bin_mass(d, -kTailSigmas, 0.0);
    const double mass_plus = bin_mass(d, 0.0, kTailSigmas);
    const double p_ps = mass_plus + mass_minus;
    if (!(p_ps > ps_floor))
        throw VanishingPostselection("post-selection probability below floor");
    return {mass_plus / p_ps, mass_minus / p_ps, p_ps};
}

OutcomeProbabilities outcome_probabilities_exact(double theta,
                                                 const WeakMeasurementModel& model,
                                                 double ps_floor) {
    return outcome_probabilities_exact(with_angle(model, theta), ps_floor);
}

double contrast_exact(double theta, const WeakMeasurementModel& model) {
    const auto p = outcome_probabilities_exact(theta, model);
    return p.p_plus - p.p_minus;
}

double contrast_firstorder(double theta, const WeakMeasurementModel& model) {
    if (!(model.meter.sigma > 0.0)) throw ValidationError("meter sigma must be > 0");
    const double s = std::sin(theta);
    if (s == 0.0) throw AngleSingularity("first-order contrast undefined at theta = 0 mod pi");
    const double x = (model.g / model.meter.sigma) * (std::cos(theta) / s);
    return 2.0 * kSqrt2OverPi * x / (1.0 + x * x);
}

double contrast_general_firstorder(const WeakMeasurementModel& model) {
    if (!(model.meter.sigma > 0.0)) throw ValidationError("meter sigma must be > 0");
    const Complex aw = weak_value(model.pre, model.post, model.obs);
    const double a = model.g / model.meter.sigma;
    // alpha = sqrt(2/pi)/sigma, beta = 0.
    return 2.0 * a * kSqrt2OverPi * aw.imag() / (1.0 + a * a * std::norm(aw));
}

double contrast_general_firstorder(double theta, const WeakMeasurementModel& model) {
    return contrast_general_firstorder(with_angle(model, theta));
}

}  // namespace spinpointer
