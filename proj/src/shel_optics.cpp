#include "spinpointer/shel_optics.hpp"

#include <cmath>

namespace spinpointer {

namespace {
constexpr double kSqrt2OverPi = 0.7978845608028654;
constexpr double kBrewsterEps = 1e-9;
}  // namespace

void OpticalSetup::validate() const {
    if (!(wavelength_nm > 0.0)) throw ValidationError("wavelength must be > 0");
    if (!(theta_i > 0.0 && theta_i < M_PI / 2.0))
        throw ValidationError("incidence angle must lie in (0, pi/2)");
    if (!(n > 1.0)) throw ValidationError("refractive index must be > 1");
    if (!(sigma_um > 0.0)) throw ValidationError("beam width must be > 0");
}

FresnelCoefficients fresnel(const OpticalSetup& setup) {
    const double sin_t = std::sin(setup.theta_i) / setup.n;
    if (!(sin_t < 1.0))
        throw TotalInternalReflection("sin(theta_i)/n >= 1");
    const double cos_i = std::cos(setup.theta_i);
    const double cos_t = std::sqrt(1.0 - sin_t * sin_t);
    const double n = setup.n;
    return {(n * cos_i - cos_t) / (n * cos_i + cos_t),
            (cos_i - n * cos_t) / (cos_i + n * cos_t)};
}

double shel_shift(const OpticalSetup& setup) {
    const auto fr = fresnel(setup);
    if (std::abs(fr.r_p) < kBrewsterEps)
        throw BrewsterSingularity("r_p vanishes; beam shift undefined");
    const double cot_i = std::cos(setup.theta_i) / std::sin(setup.theta_i);
    return cot_i * (1.0 + fr.r_s / fr.r_p) / setup.k0_per_um();
}

WeakMeasurementModel to_model(const OpticalSetup& setup) {
    WeakMeasurementModel m;
    auto [pre, post] = postselect_angle_states(M_PI / 4.0);
    m.pre = pre;
    m.post = post;
    m.g = shel_shift(setup);
    m.meter.sigma = setup.sigma_um;
    m.obs = SystemObservable::default_split();
    return m;
}

double shel_contrast(double theta, const OpticalSetup& setup) {
    const double s = std::sin(theta);
    if (s == 0.0) throw AngleSingularity("contrast undefined at theta = 0 mod pi");
    const auto fr = fresnel(setup);
    if (std::abs(fr.r_p) < kBrewsterEps)
        throw BrewsterSingularity("r_p vanishes; contrast undefined");
    const double k0s = setup.k0_per_um() * setup.sigma_um;
    const double cot_i = std::cos(setup.theta_i) / std::sin(setup.theta_i);
    const double cot = std::cos(theta) / s;
    const double rsum = fr.r_p + fr.r_s;
    const double num = 2.0 * kSqrt2OverPi * k0s * fr.r_p * rsum * cot_i * cot;
    const double den = k0s * k0s * fr.r_p * fr.r_p + rsum * rsum * cot_i * cot_i * cot * cot;
    return num / den;
}

}  // namespace spinpointer
