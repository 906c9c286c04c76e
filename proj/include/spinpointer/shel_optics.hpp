#pragma once

#include "spinpointer/core_model.hpp"

namespace spinpointer {

/// Air-to-glass reflection geometry of the beam-shift experiment.
struct OpticalSetup {
    double wavelength_nm = 632.8;
    double theta_i = 0.5235987755982988;  // rad (30 deg)
    double n = 1.515;
    double sigma_um = 27.0;

    double k0_per_um() const { return 2.0 * M_PI / (wavelength_nm * 1e-3); }

    /// Throws ValidationError on out-of-range parameters.
    void validate() const;
};

/// Signed amplitude reflection coefficients at the interface.
struct FresnelCoefficients {
    double r_p = 0.0;
    double r_s = 0.0;
};

/// r_p = (n cos(ti) - cos(tt)) / (n cos(ti) + cos(tt)),
/// r_s = (cos(ti) - n cos(tt)) / (cos(ti) + n cos(tt)), sin(tt) = sin(ti)/n.
FresnelCoefficients fresnel(const OpticalSetup& setup);

/// Transverse spin-dependent beam shift delta_H = cot(ti) (1 + r_s/r_p) / k0, in um.
/// Throws BrewsterSingularity when |r_p| < 1e-9.
double shel_shift(const OpticalSetup& setup);

/// Maps the optical geometry onto the abstract measurement model:
/// pre = (|+> + |->)/sqrt(2), g = delta_H, meter width sigma.
/// The stored post state is the angle pair at pi/4; angle-parameterized
/// operations replace it per call.
WeakMeasurementModel to_model(const OpticalSetup& setup);

/// Closed-form count contrast (N+ - N-)/(N+ + N-) of the reflection setup;
/// algebraically identical to contrast_firstorder(theta, to_model(setup)).
double shel_contrast(double theta, const OpticalSetup& setup);

}  // namespace spinpointer
