#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "spinpointer/errors.hpp"

namespace spinpointer {

// 7-point Gauss / 15-point Kronrod pair (QUADPACK coefficients).
// Nodes are the positive half; the rule is symmetric about the midpoint.
namespace gk15 {
inline constexpr std::array<double, 8> nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights attach to the odd-indexed Kronrod nodes (and the midpoint).
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
}  // namespace gk15

/// One G7K15 panel: returns {kronrod_estimate, |kronrod - gauss|}.
template <typename F>
std::pair<double, double> gk15_panel(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    const double f_mid = f(mid);
    double kronrod = gk15::kronrod_weights[7] * f_mid;
    double gauss = gk15::gauss_weights[3] * f_mid;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * gk15::nodes[i];
        const double fsum = f(mid - dx) + f(mid + dx);
        kronrod += gk15::kronrod_weights[i] * fsum;
        if (i % 2 == 1) gauss += gk15::gauss_weights[i / 2] * fsum;
    }
    kronrod *= half;
    gauss *= half;
    return {kronrod, std::abs(kronrod - gauss)};
}

/// Adaptive Gauss-Kronrod integration of f over [a, b].
/// A panel is accepted once its error estimate is below
/// max(abs_tol_panel, rel_tol * |panel value|); panels subdivide otherwise.
/// Throws QuadratureFailure when the interval budget is exhausted.
template <typename F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-10,
                 double abs_tol = 0.0, int max_intervals = 4000) {
    if (a == b) return 0.0;

    struct Panel {
        double a, b;
    };
    std::vector<Panel> stack;
    stack.reserve(64);
    stack.push_back({a, b});

    double total = 0.0;
    int used = 1;
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();

        auto [value, err] = gk15_panel(f, p.a, p.b);
        // QUADPACK-style sharpening of the raw |K-G| difference.
        double scaled = 200.0 * err;
        scaled = std::min(scaled * std::sqrt(scaled), err);
        const double frac = std::abs(p.b - p.a) / std::abs(b - a);
        if (scaled <= std::max(abs_tol * frac, rel_tol * std::abs(value)) ||
            std::abs(p.b - p.a) < 1e-15 * std::abs(b - a)) {
            total += value;
            continue;
        }
        if (used + 2 > max_intervals)
            throw QuadratureFailure("adaptive integration did not converge");
        const double mid = 0.5 * (p.a + p.b);
        stack.push_back({p.a, mid});
        stack.push_back({mid, p.b});
        used += 2;
    }
    return total;
}

/// Centered finite difference with one Richardson refinement step.
template <typename F>
double richardson_derivative(F&& f, double x, double h = 1e-6) {
    const double d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    const double d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

}  // namespace spinpointer
