#include "spinpointer/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spinpointer/baseline.hpp"
#include "spinpointer/rng.hpp"
#include "spinpointer/runner.hpp"

namespace spinpointer {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

OpticalSetup reference_setup() { return OpticalSetup{632.8, M_PI / 6.0, 1.515, 27.0}; }

// Relative CRB-route agreement over a (theta, g/sigma) grid in one mode.
double crb_identity_worst(const std::vector<double>& thetas,
                          const std::vector<double>& ratios, EvalMode mode) {
    double worst = 0.0;
    WeakMeasurementModel m;
    auto [pre, post] = postselect_angle_states(M_PI / 4.0);
    m.pre = pre;
    m.post = post;
    m.meter.sigma = 1.0;
    for (double a : ratios) {
        m.g = a;
        for (double t : thetas) {
            const auto r = crb_variance(t, m, 1000, mode);
            const double rel = std::abs(r.crb_var - r.error_propagation_var) /
                               std::max(r.crb_var, r.error_propagation_var);
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

CheckResult check_crb_identity() {
    CheckResult res{"1", "Cramer-Rao saturation identity", false, ""};
    std::vector<double> thetas;
    for (int i = 0; i < 40; ++i) thetas.push_back(0.004 + (1.5 - 0.004) * i / 39.0);
    std::vector<double> ratios;
    for (int i = 0; i < 25; ++i)
        ratios.push_back(1e-4 * std::pow(300.0, i / 24.0));  // 1e-4 .. 3e-2

    try {
        const double worst_fo = crb_identity_worst(thetas, ratios, EvalMode::firstorder);
        std::vector<double> thetas_sub, ratios_sub;
        for (std::size_t i = 0; i < thetas.size(); i += 2) thetas_sub.push_back(thetas[i]);
        for (std::size_t i = 0; i < ratios.size(); i += 3) ratios_sub.push_back(ratios[i]);
        const double worst_ex = crb_identity_worst(thetas_sub, ratios_sub, EvalMode::exact);
        const double worst = std::max(worst_fo, worst_ex);
        res.pass = worst <= 1e-12;
        res.detail = "max relative route difference " + num(worst) +
                     " over 1000 first-order + 180 exact grid points (tolerance 1e-12)";
    } catch (const Error& e) {
        res.detail = std::string("error: ") + e.what();
    }
    return res;
}

CheckResult check_formula_composition() {
    CheckResult res{"2", "closed-form contrast equals first-order composition", false, ""};
    const OpticalSetup setup = reference_setup();
    const WeakMeasurementModel model = to_model(setup);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double t = -0.3 + 0.6 * i / 999.0;
        if (std::abs(std::sin(t)) < 1e-12) continue;
        worst = std::max(worst,
                         std::abs(shel_contrast(t, setup) - contrast_firstorder(t, model)));
    }
    res.pass = worst < 1e-12;
    res.detail = "max |difference| " + num(worst) +
                 " over theta in [-0.3, 0.3] (tolerance 1e-12)";
    return res;
}

CheckResult check_exact_model_oracle() {
    CheckResult res{"3", "exact model vs closed forms", false, ""};

    // Kraus amplitude magnitude against sin^2(theta + g u) on a 1000-point grid.
    double worst_kraus = 0.0;
    WeakMeasurementModel m;
    m.meter.sigma = 1.0;
    int idx = 0;
    for (int it = 0; it < 10; ++it) {
        const double theta = -1.4 + 2.8 * it / 9.0;
        for (int ig = 0; ig < 10; ++ig) {
            const double g = -0.2 + 0.4 * ig / 9.0;
            for (int iu = 0; iu < 10; ++iu, ++idx) {
                const double u = -6.0 + 12.0 * iu / 9.0;
                WeakMeasurementModel mm = with_angle(m, theta);
                mm.g = g;
                const double lhs = std::norm(kraus_amplitude(u, mm));
                const double s = std::sin(theta + g * u);
                worst_kraus = std::max(worst_kraus, std::abs(lhs - s * s));
            }
        }
    }

    // Two-bin exact probabilities against the first-order contrast inside the
    // weak-coupling working regime.
    double worst_rel = 0.0;
    const std::vector<double> ratios = {1e-4, 1e-3, 3.2679117664646254e-3, 1e-2, 3e-2};
    for (double a : ratios) {
        WeakMeasurementModel mm;
        mm.meter.sigma = 1.0;
        mm.g = a;
        for (int i = 0; i < 25; ++i) {
            const double t = 0.005 + (1.5 - 0.005) * i / 24.0;
            const double x = a * std::cos(t) / std::sin(t);
            if (std::abs(x) > 0.5) continue;
            if (std::sin(t) * std::sin(t) < 10.0 * a * a) continue;
            const double exact = contrast_exact(t, mm);
            const double fo = contrast_firstorder(t, mm);
            worst_rel = std::max(worst_rel, std::abs(exact - fo) / std::abs(fo));
        }
    }

    res.pass = worst_kraus <= 1e-12 && worst_rel <= 0.01;
    res.detail = "max |M|^2 deviation " + num(worst_kraus) +
                 " (tolerance 1e-12); max regime contrast mismatch " + num(worst_rel) +
                 " (tolerance 0.01)";
    return res;
}

CheckResult check_precision_claim(unsigned threads) {
    CheckResult res{"4", "precision reach and Monte Carlo CRB tracking", false, ""};
    const WeakMeasurementModel model = to_model(reference_setup());

    // Best Cramer-Rao std over the monotonic working branch at N = 50000.
    double best = std::numeric_limits<double>::infinity();
    const double lo = 0.004, hi = 0.3;
    for (int i = 0; i < 300; ++i) {
        const double t = lo * std::pow(hi / lo, i / 299.0);
        const double f = fisher_information(t, model, EvalMode::exact);
        if (f > 0.0) best = std::min(best, std::sqrt(1.0 / (50000.0 * f)));
    }
    const bool window_ok = best >= 1e-5 && best <= 2e-4;

    // 1000-trial estimator spread at theta = 0.01 against sqrt(CRB).
    const double theta = 0.01;
    const std::size_t trials = 1000;
    const double p_plus = outcome_probabilities_exact(theta, model).p_plus;
    std::vector<double> hats(trials);
    parallel_for_index(trials, threads, [&](std::size_t i) {
        const CountRecord rec = simulate_window_with_p(
            theta, p_plus, SourceSpec::fixed(50000), NoiseSpec{}, 10.0,
            derive_seed(91, i));
        hats[i] = estimate_theta(rec, model, {lo, hi}, EvalMode::exact, false).theta_hat;
    });
    double mean = 0.0;
    for (double h : hats) mean += h;
    mean /= static_cast<double>(trials);
    double ss = 0.0;
    for (double h : hats) ss += (h - mean) * (h - mean);
    const double mc_std = std::sqrt(ss / static_cast<double>(trials - 1));
    const double crb_std =
        std::sqrt(1.0 / (50000.0 * fisher_information(theta, model, EvalMode::exact)));
    const double track = std::abs(mc_std / crb_std - 1.0);

    res.pass = window_ok && track <= 0.10;
    res.detail = "min sqrt(CRB) over branch " + num(best) +
                 " (window [1e-5, 2e-4]); MC std " + num(mc_std) + " vs CRB std " +
                 num(crb_std) + ", deviation " + num(track) + " (tolerance 0.10)";
    return res;
}

CheckResult check_contrast_noise_band(unsigned threads) {
    CheckResult res{"5", "contrast noise at fixed photon number", false, ""};
    const WeakMeasurementModel model = to_model(reference_setup());
    const double theta = M_PI / 2.0;  // symmetric point, p+ = 1/2

    auto spread = [&](std::uint64_t n_fixed, std::uint64_t seed_base) {
        const std::size_t trials = 1000;
        const double p = outcome_probabilities_exact(theta, model).p_plus;
        std::vector<double> c(trials);
        parallel_for_index(trials, threads, [&](std::size_t i) {
            c[i] = simulate_window_with_p(theta, p, SourceSpec::fixed(n_fixed),
                                          NoiseSpec{}, 10.0,
                                          derive_seed(seed_base, i))
                       .contrast();
        });
        double mean = 0.0;
        for (double x : c) mean += x;
        mean /= static_cast<double>(trials);
        double ss = 0.0;
        for (double x : c) ss += (x - mean) * (x - mean);
        return std::sqrt(ss / static_cast<double>(trials - 1));
    };

    const double s500 = spread(500, 1201);
    const double s1500 = spread(1500, 1301);
    const double t500 = std::sqrt(1.0 / 500.0);    // 0.04472
    const double t1500 = std::sqrt(1.0 / 1500.0);  // 0.02582
    const bool ok500 = std::abs(s500 / t500 - 1.0) <= 0.10;
    const bool ok1500 = std::abs(s1500 / t1500 - 1.0) <= 0.10;

    res.pass = ok500 && ok1500;
    res.detail = "std(N=500) " + num(s500) + " vs " + num(t500) + "; std(N=1500) " +
                 num(s1500) + " vs " + num(t1500) + " (each within 10%)";
    return res;
}

CheckResult check_window_scaling(unsigned threads) {
    CheckResult res{"6", "integration-time scaling of the contrast spread", false, ""};
    const WeakMeasurementModel model = to_model(reference_setup());
    const double theta = 0.01;

    auto spread = [&](double window_ms, std::uint64_t seed_base) {
        const std::size_t trials = 100;
        const double p = outcome_probabilities_exact(theta, model).p_plus;
        std::vector<double> c(trials);
        parallel_for_index(trials, threads, [&](std::size_t i) {
            c[i] = simulate_window_with_p(theta, p, SourceSpec::rate(50000.0),
                                          NoiseSpec{}, window_ms,
                                          derive_seed(seed_base, i))
                       .contrast();
        });
        double mean = 0.0;
        for (double x : c) mean += x;
        mean /= static_cast<double>(trials);
        double ss = 0.0;
        for (double x : c) ss += (x - mean) * (x - mean);
        return std::sqrt(ss / static_cast<double>(trials - 1));
    };

    const double s10 = spread(10.0, 401);
    const double s1000 = spread(1000.0, 402);
    const double ratio = s10 / s1000;
    res.pass = ratio >= 7.5 && ratio <= 12.5;
    res.detail = "std(10 ms)/std(1000 ms) = " + num(ratio) +
                 " (expected 10 within 25%)";
    return res;
}

CheckResult check_data_processing() {
    CheckResult res{"7", "pixel-array data-processing inequality", false, ""};
    const WeakMeasurementModel model = to_model(reference_setup());
    const double u_max = 8.0 / model.meter.sigma;

    bool dpi_ok = true, equal_ok = true;
    double worst_violation = 0.0, worst_equal = 0.0;
    for (double t : {0.005, 0.01, 0.02, 0.05}) {
        for (int n : {2, 16, 256}) {
            const auto cmp = fisher_comparison(t, model, PixelArraySpec{n, u_max, 0.0});
            const double violation = cmp.f_twobin - cmp.f_pixels;
            worst_violation = std::max(worst_violation, violation);
            if (violation > 1e-9) dpi_ok = false;
            if (n == 2) {
                const double diff = std::abs(cmp.f_twobin - cmp.f_pixels);
                worst_equal = std::max(worst_equal, diff);
                if (diff > 1e-9 * std::max(1.0, cmp.f_twobin)) equal_ok = false;
            }
        }
    }
    const auto working = fisher_comparison(0.01, model, PixelArraySpec{256, u_max, 0.0});
    const bool ratio_ok = working.ratio >= 0.5;

    res.pass = dpi_ok && equal_ok && ratio_ok;
    res.detail = "worst F_twobin - F_pixels " + num(worst_violation) +
                 " (slack 1e-9); 2-pixel |difference| " + num(worst_equal) +
                 "; working-point ratio " + num(working.ratio) + " (>= 0.5)";
    return res;
}

CheckResult check_determinism() {
    CheckResult res{"8", "byte-identical reruns across thread counts", false, ""};
    const std::string base_cfg =
        "[setup]\nwavelength = 632.8\ntheta_i = 30 deg\nn = 1.515\nsigma = 27\n"
        "[sweep]\nkind = theta\ngrid = 0.005:0.05:5\n"
        "[source]\npost_rate = 50000\nwindow = 10\n"
        "[run]\ntrials = 6\nmaster_seed = 777\n";

    const auto tmp = std::filesystem::temp_directory_path() /
                     ("spinpointer-verify-" + std::to_string(fnv1a64(base_cfg)));
    std::error_code ec;
    std::filesystem::remove_all(tmp, ec);

    auto read_file = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    try {
        std::vector<std::string> contents;
        for (unsigned threads : {1u, 4u, 8u, 1u}) {
            const auto dir = tmp / ("t" + std::to_string(contents.size()));
            ExperimentConfig cfg = parse_config(base_cfg);
            RunOverrides ov;
            ov.out_dir = dir.string();
            ov.threads = threads;
            const RunOutputs out = run_sweep(cfg, ov);
            contents.push_back(read_file(out.csv_files.front()));
        }
        const bool all_equal =
            contents[0] == contents[1] && contents[0] == contents[2] &&
            contents[0] == contents[3];
        res.pass = all_equal && !contents[0].empty();
        res.detail = all_equal ? "sweep CSV identical under 1, 4, 8 threads and on rerun"
                               : "CSV bytes differ across thread counts";
    } catch (const Error& e) {
        res.detail = std::string("error: ") + e.what();
    }
    std::filesystem::remove_all(tmp, ec);
    return res;
}

}  // namespace

std::vector<CheckResult> run_verification(unsigned threads) {
    std::vector<CheckResult> results;
    results.push_back(check_crb_identity());
    results.push_back(check_formula_composition());
    results.push_back(check_exact_model_oracle());
    results.push_back(check_precision_claim(threads));
    results.push_back(check_contrast_noise_band(threads));
    results.push_back(check_window_scaling(threads));
    results.push_back(check_data_processing());
    results.push_back(check_determinism());
    return results;
}

}  // namespace spinpointer
