#include "spinpointer/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "spinpointer/baseline.hpp"
#include "spinpointer/rng.hpp"
#include "spinpointer/svg.hpp"

namespace spinpointer {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("failed writing " + path.string());
}

ExperimentConfig apply_overrides(ExperimentConfig cfg, const RunOverrides& ov) {
    if (ov.seed) cfg.run.master_seed = *ov.seed;
    if (ov.out_dir) cfg.run.output = *ov.out_dir;
    if (ov.threads) cfg.run.threads = *ov.threads;
    return cfg;
}

fs::path prepare_out_dir(const ExperimentConfig& cfg) {
    fs::path dir(cfg.run.output);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string());
    return dir;
}

const char* grid_column_name(SweepParameter p) {
    switch (p) {
        case SweepParameter::theta: return "theta";
        case SweepParameter::n_photons: return "n_photons";
        case SweepParameter::window: return "window_ms";
    }
    return "grid";
}

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    if (cfg.setup) {
        j["setup"] = {{"wavelength", cfg.setup->wavelength_nm},
                      {"theta_i", cfg.setup->theta_i},
                      {"n", cfg.setup->n},
                      {"sigma", cfg.setup->sigma_um}};
    } else {
        j["model"] = {{"g", cfg.model->g}, {"sigma", cfg.model->sigma}};
    }
    j["sweep"] = {{"kind", grid_column_name(cfg.sweep.kind)},
                  {"grid", cfg.sweep.grid},
                  {"theta", cfg.sweep.theta_fixed}};
    if (cfg.source.is_rate())
        j["source"] = {{"post_rate", *cfg.source.rate_counts_per_s},
                       {"window", cfg.window_ms}};
    else
        j["source"] = {{"fixed_n", *cfg.source.fixed_n}, {"window", cfg.window_ms}};
    j["noise"] = {{"background_rate", cfg.noise.background_rate},
                  {"power_rel_sigma", cfg.noise.power_rel_sigma},
                  {"detector_efficiency", cfg.noise.detector_efficiency}};
    j["run"] = {{"trials", cfg.run.trials},
                {"master_seed", cfg.run.master_seed},
                {"output", cfg.run.output},
                {"theta_lo", cfg.run.theta_lo},
                {"theta_hi", cfg.run.theta_hi},
                {"mode", cfg.run.mode == EvalMode::exact ? "exact" : "firstorder"},
                {"threads", cfg.run.threads}};
    return j;
}

void write_manifest(const fs::path& path, const ExperimentConfig& cfg,
                    const std::string& command,
                    const std::vector<fs::path>& outputs,
                    const std::vector<std::string>& columns) {
    const std::string cfg_text = format_config(cfg);
    char hash_hex[20];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(cfg_text)));

    json j;
    j["tool"] = "spinpointer";
    j["version"] = kToolVersion;
    j["command"] = command;
    j["master_seed"] = cfg.run.master_seed;
    j["config_hash_fnv1a64"] = hash_hex;
    j["config"] = config_to_json(cfg);
    j["config_text"] = cfg_text;  // reruns re-derive every row from this alone
    j["columns"] = columns;
    std::vector<std::string> names;
    for (const auto& p : outputs) names.push_back(p.filename().string());
    j["outputs"] = names;
    write_text_file(path, j.dump(2) + "\n");
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<std::string> preset_names() { return {"fig3", "fig4", "fig5", "fig6"}; }

std::string preset_config_text(const std::string& name) {
    const std::string setup =
        "[setup]\n"
        "wavelength = 632.8\n"
        "theta_i = 30 deg\n"
        "n = 1.515\n"
        "sigma = 27\n\n";
    if (name == "fig3") {
        // Count contrast across the post-selection angle at 50 kHz, 10 ms windows.
        return setup +
               "[sweep]\nkind = theta\ngrid = -0.1:0.1:41\n\n"
               "[source]\npost_rate = 50000\nwindow = 10\n\n"
               "[run]\ntrials = 10\nmaster_seed = 61803\noutput = out/fig3\n";
    }
    if (name == "fig4") {
        // Contrast spread at two fixed output photon numbers.
        return setup +
               "[sweep]\nkind = n_photons\ngrid = 500,1500\ntheta = 0.01\n\n"
               "[run]\ntrials = 1000\nmaster_seed = 27182\noutput = out/fig4\n";
    }
    if (name == "fig5") {
        // Contrast spread across integration windows at a fixed rate.
        return setup +
               "[sweep]\nkind = window\ngrid = 10,100,1000\ntheta = 0.01\n\n"
               "[source]\npost_rate = 50000\n\n"
               "[run]\ntrials = 100\nmaster_seed = 31415\noutput = out/fig5\n";
    }
    if (name == "fig6") {
        // Estimator precision against the photon budget.
        return setup +
               "[sweep]\nkind = n_photons\ngrid = 500,1500,5000,15000,50000\n"
               "theta = 0.01\n\n"
               "[run]\ntrials = 1000\nmaster_seed = 14142\noutput = out/fig6\n";
    }
    throw ValidationError("unknown preset '" + name + "'");
}

RunOutputs run_sweep(const ExperimentConfig& config, const RunOverrides& overrides) {
    const ExperimentConfig cfg = apply_overrides(config, overrides);
    const WeakMeasurementModel model = cfg.build_model();
    const SweepRequest request = cfg.build_sweep_request();
    const std::vector<SweepRow> rows = sweep(request, model);

    RunOutputs outputs;
    outputs.out_dir = prepare_out_dir(cfg);

    const std::vector<std::string> columns = {
        grid_column_name(cfg.sweep.kind), "mean_contrast", "std_contrast",
        "exact_contrast", "theta_hat_mean", "theta_hat_std", "crb_std", "fisher"};

    std::ostringstream csv;
    for (std::size_t i = 0; i < columns.size(); ++i)
        csv << (i ? "," : "") << columns[i];
    csv << "\n";
    for (const auto& r : rows) {
        csv << fmt(r.grid_value) << "," << fmt(r.mean_contrast) << ","
            << fmt(r.std_contrast) << "," << fmt(r.exact_contrast) << ","
            << fmt(r.theta_hat_mean) << "," << fmt(r.theta_hat_std) << ","
            << fmt(r.crb_std) << "," << fmt(r.fisher) << "\n";
    }
    const fs::path csv_path = outputs.out_dir / "sweep.csv";
    write_text_file(csv_path, csv.str());
    outputs.csv_files.push_back(csv_path);

    // Overlay chart: simulation points on the analytic curve.
    std::vector<ChartSeries> series;
    if (cfg.sweep.kind == SweepParameter::theta) {
        ChartSeries curve{"exact contrast", "#b2341f", true, {}, {}, {}};
        const double lo = rows.front().grid_value;
        const double hi = rows.back().grid_value;
        for (int i = 0; i < 201; ++i) {
            const double t = lo + (hi - lo) * i / 200.0;
            curve.x.push_back(t);
            curve.y.push_back(contrast_exact(t, model));
        }
        ChartSeries sim{"simulated mean", "#1f6fb2", false, {}, {}, {}};
        for (const auto& r : rows) {
            sim.x.push_back(r.grid_value);
            sim.y.push_back(r.mean_contrast);
            sim.yerr.push_back(r.std_contrast);
        }
        series = {curve, sim};
        const fs::path svg_path = outputs.out_dir / "sweep.svg";
        write_text_file(svg_path,
                        render_svg_chart("theta (rad)", "contrast", series));
        outputs.svg_files.push_back(svg_path);
    } else {
        ChartSeries pred{"predicted std", "#b2341f", true, {}, {}, {}};
        ChartSeries sim{"simulated std", "#1f6fb2", false, {}, {}, {}};
        for (const auto& r : rows) {
            const double n_expected =
                cfg.sweep.kind == SweepParameter::n_photons
                    ? r.grid_value
                    : *cfg.source.rate_counts_per_s * (r.grid_value / 1000.0) *
                          cfg.noise.detector_efficiency;
            const double p = 0.5 * (1.0 + r.exact_contrast);
            pred.x.push_back(r.grid_value);
            pred.y.push_back(std::sqrt(4.0 * p * (1.0 - p) / n_expected));
            sim.x.push_back(r.grid_value);
            sim.y.push_back(r.std_contrast);
        }
        series = {pred, sim};
        const fs::path svg_path = outputs.out_dir / "sweep.svg";
        write_text_file(svg_path, render_svg_chart(grid_column_name(cfg.sweep.kind),
                                                   "contrast std", series));
        outputs.svg_files.push_back(svg_path);
    }

    outputs.manifest = outputs.out_dir / "manifest.json";
    std::vector<fs::path> all = outputs.csv_files;
    all.insert(all.end(), outputs.svg_files.begin(), outputs.svg_files.end());
    write_manifest(outputs.manifest, cfg, "sweep", all, columns);
    return outputs;
}

RunOutputs run_fisher_table(const ExperimentConfig& config,
                            const RunOverrides& overrides) {
    const ExperimentConfig cfg = apply_overrides(config, overrides);
    const WeakMeasurementModel model = cfg.build_model();

    std::vector<double> grid = cfg.sweep.grid;
    if (cfg.sweep.kind != SweepParameter::theta) {
        grid.clear();
        for (int i = 0; i < 60; ++i)
            grid.push_back(cfg.run.theta_lo +
                           (cfg.run.theta_hi - cfg.run.theta_lo) * i / 59.0);
    }
    const double n_expected =
        cfg.source.expected_photons(cfg.window_ms, cfg.noise.detector_efficiency);

    RunOutputs outputs;
    outputs.out_dir = prepare_out_dir(cfg);
    const std::vector<std::string> columns = {
        "theta",          "contrast_exact", "contrast_firstorder",
        "sensitivity_exact", "sensitivity_firstorder", "fisher_exact",
        "fisher_firstorder", "crb_std_exact"};

    std::ostringstream csv;
    for (std::size_t i = 0; i < columns.size(); ++i)
        csv << (i ? "," : "") << columns[i];
    csv << "\n";
    for (double t : grid) {
        const double ce = contrast_exact(t, model);
        const double se = sensitivity(t, model, EvalMode::exact);
        const double fe = fisher_information(t, model, EvalMode::exact);
        double cf = std::numeric_limits<double>::quiet_NaN();
        double sf = cf, ff = cf;
        if (std::sin(t) != 0.0) {
            cf = contrast_firstorder(t, model);
            sf = sensitivity(t, model, EvalMode::firstorder);
            ff = fisher_information(t, model, EvalMode::firstorder);
        }
        const double crb_std = fe > 0.0 && n_expected > 0.0
                                   ? std::sqrt(1.0 / (n_expected * fe))
                                   : std::numeric_limits<double>::infinity();
        csv << fmt(t) << "," << fmt(ce) << "," << fmt(cf) << "," << fmt(se) << ","
            << fmt(sf) << "," << fmt(fe) << "," << fmt(ff) << "," << fmt(crb_std)
            << "\n";
    }
    const fs::path csv_path = outputs.out_dir / "fisher.csv";
    write_text_file(csv_path, csv.str());
    outputs.csv_files.push_back(csv_path);

    outputs.manifest = outputs.out_dir / "manifest.json";
    write_manifest(outputs.manifest, cfg, "fisher", outputs.csv_files, columns);
    return outputs;
}

RunOutputs run_compare_baseline(const ExperimentConfig& config,
                                const RunOverrides& overrides) {
    const ExperimentConfig cfg = apply_overrides(config, overrides);
    const WeakMeasurementModel model = cfg.build_model();

    std::vector<double> grid;
    if (cfg.sweep.kind == SweepParameter::theta)
        grid = cfg.sweep.grid;
    else
        grid = {0.005, 0.01, 0.02, 0.05};

    PixelArraySpec px2{2, 8.0 / model.meter.sigma, 0.0};
    PixelArraySpec px16{16, 8.0 / model.meter.sigma, 0.0};
    PixelArraySpec px256{256, 8.0 / model.meter.sigma, 0.0};

    RunOutputs outputs;
    outputs.out_dir = prepare_out_dir(cfg);

    const std::vector<std::string> columns = {"theta",   "f_twobin", "f_pixels_2",
                                              "f_pixels_16", "f_pixels_256",
                                              "ratio_256"};
    std::ostringstream csv;
    for (std::size_t i = 0; i < columns.size(); ++i)
        csv << (i ? "," : "") << columns[i];
    csv << "\n";
    for (double t : grid) {
        if (std::sin(t) == 0.0 || t <= 0.0) continue;
        const auto c2 = fisher_comparison(t, model, px2);
        const auto c16 = fisher_comparison(t, model, px16);
        const auto c256 = fisher_comparison(t, model, px256);
        csv << fmt(t) << "," << fmt(c2.f_twobin) << "," << fmt(c2.f_pixels) << ","
            << fmt(c16.f_pixels) << "," << fmt(c256.f_pixels) << ","
            << fmt(c256.ratio) << "\n";
    }
    const fs::path csv_path = outputs.out_dir / "baseline.csv";
    write_text_file(csv_path, csv.str());
    outputs.csv_files.push_back(csv_path);

    // Estimator-spread comparison at the fixed working angle, equal photons.
    const double theta = cfg.sweep.theta_fixed;
    const std::uint64_t n_photons =
        cfg.source.is_rate()
            ? static_cast<std::uint64_t>(cfg.source.expected_photons(
                  cfg.window_ms, cfg.noise.detector_efficiency))
            : *cfg.source.fixed_n;
    const std::size_t trials = cfg.run.trials;
    const SearchInterval interval{cfg.run.theta_lo, cfg.run.theta_hi};

    std::vector<double> two(trials), cen(trials);
    const double p_plus = outcome_probabilities_exact(theta, model).p_plus;
    parallel_for_index(trials, cfg.run.threads, [&](std::size_t i) {
        const std::uint64_t seed = derive_seed(cfg.run.master_seed, i);
        const CountRecord rec = simulate_window_with_p(
            theta, p_plus, SourceSpec::fixed(n_photons), cfg.noise, cfg.window_ms,
            seed);
        two[i] = estimate_theta(rec, model, interval, cfg.run.mode, false).theta_hat;
        const FrameRecord frame =
            simulate_frame(theta, model, px256, n_photons, derive_seed(seed, 1));
        cen[i] = centroid_estimate(frame, model, px256, interval).theta_hat;
    });
    auto sample_std = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::sqrt(ss / static_cast<double>(v.size() - 1));
    };
    const double std_two = sample_std(two);
    const double std_cen = sample_std(cen);

    const std::vector<std::string> mc_columns = {
        "theta", "n_photons", "trials", "std_theta_twobin", "std_theta_centroid",
        "std_ratio"};
    std::ostringstream mc;
    for (std::size_t i = 0; i < mc_columns.size(); ++i)
        mc << (i ? "," : "") << mc_columns[i];
    mc << "\n"
       << fmt(theta) << "," << n_photons << "," << trials << "," << fmt(std_two)
       << "," << fmt(std_cen) << "," << fmt(std_two / std_cen) << "\n";
    const fs::path mc_path = outputs.out_dir / "mc_compare.csv";
    write_text_file(mc_path, mc.str());
    outputs.csv_files.push_back(mc_path);

    outputs.manifest = outputs.out_dir / "manifest.json";
    write_manifest(outputs.manifest, cfg, "compare-baseline", outputs.csv_files,
                   columns);
    return outputs;
}

std::string run_single_window(const ExperimentConfig& config,
                              const RunOverrides& overrides) {
    const ExperimentConfig cfg = apply_overrides(config, overrides);
    const WeakMeasurementModel model = cfg.build_model();
    const double theta = cfg.sweep.theta_fixed;
    const CountRecord rec =
        simulate_window(theta, model, cfg.source, cfg.noise, cfg.window_ms,
                        cfg.run.master_seed);
    std::ostringstream out;
    out << "theta_true = " << fmt(rec.theta_true) << "\n";
    out << "window_ms = " << fmt(rec.window_ms) << "\n";
    out << "seed = " << rec.seed << "\n";
    out << "n_plus = " << rec.n_plus << "\n";
    out << "n_minus = " << rec.n_minus << "\n";
    if (rec.has_counts()) {
        out << "contrast = " << fmt(rec.contrast()) << "\n";
        const EstimationReport rep = estimate_theta(
            rec, model, {cfg.run.theta_lo, cfg.run.theta_hi}, cfg.run.mode);
        out << "theta_hat = " << fmt(rep.theta_hat) << "\n";
        out << "theta_hat_std = " << fmt(rep.std_theta) << "\n";
        out << "saturated = " << (rep.saturated ? 1 : 0) << "\n";
    } else {
        out << "contrast = undefined\n";
    }
    return out.str();
}

}  // namespace spinpointer
