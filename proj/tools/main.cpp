#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "spinpointer/runner.hpp"
#include "spinpointer/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

std::string load_config_text(const std::string& config_path,
                             const std::string& preset) {
    if (!preset.empty()) return spinpointer::preset_config_text(preset);
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw spinpointer::IoError("cannot read config file " + config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommonArgs {
    std::string config_path;
    std::string preset;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
    unsigned threads = 0;

    spinpointer::RunOverrides overrides() const {
        spinpointer::RunOverrides ov;
        if (seed_set) ov.seed = seed;
        if (!out_dir.empty()) ov.out_dir = out_dir;
        if (threads > 0) ov.threads = threads;
        return ov;
    }
};

void add_common(CLI::App* cmd, CommonArgs& args, bool allow_preset = true) {
    auto* cfg = cmd->add_option("--config", args.config_path, "Config file path");
    if (allow_preset) {
        auto* preset = cmd->add_option("--preset", args.preset,
                                       "Built-in preset (fig3, fig4, fig5, fig6)");
        preset->excludes(cfg);
        cfg->excludes(preset);
    } else {
        cfg->required();
    }
    cmd->add_option("--seed", args.seed, "Master seed override")
        ->each([&args](const std::string&) { args.seed_set = true; });
    cmd->add_option("--out", args.out_dir, "Output directory override");
    cmd->add_option("--threads", args.threads, "Worker thread count");
    if (allow_preset)
        cmd->callback([&args] {
            if (args.config_path.empty() && args.preset.empty())
                throw CLI::ValidationError("--config or --preset is required");
        });
}

void print_outputs(const spinpointer::RunOutputs& out) {
    for (const auto& p : out.csv_files) std::cout << "wrote " << p.string() << "\n";
    for (const auto& p : out.svg_files) std::cout << "wrote " << p.string() << "\n";
    std::cout << "wrote " << out.manifest.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weak-measurement split-detection simulator and estimator"};
    app.require_subcommand(1);

    CommonArgs sweep_args, fisher_args, sim_args, cmp_args;
    unsigned verify_threads = 4;

    auto* sweep_cmd = app.add_subcommand("sweep", "Run a configured parameter sweep");
    add_common(sweep_cmd, sweep_args);
    auto* fisher_cmd =
        app.add_subcommand("fisher", "Fisher information and sensitivity tables");
    add_common(fisher_cmd, fisher_args);
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate a single window");
    add_common(sim_cmd, sim_args);
    auto* cmp_cmd = app.add_subcommand("compare-baseline",
                                       "Pixel-array vs two-bin pointer comparison");
    add_common(cmp_cmd, cmp_args);
    auto* verify_cmd =
        app.add_subcommand("verify", "Run the full invariant suite and print pass/fail");
    verify_cmd->add_option("--threads", verify_threads, "Worker thread count");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep_cmd->parsed()) {
            const auto cfg = spinpointer::parse_config(
                load_config_text(sweep_args.config_path, sweep_args.preset));
            print_outputs(spinpointer::run_sweep(cfg, sweep_args.overrides()));
        } else if (fisher_cmd->parsed()) {
            const auto cfg = spinpointer::parse_config(
                load_config_text(fisher_args.config_path, fisher_args.preset));
            print_outputs(spinpointer::run_fisher_table(cfg, fisher_args.overrides()));
        } else if (sim_cmd->parsed()) {
            const auto cfg = spinpointer::parse_config(
                load_config_text(sim_args.config_path, sim_args.preset));
            std::cout << spinpointer::run_single_window(cfg, sim_args.overrides());
        } else if (cmp_cmd->parsed()) {
            const auto cfg = spinpointer::parse_config(
                load_config_text(cmp_args.config_path, cmp_args.preset));
            print_outputs(
                spinpointer::run_compare_baseline(cfg, cmp_args.overrides()));
        } else if (verify_cmd->parsed()) {
            const auto results = spinpointer::run_verification(verify_threads);
            bool all = true;
            for (const auto& r : results) {
                std::printf("[%s] %s. %s: %s\n", r.pass ? "PASS" : "FAIL",
                            r.id.c_str(), r.name.c_str(), r.detail.c_str());
                all = all && r.pass;
            }
            return all ? kExitOk : kExitRuntime;
        }
    } catch (const spinpointer::ParseError& e) {
        std::cerr << "config parse error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const spinpointer::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const spinpointer::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
