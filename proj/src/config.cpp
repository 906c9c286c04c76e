#include "spinpointer/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace spinpointer {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

struct RawEntry {
    std::string value;
    int line = 0;
    bool used = false;
};

using Section = std::map<std::string, RawEntry>;

std::map<std::string, Section> tokenize(const std::string& text) {
    static const std::vector<std::string> known_sections = {
        "setup", "model", "sweep", "source", "noise", "run"};

    std::map<std::string, Section> doc;
    std::istringstream in(text);
    std::string line;
    std::string current;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("line " + std::to_string(line_no) +
                                 ": unterminated section header");
            current = trim(line.substr(1, line.size() - 2));
            if (std::find(known_sections.begin(), known_sections.end(), current) ==
                known_sections.end())
                throw ParseError("line " + std::to_string(line_no) +
                                 ": unknown section [" + current + "]");
            doc[current];
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected key = value");
        if (current.empty())
            throw ParseError("line " + std::to_string(line_no) +
                             ": key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseError("line " + std::to_string(line_no) + ": empty key");
        auto& section = doc[current];
        if (section.count(key))
            throw ParseError("line " + std::to_string(line_no) + ": duplicate key '" +
                             key + "'");
        section[key] = {value, line_no, false};
    }
    return doc;
}

double parse_double(const std::string& raw, const std::string& key, int line) {
    const std::string s = trim(raw);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || s.empty() || !std::isfinite(v))
        throw ParseError("line " + std::to_string(line) + ": key '" + key +
                         "' is not a finite number");
    return v;
}

// Angle values accept an explicit "deg" suffix; plain numbers are radians.
double parse_angle(const std::string& raw, const std::string& key, int line) {
    std::string s = trim(raw);
    double scale = 1.0;
    if (s.size() >= 3 && s.compare(s.size() - 3, 3, "deg") == 0) {
        scale = kDegToRad;
        s = trim(s.substr(0, s.size() - 3));
    }
    return scale * parse_double(s, key, line);
}

std::uint64_t parse_u64(const std::string& raw, const std::string& key, int line) {
    const std::string s = trim(raw);
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError("line " + std::to_string(line) + ": key '" + key +
                         "' is not an unsigned integer");
    return v;
}

// Grid syntax: either "a,b,c" or a linspace "lo:hi:count", with an optional
// trailing "deg" applying to every entry.
std::vector<double> parse_grid(const std::string& raw, const std::string& key,
                               int line, bool angle) {
    std::string s = trim(raw);
    double scale = 1.0;
    if (angle && s.size() >= 3 && s.compare(s.size() - 3, 3, "deg") == 0) {
        scale = kDegToRad;
        s = trim(s.substr(0, s.size() - 3));
    }

    std::vector<double> grid;
    if (s.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::istringstream ss(s);
        std::string part;
        while (std::getline(ss, part, ':')) parts.push_back(part);
        if (parts.size() != 3)
            throw ParseError("line " + std::to_string(line) + ": key '" + key +
                             "' linspace grid must be lo:hi:count");
        const double lo = parse_double(parts[0], key, line);
        const double hi = parse_double(parts[1], key, line);
        const std::uint64_t count = parse_u64(parts[2], key, line);
        if (count < 1)
            throw ParseError("line " + std::to_string(line) + ": key '" + key +
                             "' grid count must be >= 1");
        for (std::uint64_t i = 0; i < count; ++i)
            grid.push_back(count == 1 ? lo
                                      : lo + (hi - lo) * static_cast<double>(i) /
                                                 static_cast<double>(count - 1));
    } else {
        std::istringstream ss(s);
        std::string part;
        while (std::getline(ss, part, ','))
            grid.push_back(parse_double(part, key, line));
    }
    if (grid.empty())
        throw ParseError("line " + std::to_string(line) + ": key '" + key +
                         "' grid is empty");
    for (auto& g : grid) g *= scale;
    return grid;
}

RawEntry* find(std::map<std::string, Section>& doc, const std::string& section,
               const std::string& key) {
    auto sec = doc.find(section);
    if (sec == doc.end()) return nullptr;
    auto it = sec->second.find(key);
    if (it == sec->second.end()) return nullptr;
    it->second.used = true;
    return &it->second;
}

void reject_unused(const std::map<std::string, Section>& doc) {
    for (const auto& [section, entries] : doc)
        for (const auto& [key, entry] : entries)
            if (!entry.used)
                throw ParseError("line " + std::to_string(entry.line) +
                                 ": unknown key '" + key + "' in [" + section + "]");
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

WeakMeasurementModel ExperimentConfig::build_model() const {
    if (setup) return to_model(*setup);
    WeakMeasurementModel m;
    auto [pre, post] = postselect_angle_states(M_PI / 4.0);
    m.pre = pre;
    m.post = post;
    m.g = model->g;
    m.meter.sigma = model->sigma;
    return m;
}

SweepRequest ExperimentConfig::build_sweep_request() const {
    SweepRequest req;
    req.parameter = sweep.kind;
    req.grid = sweep.grid;
    req.theta_fixed = sweep.theta_fixed;
    req.source = source;
    req.noise = noise;
    req.window_ms = window_ms;
    req.n_trials = run.trials;
    req.master_seed = run.master_seed;
    req.threads = run.threads;
    req.interval = {run.theta_lo, run.theta_hi};
    req.mode = run.mode;
    return req;
}

ExperimentConfig parse_config(const std::string& text) {
    auto doc = tokenize(text);

    ExperimentConfig cfg;
    const bool has_setup = doc.count("setup") > 0;
    const bool has_model = doc.count("model") > 0;
    if (has_setup && has_model)
        throw ValidationError("[setup] and [model] are mutually exclusive");
    if (!has_setup && !has_model)
        throw ValidationError("config must contain [setup] or [model]");

    if (has_setup) {
        OpticalSetup setup;
        if (auto* e = find(doc, "setup", "wavelength"))
            setup.wavelength_nm = parse_double(e->value, "wavelength", e->line);
        if (auto* e = find(doc, "setup", "theta_i"))
            setup.theta_i = parse_angle(e->value, "theta_i", e->line);
        if (auto* e = find(doc, "setup", "n"))
            setup.n = parse_double(e->value, "n", e->line);
        if (auto* e = find(doc, "setup", "sigma"))
            setup.sigma_um = parse_double(e->value, "sigma", e->line);
        setup.validate();
        cfg.setup = setup;
    } else {
        DirectModel dm;
        if (auto* e = find(doc, "model", "g"))
            dm.g = parse_double(e->value, "g", e->line);
        if (auto* e = find(doc, "model", "sigma"))
            dm.sigma = parse_double(e->value, "sigma", e->line);
        if (!(dm.sigma > 0.0)) throw ValidationError("model sigma must be > 0");
        if (!std::isfinite(dm.g)) throw ValidationError("model g must be finite");
        cfg.model = dm;
    }

    bool kind_is_theta = true;
    if (auto* e = find(doc, "sweep", "kind")) {
        const std::string kind = trim(e->value);
        if (kind == "theta")
            cfg.sweep.kind = SweepParameter::theta;
        else if (kind == "n_photons")
            cfg.sweep.kind = SweepParameter::n_photons;
        else if (kind == "window")
            cfg.sweep.kind = SweepParameter::window;
        else
            throw ValidationError("sweep kind must be theta, n_photons or window");
        kind_is_theta = cfg.sweep.kind == SweepParameter::theta;
    }
    if (auto* e = find(doc, "sweep", "grid"))
        cfg.sweep.grid = parse_grid(e->value, "grid", e->line, kind_is_theta);
    else
        cfg.sweep.grid = parse_grid("-0.1:0.1:41", "grid", 0, true);
    if (auto* e = find(doc, "sweep", "theta"))
        cfg.sweep.theta_fixed = parse_angle(e->value, "theta", e->line);

    bool have_rate = false, have_fixed = false;
    double rate_value = 50000.0;
    std::uint64_t fixed_value = 0;
    if (auto* e = find(doc, "source", "post_rate")) {
        rate_value = parse_double(e->value, "post_rate", e->line);
        have_rate = true;
    }
    if (auto* e = find(doc, "source", "fixed_n")) {
        fixed_value = parse_u64(e->value, "fixed_n", e->line);
        have_fixed = true;
    }
    if (have_rate && have_fixed)
        throw ValidationError("post_rate and fixed_n are mutually exclusive");
    cfg.source = have_fixed ? SourceSpec::fixed(fixed_value)
                            : SourceSpec::rate(rate_value);
    if (auto* e = find(doc, "source", "window")) {
        cfg.window_ms = parse_double(e->value, "window", e->line);
        if (!(cfg.window_ms > 0.0)) throw ValidationError("window must be > 0");
    }

    if (auto* e = find(doc, "noise", "background_rate")) {
        cfg.noise.background_rate = parse_double(e->value, "background_rate", e->line);
        if (cfg.noise.background_rate < 0.0)
            throw ValidationError("background_rate must be >= 0");
    }
    if (auto* e = find(doc, "noise", "power_rel_sigma")) {
        cfg.noise.power_rel_sigma = parse_double(e->value, "power_rel_sigma", e->line);
        if (cfg.noise.power_rel_sigma < 0.0)
            throw ValidationError("power_rel_sigma must be >= 0");
    }
    if (auto* e = find(doc, "noise", "detector_efficiency")) {
        cfg.noise.detector_efficiency =
            parse_double(e->value, "detector_efficiency", e->line);
        if (cfg.noise.detector_efficiency < 0.0 || cfg.noise.detector_efficiency > 1.0)
            throw ValidationError("detector_efficiency must lie in [0, 1]");
    }

    if (auto* e = find(doc, "run", "trials")) {
        cfg.run.trials = parse_u64(e->value, "trials", e->line);
        if (cfg.run.trials < 1) throw ValidationError("trials must be >= 1");
    }
    if (auto* e = find(doc, "run", "master_seed"))
        cfg.run.master_seed = parse_u64(e->value, "master_seed", e->line);
    if (auto* e = find(doc, "run", "output")) cfg.run.output = trim(e->value);
    if (auto* e = find(doc, "run", "theta_lo"))
        cfg.run.theta_lo = parse_angle(e->value, "theta_lo", e->line);
    if (auto* e = find(doc, "run", "theta_hi"))
        cfg.run.theta_hi = parse_angle(e->value, "theta_hi", e->line);
    if (auto* e = find(doc, "run", "mode")) {
        const std::string mode = trim(e->value);
        if (mode == "exact")
            cfg.run.mode = EvalMode::exact;
        else if (mode == "firstorder")
            cfg.run.mode = EvalMode::firstorder;
        else
            throw ValidationError("mode must be exact or firstorder");
    }
    if (auto* e = find(doc, "run", "threads")) {
        cfg.run.threads = static_cast<unsigned>(parse_u64(e->value, "threads", e->line));
        if (cfg.run.threads < 1) throw ValidationError("threads must be >= 1");
    }

    if (!(cfg.run.theta_lo < cfg.run.theta_hi))
        throw ValidationError("theta_lo must be < theta_hi");
    for (double g : cfg.sweep.grid)
        if (!std::isfinite(g)) throw ValidationError("grid entries must be finite");
    if (cfg.sweep.kind == SweepParameter::n_photons)
        for (double g : cfg.sweep.grid)
            if (!(g >= 1.0) || g != std::floor(g))
                throw ValidationError("n_photons grid entries must be positive integers");
    if (cfg.sweep.kind == SweepParameter::window) {
        if (!cfg.source.is_rate())
            throw ValidationError("window sweeps require a rate-mode source");
        for (double g : cfg.sweep.grid)
            if (!(g > 0.0)) throw ValidationError("window grid entries must be > 0");
    }

    reject_unused(doc);
    return cfg;
}

std::string format_config(const ExperimentConfig& config) {
    std::ostringstream out;
    if (config.setup) {
        out << "[setup]\n";
        out << "wavelength = " << format_double(config.setup->wavelength_nm) << "\n";
        out << "theta_i = " << format_double(config.setup->theta_i) << "\n";
        out << "n = " << format_double(config.setup->n) << "\n";
        out << "sigma = " << format_double(config.setup->sigma_um) << "\n";
    } else {
        out << "[model]\n";
        out << "g = " << format_double(config.model->g) << "\n";
        out << "sigma = " << format_double(config.model->sigma) << "\n";
    }
    out << "\n[sweep]\n";
    out << "kind = "
        << (config.sweep.kind == SweepParameter::theta ? "theta"
            : config.sweep.kind == SweepParameter::n_photons ? "n_photons"
                                                             : "window")
        << "\n";
    out << "grid = ";
    for (std::size_t i = 0; i < config.sweep.grid.size(); ++i)
        out << (i ? "," : "") << format_double(config.sweep.grid[i]);
    out << "\n";
    out << "theta = " << format_double(config.sweep.theta_fixed) << "\n";
    out << "\n[source]\n";
    if (config.source.is_rate())
        out << "post_rate = " << format_double(*config.source.rate_counts_per_s) << "\n";
    else
        out << "fixed_n = " << *config.source.fixed_n << "\n";
    out << "window = " << format_double(config.window_ms) << "\n";
    out << "\n[noise]\n";
    out << "background_rate = " << format_double(config.noise.background_rate) << "\n";
    out << "power_rel_sigma = " << format_double(config.noise.power_rel_sigma) << "\n";
    out << "detector_efficiency = " << format_double(config.noise.detector_efficiency)
        << "\n";
    out << "\n[run]\n";
    out << "trials = " << config.run.trials << "\n";
    out << "master_seed = " << config.run.master_seed << "\n";
    out << "output = " << config.run.output << "\n";
    out << "theta_lo = " << format_double(config.run.theta_lo) << "\n";
    out << "theta_hi = " << format_double(config.run.theta_hi) << "\n";
    out << "mode = " << (config.run.mode == EvalMode::exact ? "exact" : "firstorder")
        << "\n";
    out << "threads = " << config.run.threads << "\n";
    return out.str();
}

}  // namespace spinpointer
