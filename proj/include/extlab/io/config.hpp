#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include "extlab/core/domain.hpp"
#include "extlab/errors.hpp"
#include "extlab/evolution/relative.hpp"
#include "extlab/io/csv.hpp"
#include "extlab/pipeline/experiment.hpp"

namespace extlab {

// Flat key=value configuration with dotted section prefixes, one pair per
// line; '#' starts a comment, blank lines are skipped.  Keys are consumed by
// the typed reader below and anything left over is rejected, so a typo fails
// loudly instead of silently running defaults.
struct ConfigMap {
    std::map<std::string, std::string> kv;
    mutable std::set<std::string> consumed;

    bool has(const std::string& key) const { return kv.count(key) != 0; }

    std::string str(const std::string& key, const std::string& fallback) const {
        consumed.insert(key);
        auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    }
    double real(const std::string& key, double fallback) const {
        consumed.insert(key);
        auto it = kv.find(key);
        return it == kv.end() ? fallback : parse_real(it->second);
    }
    int integer(const std::string& key, int fallback) const {
        consumed.insert(key);
        auto it = kv.find(key);
        return it == kv.end() ? fallback : static_cast<int>(parse_integer(it->second));
    }

    void reject_unknown() const {
        for (const auto& [key, value] : kv)
            if (!consumed.count(key))
                throw SchemaMismatch("unknown config key: " + key);
    }
};

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

inline ConfigMap parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw SchemaMismatch("cannot open config: " + path.string());
    ConfigMap cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw SchemaMismatch("config line " + std::to_string(lineno) +
                                 " is not key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw SchemaMismatch("config line " + std::to_string(lineno) +
                                 " has an empty key");
        if (cfg.kv.count(key))
            throw SchemaMismatch("duplicate config key: " + key);
        cfg.kv[key] = value;
    }
    return cfg;
}

// Everything a lab run can be told from a config file.  Subcommands use the
// slices they need; unused sections still parse so one file can drive a whole
// pipeline of stages.
struct LabConfig {
    std::string job_id = "job";
    std::filesystem::path output_dir = ".";
    DomainSpec domain = Interval{0.0, 1.0};
    double m = 0.5;
    int resolution = 200;
    double profile_tol = 1e-9;
    int num_modes = 8;
    double zero_tol = 0.0; // 0 picks the solver default
    EvolutionConfig evolution{1e-3, 12.0, 10, 1e-14};
    int seed_mode = -1; // -1 picks the first strictly stable mode
    double seed_amplitude = 1e-3;
    std::string seed_file;
    std::pair<double, double> mz_window{0.125, 0.25};
    double mz_eps = 0.0; // 0 measures eps from the run
    DecayThresholds decay{0.05, 1e-14, 0.0};
    double dtau = 1e-4; // original-variable stepping
    double tau_end = 0.0;
    double extinction_time = 1.0;
};

inline DomainSpec read_domain(const ConfigMap& cfg) {
    const std::string kind = cfg.str("domain.kind", "interval");
    if (kind == "interval")
        return Interval{cfg.real("domain.a", 0.0), cfg.real("domain.b", 1.0)};
    if (kind == "ball")
        return RadialBall{cfg.real("domain.radius", 1.0), cfg.integer("domain.dim", 2)};
    if (kind == "rectangle")
        return Rectangle{cfg.real("domain.lx", 1.0), cfg.real("domain.ly", 1.0)};
    if (kind == "annulus")
        return Annulus{cfg.real("domain.r0", 1.0), cfg.real("domain.r1", 1.05)};
    throw SchemaMismatch("unknown domain.kind: " + kind);
}

inline LabConfig read_lab_config(const std::filesystem::path& path) {
    const ConfigMap cfg = parse_config_file(path);
    LabConfig lab;
    lab.job_id = cfg.str("job.id", lab.job_id);
    lab.output_dir = cfg.str("job.output_dir", lab.output_dir.string());
    lab.domain = read_domain(cfg);
    lab.m = cfg.real("medium.m", lab.m);
    lab.resolution = cfg.integer("mesh.resolution", lab.resolution);
    lab.profile_tol = cfg.real("stationary.tol", lab.profile_tol);
    lab.num_modes = cfg.integer("spectrum.k", lab.num_modes);
    lab.zero_tol = cfg.real("spectrum.zero_tol", lab.zero_tol);
    lab.evolution.dt = cfg.real("evolve.dt", lab.evolution.dt);
    lab.evolution.t_end = cfg.real("evolve.t_end", lab.evolution.t_end);
    lab.evolution.snapshot_stride = cfg.integer("evolve.stride", lab.evolution.snapshot_stride);
    lab.evolution.positivity_floor = cfg.real("evolve.floor", lab.evolution.positivity_floor);
    lab.seed_mode = cfg.integer("seed.mode", lab.seed_mode);
    lab.seed_amplitude = cfg.real("seed.amplitude", lab.seed_amplitude);
    lab.seed_file = cfg.str("seed.file", lab.seed_file);
    lab.mz_window.first = cfg.real("mz.window_lo", lab.mz_window.first);
    lab.mz_window.second = cfg.real("mz.window_hi", lab.mz_window.second);
    lab.mz_eps = cfg.real("mz.eps", lab.mz_eps);
    lab.decay.drift_fraction = cfg.real("rates.drift_fraction", lab.decay.drift_fraction);
    lab.decay.floor = cfg.real("rates.floor", lab.decay.floor);
    lab.decay.t_value_min = cfg.real("rates.t_value_min", lab.decay.t_value_min);
    lab.dtau = cfg.real("original.dtau", lab.dtau);
    lab.tau_end = cfg.real("original.tau_end", lab.tau_end);
    lab.extinction_time = cfg.real("original.extinction_time", lab.extinction_time);
    cfg.reject_unknown();
    return lab;
}

inline DichotomyConfig to_dichotomy_config(const LabConfig& lab) {
    DichotomyConfig cfg;
    cfg.domain = lab.domain;
    cfg.m = lab.m;
    cfg.resolution = lab.resolution;
    cfg.num_modes = lab.num_modes;
    cfg.profile_tol = lab.profile_tol;
    cfg.zero_tol = lab.zero_tol;
    cfg.seed_mode = lab.seed_mode;
    cfg.seed_amplitude = lab.seed_amplitude;
    cfg.evolution = lab.evolution;
    cfg.mz_window = lab.mz_window;
    cfg.eps_override = lab.mz_eps;
    cfg.decay = lab.decay;
    return cfg;
}

} // namespace extlab
