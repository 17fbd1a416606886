#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nls/evolve.hpp"

namespace nls {

// Fully validated experiment description. Parsed from a strict TOML-style
// key = value document; unknown keys are rejected with their key path.
struct RunConfig {
    int dimension = 1;
    int n = 512;
    double L = 12.0;
    int mu = -1;

    // gaussian | soliton | boosted_soliton | perturbed_soliton |
    // scaled_soliton | file:<path>
    std::string preset = "gaussian";
    double preset_amplitude = 1.0;
    double preset_width = 1.0;
    Vec3 preset_boost = kZeroVec;
    long preset_seed = 0;
    double preset_size = 0.01;
    double preset_scale = 1.2;

    EvolutionConfig evolution;
    double morawetz_radius = 0.0;          // 0 = default L/8
    std::optional<double> cutoff;          // frequency truncation, none if absent
    std::vector<double> sample_times;
    std::string output_dir = "out";

    double ground_state_tol() const { return dimension == 1 ? 1e-10 : 1e-8; }
    Grid build_grid() const { return make_grid(dimension, n, L); }
    void validate() const;
};

// Parses a config document. Each error names the offending key path.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Applies one "dotted.key=value" override on top of a parsed document.
void apply_override(RunConfig& cfg, const std::string& assignment);

}  // namespace nls
