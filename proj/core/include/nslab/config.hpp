#pragma once

#include <optional>
#include <string>

#include "nslab/integrator.hpp"

namespace nslab {

/// Configuration failure carrying the JSON field path ("noise.modes[2]").
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& field_path, const std::string& what)
        : std::runtime_error(field_path + ": " + what), field(field_path) {}
    std::string field;
};

/// Experiment-specific knobs; all optional in the file, defaults here.
struct ExperimentBlock {
    std::vector<double> betas{1e-4};
    std::size_t intervals = 4;
    std::size_t replicas = 50;
    int cut = 1;
    double alpha = 0.1;
    std::vector<double> eps_list{1.0, 0.1, 0.01};
    std::vector<double> horizons{1.0, 2.0, 5.0};
    std::size_t ensemble = 100;
    std::uint64_t xi_seed = 1;
    double fd_eps = 1e-3;
};

struct ExperimentConfig {
    int trunc = 8;
    IntegratorConfig integrator;
    double horizon = 1.0;
    std::vector<NoiseEntry> modes;
    ExperimentBlock experiment;
    std::string out_path;
    std::string raw_json;  ///< canonical dump for hashing

    GridPtr make_grid_ptr() const { return make_grid(trunc); }
    NoiseModel make_noise() const { return NoiseModel(modes); }
    Integrator make_integrator() const {
        return Integrator(make_grid_ptr(), integrator, make_noise());
    }
};

/// Parses and validates a JSON experiment configuration; throws ConfigError
/// with the offending field path.
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig load_config_file(const std::string& path);

/// FNV-1a hash of the canonical config dump, embedded into artifacts.
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace nslab
