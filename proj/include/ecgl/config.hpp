#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ecgl/experiments.hpp"
#include "ecgl/integrator.hpp"

namespace ecgl {

struct GridConfig {
    int d = 3;
    int n_per_axis = 64;
    double half_length = 2.5;
};

struct OutputConfig {
    std::string directory = "out";
    int record_cadence = 10;
    int checkpoint_cadence = 0; // 0: only a final checkpoint
};

struct RunConfig {
    GridConfig grid;
    double theta = 0.7853981633974483; // pi/4
    StepperConfig stepper;
    ExperimentSpec experiment;
    OutputConfig output;
};

/// Thrown by parse_config; carries every violation found, not just the first.
struct ConfigError : std::runtime_error {
    std::vector<std::string> violations;
    explicit ConfigError(std::vector<std::string> v);
};

/// Parse and validate a JSON config file.  Strict: unknown keys are errors.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& json_text);

/// Effective config back to JSON text (round-trips through parse_config_text).
std::string emit_config(const RunConfig& cfg);

} // namespace ecgl
