#pragma once

#include <string>

#include "pyrtex/flow.hpp"
#include "pyrtex/optimize.hpp"
#include "pyrtex/pyramid.hpp"
#include "pyrtex/reward.hpp"
#include "pyrtex/upsample.hpp"

namespace pyrtex {

/// Resolved tool-wide defaults. Precedence is built-ins < config file <
/// command-line flags; the file is named by --config or the PYRTEX_CONFIG
/// environment variable. Unknown keys are rejected up front.
struct AppConfig {
    RewardWeights weights;
    PyramidConfig pyramid;
    UpsamplerKind upsampler;
    struct OptimizeKnobs {
        int steps = 300;
        double step_size = 0.05;
        double moment_decay1 = 0.9;
        double moment_decay2 = 0.999;
        int refresh_interval = 10;
    } optimize;
    PolicyConfig policy;

    /// Merge a JSON config file over the current values.
    /// Throws IoError if unreadable, ConfigError for bad content.
    void apply_file(const std::string& path);

    /// Full OptimizeConfig assembled from the resolved pieces.
    OptimizeConfig make_optimize_config(uint64_t seed = 0) const;

    /// Re-serialization of the resolved values (the --verbose echo).
    std::string to_json_string() const;

    void validate() const;
};

}  // namespace pyrtex
