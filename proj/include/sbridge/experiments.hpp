#pragma once

#include <string>
#include <vector>

#include "sbridge/config.hpp"

namespace sbridge {

struct ExperimentInfo {
    std::string name;
    std::string title;      // one line, what is being measured
    std::string claim;      // the limit/rate statement the numbers probe
    std::string pass_rule;  // how PASS/FAIL is decided
    std::vector<std::string> keys;  // accepted config keys beyond the common set
    std::string csv_columns;
};

// Stable ordering; names are the values accepted for the "experiment" key.
const std::vector<ExperimentInfo>& experiment_catalog();

const ExperimentInfo* find_experiment(const std::string& name);

struct ExperimentResult {
    bool passed = false;
    std::string csv;      // full file contents, deterministic for (config, seed)
    std::string summary;  // short human-readable outcome for stdout
};

// Runs one experiment from a validated config.  Unknown keys and malformed
// values throw config_error; numerical failures propagate as the library's
// runtime exceptions.
ExperimentResult run_experiment(const Config& config);

// Common keys every experiment accepts.
const std::vector<std::string>& common_config_keys();

// Throws config_error when the config names no experiment, an unknown
// experiment, or carries keys the experiment does not accept.
void validate_config(const Config& config);

}  // namespace sbridge
