#pragma once

#include <string>

#include "json.hpp"

#include "dualmix/constraints.hpp"
#include "dualmix/divergence.hpp"
#include "dualmix/estimator.hpp"
#include "dualmix/families.hpp"
#include "dualmix/montecarlo.hpp"

namespace dualmix {

// JSON wire format for configs, results, and manifests. Parsing throws
// std::invalid_argument with a field-level message on anything malformed;
// loading throws IoError when the file cannot be read.

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const nlohmann::json& j, const std::string& path);

Family family_from_json(const nlohmann::json& j);
nlohmann::json family_to_json(const Family& fam);

ConstraintSet constraints_from_json(const nlohmann::json& j);
nlohmann::json constraints_to_json(const ConstraintSet& cs);

// Everything cmd_estimate needs besides the data: the parametric model,
// constraints, divergence, and optimizer options.
struct EstimateSetup {
  Family fam;
  ConstraintSet cs;
  Divergence div;
  EstimateOptions est;
};

EstimateSetup estimate_setup_from_json(const nlohmann::json& j);
nlohmann::json estimate_setup_to_json(const EstimateSetup& setup);

ExperimentConfig experiment_from_json(const nlohmann::json& j);
nlohmann::json experiment_to_json(const ExperimentConfig& config);

ScanConfig scan_from_json(const nlohmann::json& j);
nlohmann::json scan_to_json(const ScanConfig& config);

// "experiment" or "scan"; defaults to "experiment" when absent.
std::string config_mode(const nlohmann::json& j);

// Human-readable labels (lambda, theta..., alpha...) used in report tables.
std::vector<std::string> default_param_names(const Family& fam, const ConstraintSet& cs);

}  // namespace dualmix
