#pragma once
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fbm/config.hpp"

namespace fbm {

// one experiment run: a json document plus CSV tables keyed by file stem
struct ExperimentOutput {
  nlohmann::json doc;
  std::vector<std::pair<std::string, std::string>> tables;
};

// dispatch on c.experiment; "report" chains the whole battery and marks
// sections the regime rules out as skipped instead of failing the run
ExperimentOutput run_experiment(const RunConfig& c);

// writes report.json and the CSV tables under c.out_dir; returns the paths
std::vector<std::string> write_outputs(const RunConfig& c, const ExperimentOutput& out);

}  // namespace fbm
