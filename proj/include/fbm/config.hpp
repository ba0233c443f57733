#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "fbm/map.hpp"
#include "fbm/observable.hpp"

namespace fbm {

// resolved run configuration: every field has a default except the map
// parameters and the experiment name
struct RunConfig {
  MapParams map;
  std::string experiment = "classify";
  long depth = 4000;       // partition table depth
  int bins = 2048;         // Ulam bins per home interval
  int cell_cap = 400;      // return-cell truncation
  double escape_tol = 0.01;
  long samples = 200000;   // return draws for tail laws
  long replicas = 2000;    // ensemble size for distributional limits
  long horizon = 10000;    // Birkhoff horizon
  long corr_lags = 200;    // largest correlation lag
  long corr_steps = 1000000;
  double tail_a = 1.0, tail_b = 1.0;
  double t_lo = 10.0, t_hi = 1000.0;
  std::vector<long> match_thresholds{10, 30, 100};
  std::string obs_name = "vanishing_cubic";
  std::vector<PowerTerm> obs_left, obs_right;  // used when obs_name = "custom"
  double obs_nu1 = 1.0, obs_nu2 = 1.0;
  uint64_t seed = 1;
  int workers = 1;
  std::string out_dir = ".";
};

bool valid_experiment(const std::string& name);

// strict JSON: unknown keys anywhere are rejected
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// canonical serialization embedded in every report
std::string resolved_config_json(const RunConfig& c);

Observable make_observable(const RunConfig& c, const MapModel& m);

}  // namespace fbm
