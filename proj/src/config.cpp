#include "fbm/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fbm {
namespace {

using nlohmann::json;

void require_keys(const json& j, const std::set<std::string>& allowed, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw DomainError(std::string("unknown config key '") + it.key() + "' in " + where);
}

double num(const json& j, const char* key) {
  if (!j.contains(key)) throw DomainError(std::string("missing config key '") + key + "'");
  if (!j[key].is_number()) throw DomainError(std::string("config key '") + key + "' must be a number");
  return j[key].get<double>();
}

std::vector<PowerTerm> terms(const json& j, const char* key) {
  std::vector<PowerTerm> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) throw DomainError(std::string("'") + key + "' must be a list of [coeff, power] pairs");
  for (const auto& e : j[key]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw DomainError(std::string("'") + key + "' must be a list of [coeff, power] pairs");
    out.push_back({e[0].get<double>(), e[1].get<double>()});
  }
  return out;
}

}  // namespace

bool valid_experiment(const std::string& name) {
  static const std::set<std::string> known{"classify", "partition", "induce",  "density",
                                           "mass",     "tails",     "tail_match",   "corr",
                                           "lyapunov", "limit",     "report"};
  return known.count(name) > 0;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DomainError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DomainError("config root must be an object");
  require_keys(j, {"map", "experiment", "depth", "bins", "cell_cap", "escape_tol", "samples",
                   "replicas", "horizon", "corr_lags", "corr_steps", "tail", "match_thresholds",
                   "observable", "seed", "workers", "out_dir"},
               "the top level");
  if (!j.contains("map") || !j["map"].is_object())
    throw DomainError("config needs a 'map' object");

  RunConfig c;
  const json& mj = j["map"];
  require_keys(mj, {"ell1", "ell2", "k1", "k2", "a1", "a2", "b1", "b2", "iota", "blend_width",
                    "xi1", "xi2"},
               "'map'");
  c.map.ell1 = num(mj, "ell1");
  c.map.ell2 = num(mj, "ell2");
  c.map.k1 = num(mj, "k1");
  c.map.k2 = num(mj, "k2");
  c.map.a1 = num(mj, "a1");
  c.map.a2 = num(mj, "a2");
  c.map.b1 = num(mj, "b1");
  c.map.b2 = num(mj, "b2");
  if (mj.contains("iota")) c.map.iota = num(mj, "iota");
  if (mj.contains("blend_width")) c.map.blend_width = num(mj, "blend_width");
  if (mj.contains("xi1")) c.map.xi_coeff1 = num(mj, "xi1");
  if (mj.contains("xi2")) c.map.xi_coeff2 = num(mj, "xi2");

  if (j.contains("experiment")) {
    if (!j["experiment"].is_string()) throw DomainError("'experiment' must be a string");
    c.experiment = j["experiment"].get<std::string>();
  }
  if (!valid_experiment(c.experiment))
    throw DomainError("unknown experiment '" + c.experiment + "'");

  auto geti = [&](const char* key, long& slot) {
    if (j.contains(key)) {
      if (!j[key].is_number_integer()) throw DomainError(std::string("'") + key + "' must be an integer");
      slot = j[key].get<long>();
      if (slot <= 0) throw DomainError(std::string("'") + key + "' must be positive");
    }
  };
  geti("depth", c.depth);
  long bins = c.bins, cap = c.cell_cap, workers = c.workers;
  geti("bins", bins);
  geti("cell_cap", cap);
  geti("samples", c.samples);
  geti("replicas", c.replicas);
  geti("horizon", c.horizon);
  geti("corr_lags", c.corr_lags);
  geti("corr_steps", c.corr_steps);
  geti("workers", workers);
  c.bins = static_cast<int>(bins);
  c.cell_cap = static_cast<int>(cap);
  c.workers = static_cast<int>(workers);
  if (j.contains("escape_tol")) {
    c.escape_tol = num(j, "escape_tol");
    if (!(c.escape_tol > 0) || !(c.escape_tol < 1))
      throw DomainError("'escape_tol' must lie in (0,1)");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0)
      throw DomainError("'seed' must be a nonnegative integer");
    c.seed = j["seed"].get<uint64_t>();
  }
  if (j.contains("out_dir")) {
    if (!j["out_dir"].is_string()) throw DomainError("'out_dir' must be a string");
    c.out_dir = j["out_dir"].get<std::string>();
  }
  if (j.contains("tail")) {
    const json& tj = j["tail"];
    require_keys(tj, {"a", "b", "t_lo", "t_hi"}, "'tail'");
    if (tj.contains("a")) c.tail_a = num(tj, "a");
    if (tj.contains("b")) c.tail_b = num(tj, "b");
    if (tj.contains("t_lo")) c.t_lo = num(tj, "t_lo");
    if (tj.contains("t_hi")) c.t_hi = num(tj, "t_hi");
    if (!(c.t_hi > c.t_lo) || !(c.t_lo > 0)) throw DomainError("tail thresholds must be increasing and positive");
  }
  if (j.contains("match_thresholds")) {
    if (!j["match_thresholds"].is_array()) throw DomainError("'match_thresholds' must be a list");
    c.match_thresholds.clear();
    for (const auto& e : j["match_thresholds"]) {
      if (!e.is_number_integer() || e.get<long>() <= 0)
        throw DomainError("'match_thresholds' must hold positive integers");
      c.match_thresholds.push_back(e.get<long>());
    }
    if (c.match_thresholds.empty()) throw DomainError("'match_thresholds' must not be empty");
  }
  if (j.contains("observable")) {
    const json& oj = j["observable"];
    if (oj.is_string()) {
      c.obs_name = oj.get<std::string>();
    } else if (oj.is_object()) {
      require_keys(oj, {"name", "left", "right", "nu1", "nu2"}, "'observable'");
      if (!oj.contains("name") || !oj["name"].is_string())
        throw DomainError("'observable' needs a 'name' string");
      c.obs_name = oj["name"].get<std::string>();
      c.obs_left = terms(oj, "left");
      c.obs_right = terms(oj, "right");
      if (oj.contains("nu1")) c.obs_nu1 = num(oj, "nu1");
      if (oj.contains("nu2")) c.obs_nu2 = num(oj, "nu2");
    } else {
      throw DomainError("'observable' must be a name or an object");
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  if (path.size() > 5 && path.substr(path.size() - 5) == ".toml")
    throw DomainError("TOML configs are not supported; use JSON");
  std::ifstream in(path);
  if (!in) throw DomainError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string resolved_config_json(const RunConfig& c) {
  json j;
  j["map"] = {{"ell1", c.map.ell1},
              {"ell2", c.map.ell2},
              {"k1", c.map.k1},
              {"k2", c.map.k2},
              {"a1", c.map.a1},
              {"a2", c.map.a2},
              {"b1", c.map.b1},
              {"b2", c.map.b2},
              {"iota", c.map.iota},
              {"blend_width", c.map.blend_width},
              {"xi1", c.map.xi_coeff1},
              {"xi2", c.map.xi_coeff2}};
  j["experiment"] = c.experiment;
  j["depth"] = c.depth;
  j["bins"] = c.bins;
  j["cell_cap"] = c.cell_cap;
  j["escape_tol"] = c.escape_tol;
  j["samples"] = c.samples;
  j["replicas"] = c.replicas;
  j["horizon"] = c.horizon;
  j["corr_lags"] = c.corr_lags;
  j["corr_steps"] = c.corr_steps;
  j["tail"] = {{"a", c.tail_a}, {"b", c.tail_b}, {"t_lo", c.t_lo}, {"t_hi", c.t_hi}};
  j["match_thresholds"] = c.match_thresholds;
  json oj;
  oj["name"] = c.obs_name;
  if (c.obs_name == "custom") {
    json l = json::array(), r = json::array();
    for (const auto& t : c.obs_left) l.push_back({t.coeff, t.power});
    for (const auto& t : c.obs_right) r.push_back({t.coeff, t.power});
    oj["left"] = l;
    oj["right"] = r;
    oj["nu1"] = c.obs_nu1;
    oj["nu2"] = c.obs_nu2;
  }
  j["observable"] = oj;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  // out_dir stays out: the embedded config records what shaped the results,
  // and two runs differing only in destination must emit identical bytes
  return j.dump(2);
}

Observable make_observable(const RunConfig& c, const MapModel& m) {
  if (c.obs_name == "vanishing_cubic") return vanishing_cubic();
  if (c.obs_name == "affine_tilt") return affine_tilt();
  if (c.obs_name == "left_step") return left_step();
  if (c.obs_name == "coboundary") return coboundary(m);
  if (c.obs_name == "custom")
    return Observable("custom", c.obs_left, c.obs_right, c.obs_nu1, c.obs_nu2);
  throw DomainError("unknown observable '" + c.obs_name + "'");
}

}  // namespace fbm
