#include "fbm/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fbm/measure.hpp"
#include "fbm/statistics.hpp"

namespace fbm {
namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* series_name(SeriesKind s) {
  switch (s) {
    case SeriesKind::XMinusDist: return "x_minus_dist";
    case SeriesKind::XPlusDist: return "x_plus_dist";
    case SeriesKind::YMinusAbs: return "y_minus_abs";
    case SeriesKind::YPlusAbs: return "y_plus_abs";
    case SeriesKind::DeltaMinus: return "interval_minus";
    case SeriesKind::DeltaPlus: return "interval_plus";
    case SeriesKind::SmallDeltaMinus: return "cell_minus";
    case SeriesKind::SmallDeltaPlus: return "cell_plus";
  }
  return "unknown";
}

json regime_json(const RegimeReport& r) {
  return {{"beta1", r.beta1},     {"beta2", r.beta2},   {"beta", r.beta},
          {"finite_acip", r.finite_acip}, {"mixing", r.mixing}, {"poly_rate", r.poly_rate}};
}

json fit_json(const FitReport& f) {
  return {{"series", series_name(f.series)},
          {"power_law", f.power_law},
          {"n_lo", f.n_lo},
          {"n_hi", f.n_hi},
          {"exponent_fit", f.exponent_fit},
          {"constant_fit", f.constant_fit},
          {"r_squared", f.r_squared},
          {"exponent_theory", f.exponent_theory},
          {"constant_theory", f.constant_theory},
          {"rate_fit", f.rate_fit},
          {"rate_theory", f.rate_theory},
          {"bracket_hi", f.bracket_hi}};
}

json ulam_json(const UlamResult& u) {
  return {{"side", to_string(u.side)},
          {"bins", u.bins},
          {"cell_cap", u.cell_cap},
          {"lo", u.lo},
          {"hi", u.hi},
          {"escape", u.escape},
          {"residual", u.residual},
          {"iters", u.iters},
          {"density_at_zero", u.density_at_zero}};
}

json tail_json(const TailReport& r) {
  json pts = json::array();
  for (const auto& p : r.points) pts.push_back({{"t", p.t}, {"ccdf", p.ccdf}, {"se", p.se}});
  return {{"samples", r.samples},
          {"exponent_fit", r.exponent_fit},
          {"prefactor_fit", r.prefactor_fit},
          {"r_squared", r.r_squared},
          {"exponent_theory", r.exponent_theory},
          {"prefactor_theory", r.prefactor_theory},
          {"points", pts}};
}

json distortion_json(const DistortionEstimate& d) {
  return {{"depth", d.depth}, {"pairs", d.pairs}, {"d_hat", d.d_hat}};
}

std::string tail_csv(const TailReport& r) {
  std::string csv = "t,ccdf,se\n";
  for (const auto& p : r.points)
    csv += fmt(p.t) + "," + fmt(p.ccdf) + "," + fmt(p.se) + "\n";
  return csv;
}

// table rows: dense through n = 100, log-thinned beyond
std::vector<int> thin_indices(int n_max) {
  std::vector<int> out;
  for (int n = 1; n <= std::min(n_max, 100); ++n) out.push_back(n);
  if (n_max > 100) {
    double lo = std::log(100.0), hi = std::log(static_cast<double>(n_max));
    for (int i = 1; i <= 200; ++i) {
      int n = static_cast<int>(std::lround(std::exp(lo + (hi - lo) * i / 200.0)));
      if (n > out.back() && n <= n_max) out.push_back(n);
    }
    if (out.back() != n_max) out.push_back(n_max);
  }
  return out;
}

struct Session {
  explicit Session(const RunConfig& c)
      : model(c.map), table(compute_boundaries(model, static_cast<int>(c.depth))) {}
  MapModel model;
  PartitionTable table;
};

UlamOptions ulam_options(const RunConfig& c) {
  UlamOptions o;
  o.bins = c.bins;
  o.cell_cap = c.cell_cap;
  o.escape_tol = c.escape_tol;
  return o;
}

json run_classify(const RunConfig& c, const Session& s) {
  const MapModel& m = s.model;
  Observable obs = make_observable(c, m);
  HolderCheck hc = holder_conditions(obs, m.params(), m.regime());
  json out;
  out["regime"] = regime_json(m.regime());
  out["geometry"] = {{"iota", m.iota()},
                     {"iota_reduced", m.iotaReduced()},
                     {"u_minus_end", m.uMinusEnd()},
                     {"u_plus_start", m.uPlusStart()},
                     {"zero_cross_left", m.zeroCross(Side::Left)},
                     {"zero_cross_right", m.zeroCross(Side::Right)},
                     {"blend_left", {m.blendLo(Side::Left), m.blendHi(Side::Left)}},
                     {"blend_right", {m.blendLo(Side::Right), m.blendHi(Side::Right)}}};
  out["expansion_certificate"] = {
      {"lambda", m.lambda()}, {"n_minus", m.nMinusCert()}, {"n_plus", m.nPlusCert()}};
  out["observable"] = {{"name", obs.name()},
                       {"at_minus1", obs.atMinus1()},
                       {"at_plus1", obs.atPlus1()},
                       {"beta_phi", hc.beta_phi},
                       {"holder_basic", hc.basic},
                       {"holder_refined", hc.refined}};
  out["partition"] = {{"n_minus", s.table.n_minus}, {"n_plus", s.table.n_plus}};
  return out;
}

json run_partition(const RunConfig&, const Session& s, ExperimentOutput& out) {
  const PartitionTable& t = s.table;
  json fits = json::array();
  for (SeriesKind k :
       {SeriesKind::XMinusDist, SeriesKind::XPlusDist, SeriesKind::YMinusAbs,
        SeriesKind::YPlusAbs, SeriesKind::DeltaMinus, SeriesKind::DeltaPlus,
        SeriesKind::SmallDeltaMinus, SeriesKind::SmallDeltaPlus})
    fits.push_back(fit_json(fit_asymptotics(s.model, t, k)));

  std::string csv =
      "n,x_minus_dist,x_plus_dist,y_minus_abs,y_plus_abs,"
      "interval_minus,interval_plus,cell_minus,cell_plus\n";
  for (int n : thin_indices(t.n_max)) {
    csv += std::to_string(n);
    csv += "," + fmt(t.zm(n)) + "," + fmt(t.wp(n)) + "," + fmt(t.ym(n)) + "," + fmt(t.yp(n));
    csv += "," + fmt(t.deltaMinus(n)) + "," + fmt(t.deltaPlus(n));
    csv += "," + fmt(t.sdeltaMinus(n)) + "," + fmt(t.sdeltaPlus(n)) + "\n";
  }
  out.tables.emplace_back("partition", csv);

  return {{"depth", t.n_max},
          {"truncated", t.truncated},
          {"n_minus", t.n_minus},
          {"n_plus", t.n_plus},
          {"fits", fits}};
}

json run_induce(const RunConfig& c, const Session& s) {
  InducedMap G(s.model, s.table);
  int n_to = static_cast<int>(std::min<long>(200, s.table.n_max));
  ExpansionCheck ec = G.check_expansion(n_to);
  DistortionEstimate d50 = G.estimate_distortion(50, 4, c.seed);
  DistortionEstimate d100 = G.estimate_distortion(100, 4, c.seed + 1);
  double rel = std::abs(d100.d_hat - d50.d_hat) / std::max(d50.d_hat, 1e-300);
  int cap = std::min(60, static_cast<int>(s.table.n_max));
  double min_deriv = G.min_return_deriv(cap);
  Interval hl = G.home(Side::Left), hr = G.home(Side::Right);
  return {{"expansion",
           {{"n_from", ec.n_from},
            {"n_to", ec.n_to},
            {"cells", ec.cells},
            {"samples", ec.samples},
            {"violations", ec.violations},
            {"min_ratio", ec.min_ratio}}},
          {"distortion",
           {{"depth_50", distortion_json(d50)},
            {"depth_100", distortion_json(d100)},
            {"rel_change", rel}}},
          {"min_return_deriv", min_deriv},
          {"home_left", {hl.lo, hl.hi}},
          {"home_right", {hr.lo, hr.hi}}};
}

std::string density_csv(const UlamResult& u) {
  std::string csv = "center,density\n";
  for (int i = 0; i < u.bins; ++i) csv += fmt(u.center(i)) + "," + fmt(u.density(i)) + "\n";
  return csv;
}

json mass_json(const MassReport& r) {
  return {{"e_tau", r.e_tau},
          {"partial", r.partial},
          {"partial_tenth", r.partial_tenth},
          {"tail_completion", r.tail_completion},
          {"depth", r.depth},
          {"finite", r.finite},
          {"beta", r.beta}};
}

json run_tails(const RunConfig& c, const Session& s, const UlamResult& hL, const UlamResult& hR,
               ExperimentOutput& out) {
  InducedMap G(s.model, s.table);
  TailReport r = tau_tail(G, hL, hR, c.samples, c.tail_a, c.tail_b, c.t_lo, c.t_hi, c.seed);
  out.tables.emplace_back("tails", tail_csv(r));
  json j = tail_json(r);
  j["a"] = c.tail_a;
  j["b"] = c.tail_b;
  return j;
}

json run_tail_match(const RunConfig& c, const Session& s, const UlamResult& hL,
               const UlamResult& hR) {
  InducedMap G(s.model, s.table);
  auto pts = component_tail_check(G, hL, hR, c.match_thresholds, c.replicas, c.seed);
  json arr = json::array();
  for (const auto& p : pts) {
    double z = p.se > 0 ? (p.empirical - p.quadrature) / p.se : 0.0;
    arr.push_back({{"t", p.t},
                   {"side", p.plus_side ? "plus" : "minus"},
                   {"empirical", p.empirical},
                   {"se", p.se},
                   {"quadrature", p.quadrature},
                   {"z", z}});
  }
  return {{"replicas", c.replicas}, {"points", arr}};
}

json run_corr(const RunConfig& c, const Session& s, const UlamResult& hL, const UlamResult& hR,
              ExperimentOutput& out) {
  Observable obs = make_observable(c, s.model);
  CorrelationReport r = correlation_decay(s.model, s.table, hL, hR, obs, obs, c.corr_lags,
                                          c.corr_steps, c.seed);
  std::string csv = "lag,value,se\n";
  json pts = json::array();
  for (const auto& p : r.points) {
    csv += std::to_string(p.n) + "," + fmt(p.value) + "," + fmt(p.se) + "\n";
    pts.push_back({{"lag", p.n}, {"value", p.value}, {"se", p.se}});
  }
  out.tables.emplace_back("corr", csv);
  return {{"observable", obs.name()},
          {"mean_phi", r.mean_phi},
          {"mean_psi", r.mean_psi},
          {"fitted_exponent", r.fitted_exponent},
          {"bound_exponent", r.bound_exponent},
          {"one_sided_pass", r.one_sided_pass},
          {"points", pts}};
}

json run_lyapunov(const RunConfig& c, const Session& s, const UlamResult& hL,
                  const UlamResult& hR) {
  LyapunovReport r =
      lyapunov_consistency(s.model, s.table, hL, hR, c.corr_steps, c.seed, c.cell_cap);
  return {{"orbit_estimate", r.orbit_estimate},
          {"orbit_se", r.orbit_se},
          {"quadrature_estimate", r.quadrature_estimate},
          {"rel_diff", r.rel_diff},
          {"mass", r.mass}};
}

json run_limit(const RunConfig& c, const Session& s, const UlamResult& hL,
               const UlamResult& hR) {
  Observable obs = make_observable(c, s.model);
  LimitDiagnostics r =
      limit_diagnostics(s.model, s.table, hL, hR, obs, c.horizon, c.replicas, c.seed);
  return {{"observable", obs.name()},
          {"beta_phi", r.beta_phi},
          {"regime", r.regime},
          {"mean_quadrature", r.mean_quadrature},
          {"sigma_hat", r.sigma_hat},
          {"ks_normal", r.ks_normal},
          {"ks_sqrt_n", r.ks_sqrt_n},
          {"ks_sqrt_nlogn", r.ks_sqrt_nlogn},
          {"stable_index", r.stable_index},
          {"n", r.n},
          {"replicas", r.replicas}};
}

}  // namespace

ExperimentOutput run_experiment(const RunConfig& c) {
  ExperimentOutput out;
  out.doc["experiment"] = c.experiment;
  out.doc["config"] = json::parse(resolved_config_json(c));

  Session s(c);
  const std::string& e = c.experiment;
  json& res = out.doc["results"];

  if (e == "classify") {
    res = run_classify(c, s);
    return out;
  }
  if (e == "partition") {
    res = run_partition(c, s, out);
    return out;
  }
  if (e == "induce") {
    res = run_induce(c, s);
    return out;
  }

  // the remaining experiments all need the home densities
  UlamOptions o = ulam_options(c);
  UlamResult hL = ulam_density(s.model, s.table, Side::Left, o);
  UlamResult hR = ulam_density(s.model, s.table, Side::Right, o);

  if (e == "density") {
    out.tables.emplace_back("density_left", density_csv(hL));
    out.tables.emplace_back("density_right", density_csv(hR));
    res = {{"left", ulam_json(hL)}, {"right", ulam_json(hR)}};
    return out;
  }
  if (e == "mass") {
    res = mass_json(acip_mass(s.model, s.table, hL, hR));
    return out;
  }
  if (e == "tails") {
    res = run_tails(c, s, hL, hR, out);
    return out;
  }
  if (e == "tail_match") {
    res = run_tail_match(c, s, hL, hR);
    return out;
  }
  if (e == "corr") {
    res = run_corr(c, s, hL, hR, out);
    return out;
  }
  if (e == "lyapunov") {
    res = run_lyapunov(c, s, hL, hR);
    return out;
  }
  if (e == "limit") {
    res = run_limit(c, s, hL, hR);
    return out;
  }

  // full battery; sections the regime rules out are recorded as skipped
  res["classify"] = run_classify(c, s);
  res["partition"] = run_partition(c, s, out);
  res["induce"] = run_induce(c, s);
  out.tables.emplace_back("density_left", density_csv(hL));
  out.tables.emplace_back("density_right", density_csv(hR));
  res["density"] = {{"left", ulam_json(hL)}, {"right", ulam_json(hR)}};
  res["mass"] = mass_json(acip_mass(s.model, s.table, hL, hR));
  res["tails"] = run_tails(c, s, hL, hR, out);
  res["tail_match"] = run_tail_match(c, s, hL, hR);
  auto guarded = [&](const char* key, auto&& fn) {
    try {
      res[key] = fn();
    } catch (const Error& err) {
      res[key] = {{"skipped", err.what()}};
    }
  };
  guarded("corr", [&] { return run_corr(c, s, hL, hR, out); });
  guarded("lyapunov", [&] { return run_lyapunov(c, s, hL, hR); });
  guarded("limit", [&] { return run_limit(c, s, hL, hR); });
  return out;
}

std::vector<std::string> write_outputs(const RunConfig& c, const ExperimentOutput& out) {
  namespace fs = std::filesystem;
  fs::create_directories(c.out_dir);
  std::vector<std::string> paths;
  fs::path dir(c.out_dir);

  fs::path report = dir / "report.json";
  std::ofstream(report) << out.doc.dump(2) << "\n";
  paths.push_back(report.string());

  for (const auto& [stem, csv] : out.tables) {
    fs::path p = dir / (stem + ".csv");
    std::ofstream(p) << csv;
    paths.push_back(p.string());
  }
  return paths;
}

}  // namespace fbm
