#include "eisenhart/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "eisenhart/acceptance.hpp"
#include "eisenhart/complexlift.hpp"
#include "eisenhart/conformal.hpp"
#include "eisenhart/lift.hpp"
#include "eisenhart/potentials.hpp"
#include "eisenhart/riemlift.hpp"
#include "eisenhart/stability.hpp"
#include "eisenhart/version.hpp"

namespace eisenhart {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void bad_config(const std::string& msg) { throw std::invalid_argument(msg); }

void require_schema(const json& obj, const std::string& where,
                    const std::vector<std::string>& required,
                    const std::vector<std::string>& optional) {
  if (!obj.is_object()) bad_config(where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    const std::string& k = item.key();
    const bool known =
        std::find(required.begin(), required.end(), k) != required.end() ||
        std::find(optional.begin(), optional.end(), k) != optional.end();
    if (!known) bad_config("unknown key '" + k + "' in " + where);
  }
  for (const std::string& k : required)
    if (!obj.contains(k)) bad_config("missing key '" + k + "' in " + where);
}

double get_num(const json& obj, const std::string& where, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_number()) bad_config("key '" + key + "' in " + where + " must be a number");
  return v.get<double>();
}

double get_num_or(const json& obj, const std::string& where, const std::string& key,
                  double fallback) {
  return obj.contains(key) ? get_num(obj, where, key) : fallback;
}

std::string get_str(const json& obj, const std::string& where, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_string()) bad_config("key '" + key + "' in " + where + " must be a string");
  return v.get<std::string>();
}

bool get_bool_or(const json& obj, const std::string& where, const std::string& key,
                 bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) bad_config("key '" + key + "' in " + where + " must be a boolean");
  return v.get<bool>();
}

Vec get_vec(const json& obj, const std::string& where, const std::string& key) {
  const json& v = obj.at(key);
  if (!v.is_array()) bad_config("key '" + key + "' in " + where + " must be an array of numbers");
  Vec out;
  for (const json& e : v) {
    if (!e.is_number()) bad_config("key '" + key + "' in " + where + " must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::map<std::string, double> get_params(const json& obj, const std::string& where) {
  std::map<std::string, double> out;
  if (!obj.contains("params")) return out;
  const json& p = obj.at("params");
  if (!p.is_object()) bad_config("'params' in " + where + " must be an object of numbers");
  for (const auto& item : p.items()) {
    if (!item.value().is_number())
      bad_config("parameter '" + item.key() + "' in " + where + " must be a number");
    out[item.key()] = item.value().get<double>();
  }
  return out;
}

PotentialSpec read_potential(const json& cfg) {
  if (!cfg.contains("potential")) bad_config("missing key 'potential' in config root");
  const json& p = cfg.at("potential");
  require_schema(p, "potential", {"name"}, {"n", "params"});
  const std::string name = get_str(p, "potential", "name");
  int n = 1;
  if (name == "saddle_harmonic" || name == "neg_saddle" || name == "cubic_harmonic_2d") n = 2;
  if (p.contains("n")) {
    if (!p.at("n").is_number_integer()) bad_config("'n' in potential must be an integer");
    n = p.at("n").get<int>();
  }
  return catalog_get(name, get_params(p, "potential"), n);
}

IntegratorConfig read_integrator(const json& cfg) {
  IntegratorConfig ic;
  if (!cfg.contains("integrator")) return ic;
  const json& j = cfg.at("integrator");
  require_schema(j, "integrator", {},
                 {"method", "h0", "rtol", "atol", "max_step", "max_steps", "blowup_norm"});
  if (j.contains("method")) {
    const std::string m = get_str(j, "integrator", "method");
    if (m == "rk4_fixed")
      ic.method = Method::rk4_fixed;
    else if (m == "dp54_adaptive")
      ic.method = Method::dp54_adaptive;
    else
      bad_config("unknown integrator method '" + m + "'");
  }
  ic.h0 = get_num_or(j, "integrator", "h0", ic.h0);
  ic.rtol = get_num_or(j, "integrator", "rtol", ic.rtol);
  ic.atol = get_num_or(j, "integrator", "atol", ic.atol);
  ic.max_step = get_num_or(j, "integrator", "max_step", ic.max_step);
  ic.blowup_norm = get_num_or(j, "integrator", "blowup_norm", ic.blowup_norm);
  if (j.contains("max_steps")) {
    if (!j.at("max_steps").is_number_integer())
      bad_config("'max_steps' in integrator must be an integer");
    ic.max_steps = j.at("max_steps").get<long long>();
  }
  return ic;
}

ConformalFactor read_factor(const json& cfg) {
  if (!cfg.contains("factor")) bad_config("missing key 'factor' in config root");
  const json& f = cfg.at("factor");
  require_schema(f, "factor", {"name"}, {"params"});
  return conformal_factor_from_config(get_str(f, "factor", "name"), get_params(f, "factor"));
}

struct Check {
  std::string name;
  bool pass = false;
  json values;
};

struct RunContext {
  fs::path out_dir;
  std::string prefix;
  std::uint64_t seed = 0;
  IntegratorConfig integrator;
  std::vector<std::string> artifacts;
  std::vector<Check> checks;
  json results;  // command-specific scalar outputs for the manifest

  std::string file(const std::string& tail) {
    const std::string name = prefix + "_" + tail;
    artifacts.push_back(name);
    return (out_dir / name).string();
  }
};

void ensure_completed(const Trajectory& tr, const std::string& what) {
  if (tr.sol.status == SolveStatus::blowup_suspected)
    throw std::runtime_error(what + ": blow-up suspected near parameter " +
                             format_g17(tr.sol.grid.back()));
  if (tr.sol.status != SolveStatus::completed)
    throw std::runtime_error(what + ": integration stopped early (step limit)");
}

void write_energy_csv(RunContext& ctx, const PotentialSpec& V, const Trajectory& base) {
  std::vector<Vec> rows;
  for (size_t k = 0; k < base.sol.grid.size(); ++k) {
    const double t = base.sol.grid[k];
    const Vec& y = base.sol.states[k];
    const Vec x(y.begin(), y.begin() + V.n);
    double e = V.eval(t, x);
    for (int i = 0; i < V.n; ++i) e += 0.5 * y[V.n + i] * y[V.n + i];
    rows.push_back({t, e});
  }
  write_columns_csv(ctx.file("energy.csv"), {"t", "energy"}, rows);
}

const std::vector<std::string> kCommonKeys = {"command", "potential", "integrator",
                                              "output", "seed"};

std::vector<std::string> with_common(std::vector<std::string> extra) {
  extra.insert(extra.end(), kCommonKeys.begin(), kCommonKeys.end());
  return extra;
}

struct CommandSchema {
  std::vector<std::string> required;
  std::vector<std::string> optional;
};

const std::map<std::string, CommandSchema>& command_schemas() {
  static const std::map<std::string, CommandSchema> schemas = {
      {"integrate", {{"command", "potential", "t1", "x0", "xdot0"}, {"t0"}}},
      {"lift",
       {{"command", "potential", "t1", "x0", "xdot0"},
        {"t0", "causal_class", "tol", "affinity_tol"}}},
      {"conformal", {{"command", "potential", "factor", "t1", "x0", "xdot0"}, {"t0", "tol"}}},
      {"conjugate",
       {{"command", "potential", "t1", "x0", "xdot0"},
        {"t0", "variation", "hypotheses", "focusing", "refine_tol"}}},
      {"complex",
       {{"command", "potential", "z0", "zdot0"},
        {"t0", "t1", "causal_class", "tol", "fd_step", "blowup_horizon", "expect_blowup"}}},
      {"sqrtlift",
       {{"command", "potential", "x0", "xdot0", "c0", "c1", "horizon"},
        {"tol", "c0_tol", "sqrt_tol"}}},
      {"shoot",
       {{"command", "potential", "x0", "x1", "v1"},
        {"margin_min", "bvp_tol", "tv_tol", "coe_tol", "extra_starts", "max_newton"}}},
  };
  return schemas;
}

void check_command_schema(const json& cfg, const std::string& command) {
  const auto it = command_schemas().find(command);
  if (it == command_schemas().end()) bad_config("unknown command '" + command + "'");
  require_schema(cfg, "config root", it->second.required, with_common(it->second.optional));
}

void cmd_integrate(const json& cfg, RunContext& ctx) {
  check_command_schema(cfg, "integrate");
  const PotentialSpec V = read_potential(cfg);
  const double t0 = get_num_or(cfg, "config root", "t0", 0.0);
  const double t1 = get_num(cfg, "config root", "t1");
  const Trajectory base = integrate_base(V, t0, get_vec(cfg, "config root", "x0"),
                                         get_vec(cfg, "config root", "xdot0"), t1,
                                         ctx.integrator);
  ensure_completed(base, "integrate");
  write_base_csv(ctx.file("base.csv"), base);
  write_energy_csv(ctx, V, base);
  ctx.checks.push_back({"solver_completed", true, {}});
}

void cmd_lift(const json& cfg, RunContext& ctx) {
  check_command_schema(cfg, "lift");
  const PotentialSpec V = read_potential(cfg);
  const double t0 = get_num_or(cfg, "config root", "t0", 0.0);
  const double t1 = get_num(cfg, "config root", "t1");
  const double tol = get_num_or(cfg, "config root", "tol", 1e-6);
  const double affinity_tol = get_num_or(cfg, "config root", "affinity_tol", 1e-10);
  const Vec x0 = get_vec(cfg, "config root", "x0");
  const Vec xdot0 = get_vec(cfg, "config root", "xdot0");
  const CausalClass cc = CausalClass::make(causal_kind_from_string(
      cfg.contains("causal_class") ? get_str(cfg, "config root", "causal_class")
                                   : "lightlike"));

  const Trajectory base = integrate_base(V, t0, x0, xdot0, t1, ctx.integrator);
  ensure_completed(base, "lift (base)");
  const BrinkmannMetric m = make_brinkmann(V);
  const LiftState st0 = eisenhart_lift_initial(V, t0, x0, xdot0, cc);
  const Trajectory lifted = integrate_lift(m, st0, 0.0, t1 - t0, ctx.integrator);
  ensure_completed(lifted, "lift (geodesic)");

  write_base_csv(ctx.file("base.csv"), base);
  write_lift_csv(ctx.file("lift.csv"), lifted);

  const LiftReport rep = verify_lift(V, base, lifted, tol);
  double affinity = 0.0;
  const int d = V.n + 2;
  for (const Vec& y : lifted.sol.states)
    affinity = std::max(affinity, std::abs(y[d + 1] - st0.qdot[1]));

  ctx.results["max_x_gap"] = rep.max_x_gap;
  ctx.results["max_norm_drift"] = rep.max_norm_drift;
  ctx.results["max_hamiltonian_residual"] = rep.max_hamiltonian_residual;
  ctx.results["affinity_drift"] = affinity;
  ctx.checks.push_back({"lift_verified", rep.pass,
                        {{"max_x_gap", rep.max_x_gap},
                         {"max_norm_drift", rep.max_norm_drift},
                         {"max_hamiltonian_residual", rep.max_hamiltonian_residual},
                         {"tol", tol}}});
  ctx.checks.push_back(
      {"affine_time", affinity <= affinity_tol,
       {{"affinity_drift", affinity}, {"tol", affinity_tol}}});
}

void cmd_conformal(const json& cfg, RunContext& ctx) {
  check_command_schema(cfg, "conformal");
  const PotentialSpec V = read_potential(cfg);
  const ConformalFactor f = read_factor(cfg);
  const double t0 = get_num_or(cfg, "config root", "t0", 0.0);
  const double t1 = get_num(cfg, "config root", "t1");
  ConformalVerifyConfig vcfg;
  vcfg.tol = get_num_or(cfg, "config root", "tol", 1e-6);
  vcfg.integrator = ctx.integrator;

  const Vec x0 = get_vec(cfg, "config root", "x0");
  const Vec xdot0 = get_vec(cfg, "config root", "xdot0");
  const BrinkmannMetric m = make_brinkmann(V);
  const Trajectory base = integrate_base(V, t0, x0, xdot0, t1, ctx.integrator);
  ensure_completed(base, "conformal (base)");

  const ConformalReport rep = verify_conformal_class(m, f, base, vcfg);

  // Artifacts: the reparametrized curve and the tau map.
  const LiftState st0 = eisenhart_lift_initial(V, t0, x0, xdot0, CausalClass::lightlike());
  const Trajectory lifted = integrate_lift(m, st0, 0.0, t1 - t0, ctx.integrator);
  ensure_completed(lifted, "conformal (lift)");
  const auto [map, gamma_f] = reparametrize(m, lifted, f, 0.0);
  write_lift_csv(ctx.file("gamma_f.csv"), gamma_f);
  std::vector<Vec> rows;
  for (size_t k = 0; k < map.t_nodes.size(); ++k)
    rows.push_back({map.t_nodes[k], map.s_nodes[k]});
  write_columns_csv(ctx.file("tau.csv"), {"t", "tau"}, rows);

  ctx.results["max_curve_gap"] = rep.max_curve_gap;
  ctx.results["max_conformal_norm"] = rep.max_conformal_norm;
  ctx.checks.push_back({"conformal_class_verified", rep.pass,
                        {{"max_curve_gap", rep.max_curve_gap},
                         {"max_conformal_norm", rep.max_conformal_norm},
                         {"tol", vcfg.tol}}});
}

void cmd_conjugate(const json& cfg, RunContext& ctx) {
  check_command_schema(cfg, "conjugate");
  const PotentialSpec V = read_potential(cfg);
  const double t0 = get_num_or(cfg, "config root", "t0", 0.0);
  const double t1 = get_num(cfg, "config root", "t1");
  const Vec x0 = get_vec(cfg, "config root", "x0");
  const Vec xdot0 = get_vec(cfg, "config root", "xdot0");

  const Trajectory base = integrate_base(V, t0, x0, xdot0, t1, ctx.integrator);
  ensure_completed(base, "conjugate (base)");

  ConjugateConfig ccfg;
  ccfg.integrator = ctx.integrator;
  ccfg.refine_tol = get_num_or(cfg, "config root", "refine_tol", ccfg.refine_tol);
  const ConjugateReport rep = conjugate_points(V, base, t0, t1, ccfg);

  std::vector<Vec> det_rows;
  for (const auto& [t, d] : rep.det_samples) det_rows.push_back({t, d});
  write_columns_csv(ctx.file("det.csv"), {"t", "det"}, det_rows);

  json events = json::array();
  for (const ConjugateEvent& e : rep.events)
    events.push_back({{"t", e.t}, {"multiplicity", e.multiplicity}, {"sigma_min", e.sigma_min}});
  ctx.results["events"] = events;
  ctx.checks.push_back({"solver_completed", true, {{"events_found", rep.events.size()}}});

  if (cfg.contains("variation")) {
    const json& v = cfg.at("variation");
    require_schema(v, "variation", {"jdot0", "epsilon"}, {"k"});
    int k = 9;
    if (v.contains("k")) {
      if (!v.at("k").is_number_integer()) bad_config("'k' in variation must be an integer");
      k = v.at("k").get<int>();
    }
    const VariationFamily fam = variation_family(V, base, get_vec(v, "variation", "jdot0"),
                                                 get_num(v, "variation", "epsilon"), k,
                                                 ctx.integrator);
    std::vector<Vec> rows;
    const int samples = 200;
    for (int j = 0; j <= samples; ++j) {
      const double t = t0 + (t1 - t0) * (static_cast<double>(j) / samples);
      rows.push_back({t, fam.spread_at(t)});
    }
    write_columns_csv(ctx.file("spread.csv"), {"t", "spread"}, rows);
  }
  if (get_bool_or(cfg, "config root", "hypotheses", false)) {
    const AccumulationHypotheses h = check_accumulation_hypotheses(V, base);
    ctx.results["hypotheses"] = {{"velocity_zero_found", h.velocity_zero_found},
                                 {"t_zero", h.t_zero},
                                 {"component", h.component},
                                 {"hessian_row_nonzero", h.hessian_row_nonzero},
                                 {"laplacian_nonnegative", h.laplacian_nonnegative},
                                 {"min_laplacian", h.min_laplacian},
                                 {"all_hold", h.all_hold}};
  }
  if (cfg.contains("focusing")) {
    const json& fj = cfg.at("focusing");
    require_schema(fj, "focusing", {"b"}, {"dim_constant"});
    const FocusingBound fb = check_focusing_bound(
        V, base, get_num(fj, "focusing", "b"), get_num_or(fj, "focusing", "dim_constant", -1.0));
    ctx.results["focusing"] = {
        {"holds", fb.holds}, {"min_laplacian", fb.min_laplacian}, {"bound", fb.bound}};
  }
}

void cmd_complex(const json& cfg, RunContext& ctx) {
  check_command_schema(cfg, "complex");
  const PotentialSpec V = read_potential(cfg);
  const HolomorphicSystem H = f_from_potential(V);
  ctx.results["cr_residual"] = H.max_cr_residual;
  ctx.results["max_laplacian"] = H.max_laplacian;
  ctx.checks.push_back({"cauchy_riemann", H.max_cr_residual <= 1e-8,
                        {{"cr_residual", H.max_cr_residual}, {"tol", 1e-8}}});

  const Vec z0v = get_vec(cfg, "config root", "z0");
  const Vec zd0v = get_vec(cfg, "config root", "zdot0");
  if (z0v.size() != 2 || zd0v.size() != 2)
    bad_config("'z0' and 'zdot0' must be arrays [re, im]");
  const std::complex<double> z0{z0v[0], z0v[1]}, zd0{zd0v[0], zd0v[1]};

  if (cfg.contains("blowup_horizon")) {
    if (cfg.contains("t1")) bad_config("give either 't1' (lift run) or 'blowup_horizon', not both");
    const double horizon = get_num(cfg, "config root", "blowup_horizon");
    const bool expect = get_bool_or(cfg, "config root", "expect_blowup", true);
    const BlowupReport rep = detect_blowup(H, z0, zd0, horizon, ctx.integrator);
    write_base_csv(ctx.file("base.csv"), rep.path);
    ctx.results["blown_up"] = rep.blown_up;
    if (rep.has_bracket) {
      ctx.results["bracket_lo"] = rep.bracket_lo;
      ctx.results["bracket_hi"] = rep.bracket_hi;
    }
    ctx.checks.push_back({"blowup_as_expected", rep.blown_up == expect,
                          {{"blown_up", rep.blown_up}, {"expected", expect}}});
    return;
  }

  if (!cfg.contains("t1")) bad_config("missing key 't1' in config root");
  const double t0 = get_num_or(cfg, "config root", "t0", 0.0);
  const double t1 = get_num(cfg, "config root", "t1");
  const double tol = get_num_or(cfg, "config root", "tol", 1e-5);
  const double fd_step = get_num_or(cfg, "config root", "fd_step", 1e-4);
  const CausalClass cc = CausalClass::make(causal_kind_from_string(
      cfg.contains("causal_class") ? get_str(cfg, "config root", "causal_class")
                                   : "lightlike"));

  const SplitMetric m = make_split(V);
  const LiftState st0 = complex_lift_initial(V, t0, z0, zd0, cc);
  IntegratorConfig icfg = ctx.integrator;
  // The residual check differentiates the interpolant twice; its error grows
  // like max_step^2, so the default cap must sit well below sqrt(tol).
  if (icfg.max_step == 0.0) icfg.max_step = 5e-4 * std::abs(t1 - t0);
  const Trajectory lifted = integrate_split_lift(m, st0, 0.0, t1 - t0, icfg);
  ensure_completed(lifted, "complex (lift)");
  const Trajectory projected = project(lifted);

  write_lift_csv(ctx.file("lift.csv"), lifted);
  write_base_csv(ctx.file("base.csv"), projected);

  const ComplexReport rep = verify_complex_solution(projected, H, tol, fd_step);
  double drift = 0.0;
  for (const Vec& y : lifted.sol.states) {
    LiftState st{Vec(y.begin(), y.begin() + 4), Vec(y.begin() + 4, y.end())};
    drift = std::max(drift, std::abs(split_metric_value(m, st.q, st.qdot, st.qdot) -
                                     lifted.initial_norm));
  }
  ctx.results["max_residual"] = rep.max_residual;
  ctx.results["norm_drift"] = drift;
  ctx.checks.push_back({"complex_ode_verified", rep.pass,
                        {{"max_residual", rep.max_residual}, {"tol", tol}}});
  ctx.checks.push_back(
      {"split_norm_conserved", drift <= 1e-8, {{"norm_drift", drift}, {"tol", 1e-8}}});
}

void cmd_sqrtlift(const json& cfg, RunContext& ctx) {
  check_command_schema(cfg, "sqrtlift");
  const PotentialSpec V = read_potential(cfg);
  const Vec x0 = get_vec(cfg, "config root", "x0");
  const Vec xdot0 = get_vec(cfg, "config root", "xdot0");
  const double c0 = get_num(cfg, "config root", "c0");
  const double c1 = get_num(cfg, "config root", "c1");
  const double horizon = get_num(cfg, "config root", "horizon");
  const double tol = get_num_or(cfg, "config root", "tol", 1e-6);
  const double c0_tol = get_num_or(cfg, "config root", "c0_tol", 1e-9);
  const double sqrt_tol = get_num_or(cfg, "config root", "sqrt_tol", 1e-8);

  const SqrtLiftReport rep = verify_sqrt_lift(V, x0, xdot0, c0, c1, horizon, tol,
                                              ctx.integrator);

  const RiemannianDualMetric m = make_riemannian_dual(V);
  bool degenerate = false;
  const LiftState st0 = sqrt_lift_initial(V, x0, xdot0, c0, c1, &degenerate);
  const Trajectory geo = integrate_riem_geodesic(m, st0, 0.0, horizon, ctx.integrator);
  write_lift_csv(ctx.file("geodesic.csv"), geo);

  ctx.results["max_gap"] = rep.max_gap;
  ctx.results["c0_drift"] = rep.c0_drift;
  ctx.results["sqrt_drift"] = rep.sqrt_drift;
  ctx.results["degenerate_c0"] = degenerate;
  ctx.checks.push_back(
      {"sqrt_lift_verified", rep.pass, {{"max_gap", rep.max_gap}, {"tol", tol}}});
  ctx.checks.push_back(
      {"c0_conserved", rep.c0_drift <= c0_tol, {{"c0_drift", rep.c0_drift}, {"tol", c0_tol}}});
  ctx.checks.push_back({"sqrt_identity", rep.sqrt_drift <= sqrt_tol,
                        {{"sqrt_drift", rep.sqrt_drift}, {"tol", sqrt_tol}}});
}

void cmd_shoot(const json& cfg, RunContext& ctx) {
  check_command_schema(cfg, "shoot");
  const PotentialSpec V = read_potential(cfg);
  const Vec x0 = get_vec(cfg, "config root", "x0");
  const Vec x1 = get_vec(cfg, "config root", "x1");
  const double v1 = get_num(cfg, "config root", "v1");

  ShootingConfig scfg;
  scfg.margin_min = get_num_or(cfg, "config root", "margin_min", scfg.margin_min);
  scfg.bvp_tol = get_num_or(cfg, "config root", "bvp_tol", scfg.bvp_tol);
  scfg.seed = ctx.seed;
  if (cfg.contains("extra_starts")) scfg.extra_starts = (int)get_num(cfg, "config root", "extra_starts");
  if (cfg.contains("max_newton")) scfg.max_newton = (int)get_num(cfg, "config root", "max_newton");
  const double tv_tol = get_num_or(cfg, "config root", "tv_tol", 1e-5);
  const double coe_tol = get_num_or(cfg, "config root", "coe_tol", 1e-7);

  const ShootingResult r = shoot_two_point(V, x0, x1, v1, scfg);

  write_shooting_csv(r, ctx.file("shoot.csv"));
  std::vector<Vec> tau_rows;
  for (const auto& s : r.tau_samples) tau_rows.push_back({s[0], s[1]});
  write_columns_csv(ctx.file("tau.csv"), {"t", "tau"}, tau_rows);

  json rj;
  rj["initial_velocity"] = r.initial_velocity;
  rj["terminal_gap"] = r.terminal_gap;
  rj["v1_margin"] = r.v1_margin;
  rj["c0_raw"] = r.c0_raw;
  rj["rescaled"] = r.rescaled;
  rj["c0_rescaled"] = r.c0_rescaled;
  rj["c"] = r.c;
  rj["tv_residual"] = r.tv_residual;
  rj["taudot_gap"] = r.taudot_gap;
  rj["coe_drift"] = r.coe_drift;
  rj["converged_start_index"] = r.converged_start_index;
  rj["newton_iterations"] = r.newton_iterations;
  rj["alternates"] = r.alternates;
  json tau_samples = json::array();
  for (const auto& s : r.tau_samples) tau_samples.push_back({s[0], s[1], s[2]});
  rj["tau_samples"] = tau_samples;
  json x_samples = json::array();
  for (size_t k = 0; k < r.x_curve.sol.grid.size(); ++k) {
    json row = json::array();
    row.push_back(r.x_curve.sol.grid[k]);
    for (double v : r.x_curve.sol.states[k]) row.push_back(v);
    x_samples.push_back(row);
  }
  rj["x_samples"] = x_samples;
  {
    std::ofstream out(ctx.out_dir / (ctx.prefix + "_result.json"));
    out << rj.dump(2) << "\n";
  }
  ctx.artifacts.push_back(ctx.prefix + "_result.json");

  ctx.results["terminal_gap"] = r.terminal_gap;
  ctx.results["tv_residual"] = r.tv_residual;
  ctx.results["coe_drift"] = r.coe_drift;
  ctx.results["c0_raw"] = r.c0_raw;
  ctx.checks.push_back({"endpoint_reached", r.terminal_gap <= scfg.bvp_tol,
                        {{"terminal_gap", r.terminal_gap}, {"tol", scfg.bvp_tol}}});
  ctx.checks.push_back({"hamiltonian_ode_residual", r.tv_residual <= tv_tol,
                        {{"tv_residual", r.tv_residual}, {"tol", tv_tol}}});
  ctx.checks.push_back({"energy_conservation", r.coe_drift <= coe_tol,
                        {{"coe_drift", r.coe_drift}, {"tol", coe_tol}}});
}

json run_one(const json& cfg, RunContext& ctx) {
  const std::string command = get_str(cfg, "config root", "command");
  if (command == "integrate")
    cmd_integrate(cfg, ctx);
  else if (command == "lift")
    cmd_lift(cfg, ctx);
  else if (command == "conformal")
    cmd_conformal(cfg, ctx);
  else if (command == "conjugate")
    cmd_conjugate(cfg, ctx);
  else if (command == "complex")
    cmd_complex(cfg, ctx);
  else if (command == "sqrtlift")
    cmd_sqrtlift(cfg, ctx);
  else if (command == "shoot")
    cmd_shoot(cfg, ctx);
  else
    bad_config("unknown command '" + command + "'");

  json checks = json::array();
  for (const Check& c : ctx.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"values", c.values}});
  return checks;
}

json load_config(const std::string& path, const CliOverrides& o) {
  std::ifstream in(path);
  if (!in) bad_config("cannot open config file '" + path + "'");
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    bad_config("config parse error: " + std::string(e.what()));
  }
  if (!cfg.is_object()) bad_config("config root must be a JSON object");
  if (o.seed) cfg["seed"] = *o.seed;
  if (o.out_dir) {
    if (!cfg.contains("output")) cfg["output"] = json::object();
    cfg["output"]["dir"] = *o.out_dir;
  }
  return cfg;
}

void read_output_block(const json& cfg, RunContext& ctx) {
  ctx.out_dir = "out";
  ctx.prefix = "run";
  if (cfg.contains("output")) {
    const json& oj = cfg.at("output");
    require_schema(oj, "output", {}, {"dir", "prefix"});
    if (oj.contains("dir")) ctx.out_dir = get_str(oj, "output", "dir");
    if (oj.contains("prefix")) ctx.prefix = get_str(oj, "output", "prefix");
  }
  if (cfg.contains("seed")) {
    const json& s = cfg.at("seed");
    if (!s.is_number_integer() || s.get<long long>() < 0)
      bad_config("'seed' must be a non-negative integer");
    ctx.seed = s.get<std::uint64_t>();
  }
}

}  // namespace

int validate_config_file(const std::string& path, std::ostream& log) {
  try {
    const json cfg = load_config(path, {});
    RunContext ctx;
    read_output_block(cfg, ctx);
    ctx.integrator = read_integrator(cfg);
    // Schema only; no integration happens during validate.
    const std::string command = get_str(cfg, "config root", "command");
    check_command_schema(cfg, command);
    read_potential(cfg);
    if (command == "conformal") read_factor(cfg);
    log << "config ok: " << path << "\n";
    return 0;
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << "\n";
    return 2;
  }
}

int run_config_file(const std::string& path, const CliOverrides& o, std::ostream& log) {
  const auto started = std::chrono::steady_clock::now();
  json cfg;
  RunContext ctx;
  try {
    cfg = load_config(path, o);
    read_output_block(cfg, ctx);
    ctx.integrator = read_integrator(cfg);
    fs::create_directories(ctx.out_dir);
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << "\n";
    return 2;
  }

  json checks;
  try {
    checks = run_one(cfg, ctx);
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    log << "numerical failure: " << e.what() << "\n";
    return 3;
  }

  bool all_pass = true;
  for (const Check& c : ctx.checks) all_pass = all_pass && c.pass;

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  json manifest;
  manifest["version"] = kVersion;
  manifest["config"] = cfg;
  ctx.artifacts.push_back("run_manifest.json");
  manifest["artifacts"] = ctx.artifacts;
  manifest["checks"] = checks;
  manifest["results"] = ctx.results;
  manifest["all_checks_pass"] = all_pass;
  manifest["wall_clock_sec"] = wall;
  {
    std::ofstream out(ctx.out_dir / "run_manifest.json");
    out << manifest.dump(2) << "\n";
  }

  for (const Check& c : ctx.checks)
    log << (c.pass ? "PASS " : "FAIL ") << c.name << "\n";
  log << "artifacts in " << ctx.out_dir.string() << "\n";
  return all_pass ? 0 : 1;
}

int run_cli(int argc, const char* const* argv) {
  std::ostream& log = std::cout;
  std::vector<std::string> args(argv + 1, argv + argc);
  const std::string usage =
      "usage: eisenhart run <config.json> [--out DIR] [--seed N]\n"
      "       eisenhart validate <config.json>\n"
      "       eisenhart suite acceptance\n";
  if (args.empty()) {
    log << usage;
    return 2;
  }
  const std::string cmd = args[0];
  if (cmd == "run") {
    if (args.size() < 2) {
      log << usage;
      return 2;
    }
    CliOverrides o;
    std::string path = args[1];
    for (size_t i = 2; i < args.size(); ++i) {
      if (args[i] == "--out" && i + 1 < args.size())
        o.out_dir = args[++i];
      else if (args[i] == "--seed" && i + 1 < args.size())
        o.seed = std::stoull(args[++i]);
      else {
        log << "unknown argument '" << args[i] << "'\n" << usage;
        return 2;
      }
    }
    return run_config_file(path, o, log);
  }
  if (cmd == "validate") {
    if (args.size() != 2) {
      log << usage;
      return 2;
    }
    return validate_config_file(args[1], log);
  }
  if (cmd == "suite") {
    if (args.size() != 2 || args[1] != "acceptance") {
      log << usage;
      return 2;
    }
    const AcceptanceResult r = run_acceptance(log);
    return r.failed == 0 ? 0 : 1;
  }
  log << "unknown command '" << cmd << "'\n" << usage;
  return 2;
}

}  // namespace eisenhart
