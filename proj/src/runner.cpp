#include "eprbound/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "eprbound/fpe.hpp"
#include "eprbound/io.hpp"

namespace eprbound {

using nlohmann::json;

namespace {

std::string qkey(double q) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", q);
  return buf;
}

// JSON has no inf/nan; report them as strings so nothing is silently null.
json num(double v) {
  if (std::isnan(v)) return json();
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json to_json(const BoundCheck& b) {
  json j{{"name", b.name},
         {"lhs", num(b.lhs)},
         {"rhs", num(b.rhs)},
         {"constant_used", num(b.constant_used)},
         {"constant_note", b.constant_note},
         {"margin", num(b.margin)},
         {"holds", b.holds}};
  if (b.vacuous) j["vacuous"] = true;
  if (b.rhs_tight > 0.0) j["rhs_tight"] = num(b.rhs_tight);
  return j;
}

json to_json(const FunctionalSet& fs) {
  json j{{"epr", fs.epr},
         {"sup_rho", fs.sup_rho},
         {"inf_rho", fs.inf_rho},
         {"boundary_inf_rho", fs.boundary_inf_rho},
         {"excluded_mass", fs.excluded_mass}};
  for (const auto& [q, v] : fs.v_q) j["v"][qkey(q)] = v;
  for (const auto& [q, v] : fs.delta_ls_q) j["delta_ls"][qkey(q)] = v;
  for (const auto& [q, v] : fs.delta_ls_div_q) j["delta_ls_div_route"][qkey(q)] = v;
  for (const auto& [q, v] : fs.delta_perp_q) j["delta_perp"][qkey(q)] = v;
  for (const auto& [q, v] : fs.holder_q)
    j["holder"][qkey(q)] = fs.holder_overflow.count(q) ? json("inf") : json(v);
  return j;
}

json to_json(const DomainConstants& dc) {
  json grids = json::array();
  for (const auto& g : dc.grids_used)
    grids.push_back({{"n", g.n},
                     {"h", g.h},
                     {"c1", g.c1},
                     {"c2", g.c2},
                     {"lambda_c1", g.lambda_c1},
                     {"lambda_c2", g.lambda_c2}});
  return json{{"c1", dc.c1},
              {"c2", dc.c2},
              {"eigen_c1", dc.eigen_c1},
              {"eigen_c2", dc.eigen_c2},
              {"extrapolated", dc.extrapolated},
              {"observed_order_c1", num(dc.observed_order_c1)},
              {"observed_order_c2", num(dc.observed_order_c2)},
              {"grids", grids}};
}

json to_json(const SweepResult& sr) {
  json records = json::array();
  for (const auto& r : sr.records) {
    json rec{{"eps", r.eps},
             {"epr", r.epr},
             {"v", r.v},
             {"delta_ls", r.delta_ls},
             {"delta_perp", r.delta_perp},
             {"ratio_ls_perp", num(r.ratio_ls_perp)},
             {"fw_rhs", r.fw_rhs},
             {"epr_within_bound", r.epr_within_bound}};
    if (r.isotropic) {
      rec["delta_perp_full_drift"] = r.delta_perp_full_drift;
      rec["isotropy_gap_rel"] = r.isotropy_gap_rel;
    }
    records.push_back(rec);
  }
  json j{{"records", records}, {"truncated", sr.truncated}};
  if (sr.truncated) j["truncation_error"] = sr.truncation_error;
  return j;
}

json to_json(const LocalityTable& lt) {
  json rows = json::array();
  for (const auto& r : lt.rows)
    rows.push_back({{"radius", r.radius},
                    {"diam", r.diam},
                    {"numerator", r.numerator},
                    {"denominator", r.denominator},
                    {"ratio", num(r.ratio)},
                    {"defined", r.defined},
                    {"in_regime", r.in_regime},
                    {"cells", r.cells}});
  return json{{"center", {lt.center.x, lt.center.y}},
              {"k_curvature", lt.k_curvature},
              {"rows", rows}};
}

json to_json(const EstimatorResult& er) {
  return json{{"value", er.value},
              {"std_error", er.std_error},
              {"n_samples", er.n_samples},
              {"skipped", er.skipped}};
}

double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConfigError(std::string("config field '") + key + "' must be a number");
  return j[key].get<double>();
}

std::vector<double> number_list(const json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw ConfigError(std::string(what) + " must be a non-empty array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(std::string(what) + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<int> int_list(const json& j, const char* what) {
  std::vector<int> out;
  for (double v : number_list(j, what)) {
    int n = static_cast<int>(v);
    if (n != v || n < 8) throw ConfigError(std::string(what) + " entries must be integers >= 8");
    out.push_back(n);
  }
  return out;
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace

System build_system(const json& spec) {
  if (!spec.contains("system") || !spec["system"].is_object())
    throw ConfigError("config needs a 'system' object");
  const json& s = spec["system"];
  std::string variant = s.value("variant", "catalog");

  DiffusionMatrix d{1.0, 1.0};
  bool has_diffusion = spec.contains("diffusion");
  if (has_diffusion) {
    d.d1 = require_number(spec["diffusion"], "d1");
    d.d2 = require_number(spec["diffusion"], "d2");
  }
  auto domain_from = [&](const json& j) -> Domain {
    return {require_number(j, "x_min"), require_number(j, "x_max"),
            require_number(j, "y_min"), require_number(j, "y_max")};
  };

  System sys;
  if (variant == "catalog") {
    if (!s.contains("name")) throw ConfigError("catalog system needs a 'name'");
    std::map<std::string, double> params;
    if (s.contains("params"))
      for (const auto& [k, v] : s["params"].items()) {
        if (!v.is_number()) throw ConfigError("catalog parameter '" + k + "' must be a number");
        params[k] = v.get<double>();
      }
    if (spec.contains("domain")) {
      // Catalog geometry is parameterized by the half-side L; designed-dw's
      // bump factor must vanish exactly on the wall, so arbitrary boxes are
      // rejected rather than silently breaking that construction.
      Domain dom = domain_from(spec["domain"]);
      if (dom.x_max != -dom.x_min || dom.y_max != -dom.y_min || dom.x_max != dom.y_max)
        throw ConfigError("catalog systems use centered square domains; set the "
                          "half-side via params.L (or use a custom/designed variant)");
      params["L"] = dom.x_max;
    }
    sys = make_catalog_system(s["name"].get<std::string>(), params);
    if (has_diffusion) sys = sys.with_diffusion(d);
  } else if (variant == "custom") {
    if (!s.contains("fx") || !s.contains("fy"))
      throw ConfigError("custom system needs 'fx' and 'fy' expressions");
    if (!spec.contains("domain")) throw ConfigError("custom system needs a 'domain' block");
    sys = make_custom_system(s["fx"].get<std::string>(), s["fy"].get<std::string>(),
                             domain_from(spec["domain"]), d);
  } else if (variant == "designed") {
    for (const char* key : {"phi", "a", "bump"})
      if (!s.contains(key))
        throw ConfigError(std::string("designed system needs a '") + key + "' expression");
    if (!spec.contains("domain")) throw ConfigError("designed system needs a 'domain' block");
    sys = make_designed_system(s["phi"].get<std::string>(), s["a"].get<std::string>(),
                               s["bump"].get<std::string>(), domain_from(spec["domain"]), d);
  } else {
    throw ConfigError("unknown system variant '" + variant +
                      "' (expected catalog, custom or designed)");
  }
  // The drift must evaluate finite on the closed domain.
  sample_drift(sys, Grid(sys.domain, 16, 16));
  return sys;
}

RunConfig load_config(const json& raw, const Overrides& ov) {
  RunConfig rc;
  rc.system = build_system(raw);

  if (!ov.grids.empty()) {
    rc.refine = ov.grids;
  } else if (raw.contains("grid")) {
    const json& g = raw["grid"];
    if (g.contains("refine"))
      rc.refine = int_list(g["refine"], "grid.refine");
    else if (g.contains("n"))
      rc.refine = int_list(nlohmann::json::array({g["n"]}), "grid.n");
    else
      throw ConfigError("grid block needs 'n' or 'refine'");
  } else {
    rc.refine = {128};
  }
  for (int n : rc.refine)
    if (n < 8) throw ConfigError("grid sizes must be >= 8");
  rc.grid_n = rc.refine.back();

  rc.constants_grids = raw.contains("constants") && raw["constants"].contains("grids")
                           ? int_list(raw["constants"]["grids"], "constants.grids")
                           : std::vector<int>{32, 64, 128};

  rc.q_list = !ov.q_list.empty() ? ov.q_list
              : raw.contains("q_list") ? number_list(raw["q_list"], "q_list")
                                       : std::vector<double>{1.5, 2.0, 3.0};
  for (double q : rc.q_list)
    if (!(q >= 1.0)) throw ConfigError("q_list entries must be >= 1");

  if (!ov.eps_list.empty())
    rc.eps_list = ov.eps_list;
  else if (raw.contains("eps_list"))
    rc.eps_list = number_list(raw["eps_list"], "eps_list");
  for (std::size_t k = 1; k < rc.eps_list.size(); ++k)
    if (!(rc.eps_list[k] < rc.eps_list[k - 1]))
      throw ConfigError("eps_list must be strictly descending");

  if (!ov.radii.empty())
    rc.radii = ov.radii;
  else if (raw.contains("radii"))
    rc.radii = number_list(raw["radii"], "radii");

  if (raw.contains("sim")) {
    const json& s = raw["sim"];
    rc.sim.dt = s.contains("dt") ? require_number(s, "dt") : rc.sim.dt;
    rc.sim.t_max = s.contains("t_max") ? require_number(s, "t_max") : rc.sim.t_max;
    if (s.contains("n_paths")) {
      double np = require_number(s, "n_paths");
      if (np < 1) throw ConfigError("sim.n_paths must be >= 1");
      rc.sim.n_paths = static_cast<int>(np);
    }
    if (s.contains("master_seed")) rc.sim.master_seed = s["master_seed"].get<std::uint64_t>();
    if (s.contains("thin")) rc.sim.thin = static_cast<int>(require_number(s, "thin"));
    if (s.contains("density_bins"))
      rc.density_bins = static_cast<int>(require_number(s, "density_bins"));
    if (s.contains("t_window")) rc.sim.t_window_hint = require_number(s, "t_window");
    if (s.contains("initial")) {
      if (s["initial"].is_string() && s["initial"] == "stationary") {
        rc.sim_stationary = true;
      } else if (s["initial"].is_array() && s["initial"].size() == 2) {
        rc.sim.initial_point = {s["initial"][0].get<double>(), s["initial"][1].get<double>()};
      } else {
        throw ConfigError("sim.initial must be \"stationary\" or [x, y]");
      }
    }
  }
  if (ov.has_seed) rc.sim.master_seed = ov.seed;
  if (ov.thin > 0) rc.sim.thin = ov.thin;

  rc.out_dir = !ov.out_dir.empty() ? ov.out_dir
               : raw.contains("output") && raw["output"].contains("dir")
                   ? raw["output"]["dir"].get<std::string>()
                   : "out";
  rc.oracle = ov.oracle || (raw.contains("output") && raw["output"].value("oracle", false));

  // Resolved config snapshot for provenance.
  json r = raw;
  r["grid"] = {{"refine", rc.refine}};
  r["constants"] = {{"grids", rc.constants_grids}};
  r["q_list"] = rc.q_list;
  if (!rc.eps_list.empty()) r["eps_list"] = rc.eps_list;
  if (!rc.radii.empty()) r["radii"] = rc.radii;
  r["sim"] = {{"dt", rc.sim.dt},
              {"t_max", rc.sim.t_max},
              {"n_paths", rc.sim.n_paths},
              {"master_seed", rc.sim.master_seed},
              {"thin", rc.sim.thin},
              {"t_window", rc.sim.t_window_hint},
              {"initial", rc.sim_stationary
                              ? json("stationary")
                              : json::array({rc.sim.initial_point.x, rc.sim.initial_point.y})}};
  r["output"] = {{"dir", rc.out_dir}, {"oracle", rc.oracle}};
  rc.resolved = r;
  rc.config_hash = fnv1a_hex(r.dump());
  return rc;
}

RunConfig load_config_file(const std::string& path, const Overrides& ov) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json raw;
  try {
    raw = json::parse(in);
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("config parse error: ") + err.what());
  }
  return load_config(raw, ov);
}

namespace {

json report_header(const RunConfig& rc) {
  return json{{"system", rc.system.name},
              {"grid", rc.grid_n},
              {"config", rc.resolved},
              {"config_hash", rc.config_hash}};
}

json oracle_table(const RunConfig& rc) {
  json table = json::array();
  double prev_err = 0.0;
  for (int n : rc.refine) {
    Grid grid(rc.system.domain, n, n);
    SteadyState state = solve_steady(rc.system, grid);
    DesignedGroundTruth gt = designed_ground_truth(rc.system, grid);
    double max_abs_err = 0.0, max_rho = 0.0, pointwise = 0.0;
    for (int c = 0; c < grid.cells(); ++c) {
      std::size_t k = static_cast<std::size_t>(c);
      double e = std::fabs(state.rho.v[k] - gt.rho.v[k]);
      max_abs_err = std::fmax(max_abs_err, e);
      max_rho = std::fmax(max_rho, gt.rho.v[k]);
      pointwise = std::fmax(pointwise, e / gt.rho.v[k]);
    }
    double linf = max_abs_err / max_rho;
    json row{{"n", n},
             {"h", std::max(grid.hx, grid.hy)},
             {"linf_rel_error", linf},
             {"pointwise_rel_error", pointwise}};
    if (prev_err > 0.0) row["observed_order"] = std::log2(prev_err / linf);
    prev_err = linf;
    table.push_back(row);
  }
  return table;
}

}  // namespace

json solve_report(const RunConfig& rc) {
  Grid grid(rc.system.domain, rc.grid_n, rc.grid_n);
  SteadyState state = solve_steady(rc.system, grid);
  json j = report_header(rc);
  j["residual_linf"] = state.residual_linf;
  j["iterations"] = state.iterations;
  j["mass_prenorm"] = state.mass_prenorm;
  j["min_rho"] = *std::min_element(state.rho.v.begin(), state.rho.v.end());
  j["max_rho"] = *std::max_element(state.rho.v.begin(), state.rho.v.end());
  ScalarField div = face_divergence(state.current);
  double net = 0.0;
  for (double v : div.v) net += v;
  j["net_divergence"] = net * grid.cell_area();
  return j;
}

int run_solve(const RunConfig& rc) {
  Grid grid(rc.system.domain, rc.grid_n, rc.grid_n);
  SteadyState state = solve_steady(rc.system, grid);
  std::filesystem::path out(rc.out_dir);
  write_rho_csv(out / "rho.csv", state.rho);
  write_rho_binary(out / "rho.bin", state.rho);
  json j = solve_report(rc);
  if (rc.oracle && rc.system.designed) j["oracle"] = oracle_table(rc);
  write_json(out / "solve.json", j);
  return kExitOk;
}

json functionals_report(const RunConfig& rc) {
  Grid grid(rc.system.domain, rc.grid_n, rc.grid_n);
  SteadyState state = solve_steady(rc.system, grid);
  Decomposition dec = decompose(rc.system, state);
  FunctionalSet fs = compute_functionals(rc.system, state, dec, rc.q_list);
  StreamFunction sf = stream_and_a(state, dec);
  json j = report_header(rc);
  j["functionals"] = to_json(fs);
  j["stream"] = {{"path_dependence", sf.path_dependence}};
  j["residual_linf"] = state.residual_linf;
  return j;
}

int run_functionals(const RunConfig& rc) {
  Grid grid(rc.system.domain, rc.grid_n, rc.grid_n);
  SteadyState state = solve_steady(rc.system, grid);
  Decomposition dec = decompose(rc.system, state);
  FunctionalSet fs = compute_functionals(rc.system, state, dec, rc.q_list);
  StreamFunction sf = stream_and_a(state, dec);

  std::filesystem::path out(rc.out_dir);
  json j = report_header(rc);
  j["functionals"] = to_json(fs);
  j["stream"] = {{"path_dependence", sf.path_dependence}};
  j["residual_linf"] = state.residual_linf;
  write_json(out / "functionals.json", j);

  ScalarField firr_x{state.rho.grid}, firr_y{state.rho.grid};
  firr_x.v = dec.f_irr.vx;
  firr_y.v = dec.f_irr.vy;
  write_fields_csv(out / "fields.csv", {{"rho", &state.rho},
                                        {"phi", &dec.phi},
                                        {"f_irr_x", &firr_x},
                                        {"f_irr_y", &firr_y},
                                        {"curl_f_irr", &dec.curl_f_irr},
                                        {"psi", &sf.psi},
                                        {"a", &sf.a}});
  return kExitOk;
}

json constants_report(const RunConfig& rc) {
  DomainConstants dc = estimate_constants(rc.system.domain, rc.constants_grids);
  json j = report_header(rc);
  j["constants"] = to_json(dc);
  return j;
}

int run_constants(const RunConfig& rc) {
  write_json(std::filesystem::path(rc.out_dir) / "constants.json", constants_report(rc));
  return kExitOk;
}

json certify_report(const RunConfig& rc) {
  json j = report_header(rc);
  json stages = json::object();
  bool numeric_failure = false;

  SteadyState state;
  Decomposition dec;
  FunctionalSet fs;
  DomainConstants dc;
  bool have_state = false, have_constants = false;

  try {
    Grid grid(rc.system.domain, rc.grid_n, rc.grid_n);
    state = solve_steady(rc.system, grid);
    dec = decompose(rc.system, state);
    fs = compute_functionals(rc.system, state, dec, rc.q_list);
    have_state = true;
    stages["solve"] = "ok";
    j["functionals"] = to_json(fs);
    j["residual_linf"] = state.residual_linf;
  } catch (const std::exception& err) {
    stages["solve"] = err.what();
    numeric_failure = true;
  }

  try {
    dc = estimate_constants(rc.system.domain, rc.constants_grids);
    have_constants = true;
    stages["constants"] = "ok";
    j["constants"] = to_json(dc);
  } catch (const std::exception& err) {
    stages["constants"] = err.what();
    numeric_failure = true;
  }

  bool any_violation = false;
  if (have_state && have_constants) {
    try {
      double lmin = rc.system.diffusion.lambda_min();
      json checks = json::array();
      auto add = [&](const BoundCheck& b) {
        checks.push_back(to_json(b));
        if (!b.holds) any_violation = true;
      };
      add(check_theorem1(fs, dc.c2, lmin));
      for (double q : rc.q_list)
        if (q > 1.0) add(check_theorem2(fs, dc.c2, lmin, q));
      auto [c1f, c2f] = check_corollary_bounds(fs, dec, dc.c2, lmin);
      add(c1f);
      add(c2f);
      j["checks"] = checks;
      stages["checks"] = "ok";
    } catch (const std::exception& err) {
      stages["checks"] = err.what();
      numeric_failure = true;
    }
  }

  if (!rc.eps_list.empty() && have_constants) {
    try {
      SweepResult sr = fw_sweep(rc.system, rc.eps_list, rc.grid_n, dc.c2);
      j["sweep"] = to_json(sr);
      for (const auto& r : sr.records)
        if (!r.epr_within_bound) any_violation = true;
      stages["sweep"] = sr.truncated ? "truncated: " + sr.truncation_error : "ok";
    } catch (const std::exception& err) {
      stages["sweep"] = err.what();
      numeric_failure = true;
    }
  }

  if (!rc.radii.empty() && have_state) {
    try {
      j["locality"] = to_json(parabolic_locality(rc.system, state, dec, rc.radii));
      stages["locality"] = "ok";
    } catch (const std::exception& err) {
      stages["locality"] = err.what();
      numeric_failure = true;
    }
  }

  if (rc.oracle && rc.system.designed) {
    try {
      j["oracle"] = oracle_table(rc);
      stages["oracle"] = "ok";
    } catch (const std::exception& err) {
      stages["oracle"] = err.what();
      numeric_failure = true;
    }
  }

  j["stages"] = stages;
  j["exit_code"] = numeric_failure ? kExitNumeric
                   : any_violation ? kExitBoundViolation
                                   : kExitOk;
  return j;
}

int run_certify(const RunConfig& rc) {
  json j = certify_report(rc);
  std::filesystem::path out(rc.out_dir);
  write_json(out / "report.json", j);

  std::string csv = "check,lhs,rhs,constant,margin,holds\n";
  auto cell = [](const json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "nan";
    return csv_double(v.get<double>());
  };
  if (j.contains("checks"))
    for (const auto& c : j["checks"])
      csv += c["name"].get<std::string>() + "," + cell(c["lhs"]) + "," + cell(c["rhs"]) + "," +
             cell(c["constant_used"]) + "," + cell(c["margin"]) + "," +
             (c["holds"].get<bool>() ? "true" : "false") + "\n";
  write_text_file(out / "report.csv", csv);
  return j["exit_code"].get<int>();
}

json sweep_report(const RunConfig& rc) {
  if (rc.eps_list.empty()) throw ConfigError("sweep-eps needs a non-empty eps_list");
  DomainConstants dc = estimate_constants(rc.system.domain, rc.constants_grids);
  SweepResult sr = fw_sweep(rc.system, rc.eps_list, rc.grid_n, dc.c2);
  json j = report_header(rc);
  j["constants"] = to_json(dc);
  j["sweep"] = to_json(sr);
  return j;
}

int run_sweep(const RunConfig& rc) {
  json j = sweep_report(rc);
  write_json(std::filesystem::path(rc.out_dir) / "sweep.json", j);
  for (const auto& r : j["sweep"]["records"])
    if (!r["epr_within_bound"].get<bool>()) return kExitBoundViolation;
  return kExitOk;
}

json locality_report(const RunConfig& rc) {
  if (rc.radii.empty()) throw ConfigError("locality needs a non-empty radii list");
  Grid grid(rc.system.domain, rc.grid_n, rc.grid_n);
  SteadyState state = solve_steady(rc.system, grid);
  Decomposition dec = decompose(rc.system, state);
  json j = report_header(rc);
  j["locality"] = to_json(parabolic_locality(rc.system, state, dec, rc.radii));
  return j;
}

int run_locality(const RunConfig& rc) {
  write_json(std::filesystem::path(rc.out_dir) / "locality.json", locality_report(rc));
  return kExitOk;
}

namespace {

struct SimulatePipeline {
  json report;
  Ensemble ens;
};

SimulatePipeline simulate_pipeline(const RunConfig& rc) {
  Grid grid(rc.system.domain, rc.grid_n, rc.grid_n);
  SteadyState state = solve_steady(rc.system, grid);
  Decomposition dec = decompose(rc.system, state);
  FunctionalSet fs = compute_functionals(rc.system, state, dec, {});
  DomainConstants dc = estimate_constants(rc.system.domain, rc.constants_grids);
  BoundCheck th1 = check_theorem1(fs, dc.c2, rc.system.diffusion.lambda_min());

  SimConfig sim = rc.sim;
  if (rc.sim_stationary) {
    sim.stationary_initial = true;
    sim.initial_density = std::make_shared<ScalarField>(state.rho);
  }
  Ensemble ens = simulate(rc.system, sim);
  EstimatorResult epr_mc = epr_estimator(ens, dec, rc.system.diffusion);
  EstimatorResult tur = tur_lower_bound(ens, dec.f_irr, sim.t_window_hint);

  json j = report_header(rc);
  j["estimators"] = {{"epr_mc", to_json(epr_mc)}, {"tur_lower", to_json(tur)}};
  j["sandwich"] = {{"tur_lower", tur.value},
                   {"epr_mc", epr_mc.value},
                   {"epr_quadrature", fs.epr},
                   {"theorem1_rhs", th1.rhs}};
  j["sandwich_ok"] =
      tur.value <= epr_mc.value + 3.0 * (tur.std_error + epr_mc.std_error) &&
      epr_mc.value <= th1.rhs * (1.0 + 1e-9);
  long reflections = 0;
  for (const auto& p : ens.paths) reflections += p.n_reflections;
  j["n_reflections"] = reflections;
  return {j, std::move(ens)};
}

}  // namespace

json simulate_report(const RunConfig& rc) { return simulate_pipeline(rc).report; }

int run_simulate(const RunConfig& rc) {
  SimulatePipeline pipe = simulate_pipeline(rc);
  std::filesystem::path out(rc.out_dir);
  write_json(out / "estimators.json", pipe.report);
  if (rc.density_bins > 0) {
    ScalarField hist = binned_density(pipe.ens, rc.density_bins, rc.density_bins);
    write_rho_csv(out / "binned_density.csv", hist);
  }
  return pipe.report["sandwich_ok"].get<bool>() ? kExitOk : kExitBoundViolation;
}

}  // namespace eprbound
