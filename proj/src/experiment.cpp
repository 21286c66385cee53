#include <cmath>
#include <exception>
#include <functional>
#include <sstream>

#include "jcsta/cli.hpp"
#include "jcsta/errors.hpp"
#include "jcsta/format.hpp"

namespace jcsta {

using nlohmann::json;

namespace {

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

RunOptions make_opts(const ExperimentConfig& cfg, DriveMode drive) {
  RunOptions o;
  o.drive = drive;
  o.evolution = cfg.evolution;
  if (cfg.noise.any()) o.noise = cfg.noise;
  o.noise_during_pulses = cfg.noise_during_pulses;
  if (cfg.fourier_enabled && drive == DriveMode::lcd) o.fourier = cfg.fourier;
  o.leak_tolerance = cfg.leak_tolerance;
  return o;
}

json sample_json(const TimeSample& s) {
  return {{"t", s.t},
          {"mean_n", s.mean_n},
          {"mandel_q", num(s.mandel_q)},
          {"spin_purity", s.spin_purity},
          {"excited_population", s.excited_population},
          {"excitation_number", s.excitation_number},
          {"trace", s.trace}};
}

std::string series_csv(const std::vector<TimeSample>& series) {
  std::string out = "t,mean_n,mandel_q,spin_purity,excited_population,excitation_number,trace\n";
  for (const auto& s : series)
    out += csv_row({s.t, s.mean_n, s.mandel_q, s.spin_purity, s.excited_population, s.excitation_number, s.trace});
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Runs fn(i) for every row; a failing row records its message instead of aborting the rest.
std::vector<json> map_rows(int n, const std::function<json(int)>& fn, std::vector<std::string>& errors) {
  std::vector<json> rows(n);
  errors.assign(n, "");
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      rows[i] = fn(i);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  return rows;
}

double joint_fidelity(const SystemState& s, int idx) {
  if (s.is_pure()) return std::norm(s.vector()(idx));
  return s.matrix()(idx, idx).real();
}

ProtocolPlan fock_time_independent(ProtocolPlan plan, double lambda, double omega) {
  for (auto& step : plan.steps)
    if (const auto* s = std::get_if<StaStep>(&step)) {
      const double t = kPi / (2.0 * lambda * std::sqrt(s->n_ref + 1.0));
      step = StaticJcStep{s->n_ref, t, omega, lambda};
    }
  plan.name = "fock_time_independent";
  return plan;
}

// ---------------------------------------------------------------- fock

ProtocolPlan fock_plan(const ExperimentConfig& cfg, int N) {
  ProtocolPlan plan = plan_fock(N, cfg.base, cfg.pulse, cfg.space);
  if (cfg.beta_th) plan.initial = {InitialState::Kind::thermal, Spin::e, 0, 0.0, *cfg.beta_th};
  return plan;
}

json fock_metrics(const ExperimentConfig& cfg, const ProtocolResult& res, int N) {
  const double F = joint_fidelity(res.final_state, cfg.space.index(Spin::e, N));
  json j = {{"fidelity", F}, {"infidelity", 1.0 - F}};
  j["rung_transfer"] = res.rung_transfer;
  j["transfer_infidelity"] = res.rung_transfer.empty() ? 1.0 : 1.0 - res.rung_transfer.front();
  return j;
}

ExperimentOutput run_fock(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  const ProtocolPlan plan = fock_plan(cfg, cfg.N);
  const ProtocolResult res = run_plan(plan, cfg.space, make_opts(cfg, cfg.drive));
  json& s = out.summary;
  s.update(fock_metrics(cfg, res, cfg.N));
  s["N"] = cfg.N;
  s["duration"] = res.duration;
  s["cycle_time"] = plan.cycle_time();
  s["max_leak"] = res.max_leak;

  json cps = json::array();
  for (const auto& c : res.checkpoints) {
    json e = sample_json(c.sample);
    e["label"] = c.label;
    cps.push_back(e);
  }
  s["checkpoints"] = cps;

  // per cycle n: Q and p at n t_c, p halfway through the n-th transfer
  json cycles = json::array();
  for (int n = 1; n <= cfg.N; ++n) {
    const std::string mid = "step" + std::to_string(2 * n - 2) + "_sta_mid";
    const std::string end = "step" + std::to_string(2 * n - 1) + "_pulse_end";
    json c = {{"n", n}};
    for (const auto& cp : res.checkpoints) {
      if (cp.label == mid) c["p_mid"] = cp.sample.spin_purity;
      if (cp.label == end) {
        c["t"] = cp.sample.t;
        c["mandel_q"] = num(cp.sample.mandel_q);
        c["spin_purity"] = cp.sample.spin_purity;
      }
    }
    cycles.push_back(c);
  }
  s["cycles"] = cycles;

  if (!res.series.empty()) {
    double qmin = INFINITY, qmax = -INFINITY;
    for (const auto& t : res.series)
      if (std::isfinite(t.mandel_q)) {
        qmin = std::min(qmin, t.mandel_q);
        qmax = std::max(qmax, t.mandel_q);
      }
    s["mandel_q_min"] = num(qmin);
    s["mandel_q_max"] = num(qmax);
    out.files["series.csv"] = series_csv(res.series);
  }

  json baselines = json::object();
  for (const auto& b : cfg.baselines) {
    ExperimentConfig bc = cfg;
    bc.evolution.sample_interval = 0.0;
    ProtocolResult br = b == "bare" ? run_plan(plan, cfg.space, make_opts(bc, DriveMode::bare))
                                    : run_plan(fock_time_independent(plan, cfg.base.lambda_m, cfg.space.omega),
                                               cfg.space, make_opts(bc, DriveMode::bare));
    json m = fock_metrics(cfg, br, cfg.N);
    if (!br.checkpoints.empty() && std::isfinite(br.checkpoints.back().sample.mandel_q))
      m["final_mandel_q"] = br.checkpoints.back().sample.mandel_q;
    baselines[b] = m;
  }
  s["baselines"] = baselines;
  out.files["plan.json"] = dump(plan.to_json());
  return out;
}

// ---------------------------------------------------------------- cat

struct CatRun {
  json branches;
  Matrix primary_boson;
  ProtocolResult result;
};

ProtocolPlan strip_measure(ProtocolPlan plan) {
  if (!plan.steps.empty() && std::holds_alternative<MeasureStep>(plan.steps.back())) plan.steps.pop_back();
  return plan;
}

CatRun run_cat_plan(const ProtocolPlan& plan, const ExperimentConfig& cfg, const RunOptions& opts) {
  CatRun out{json::object(), Matrix(), run_plan(strip_measure(plan), cfg.space, opts)};
  for (Spin r : {Spin::e, Spin::g}) {
    const char* key = r == Spin::e ? "e" : "g";
    try {
      const Measurement m = project_spin(out.result.final_state, r);
      const Matrix rho_b = reduce_boson(m.state);
      const double phi = extract_phase(rho_b, cfg.n_low, cfg.n_high);
      const double F = fidelity(rho_b, cat_target(cfg.n_low, cfg.n_high, phi, cfg.space.fock_dim));
      out.branches[key] = {{"probability", m.probability}, {"fidelity", F}, {"phi", phi}};
      if (r == cfg.measure) out.primary_boson = rho_b;
    } catch (const NumericalError& e) {
      if (r == cfg.measure) throw;
      out.branches[key] = {{"error", e.what()}};
    }
  }
  return out;
}

json cat_primary(const CatRun& run, Spin r) {
  const json& b = run.branches[r == Spin::e ? "e" : "g"];
  return {{"fidelity", b["fidelity"]},
          {"infidelity", 1.0 - b["fidelity"].get<double>()},
          {"phi", b["phi"]},
          {"probability", b["probability"]}};
}

ExperimentOutput run_cat(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  const ProtocolPlan plan = plan_cat(cfg.n_low, cfg.n_high, cfg.base, cfg.pulse, cfg.measure, cfg.space);
  const CatRun run = run_cat_plan(plan, cfg, make_opts(cfg, cfg.drive));
  json& s = out.summary;
  s.update(cat_primary(run, cfg.measure));
  s["measure"] = cfg.measure == Spin::e ? "e" : "g";
  s["branches"] = run.branches;
  s["duration"] = run.result.duration;
  s["max_leak"] = run.result.max_leak;
  json baselines = json::object();
  for (const auto& b : cfg.baselines) {
    ExperimentConfig bc = cfg;
    bc.evolution.sample_interval = 0.0;
    const ProtocolPlan bp =
        b == "bare" ? plan
                    : plan_cat_time_independent(cfg.n_low, cfg.n_high, cfg.base.lambda_m, cfg.pulse, cfg.measure,
                                                cfg.space);
    baselines[b] = run_cat_plan(bp, bc, make_opts(bc, DriveMode::bare)).branches;
  }
  s["baselines"] = baselines;
  if (cfg.wigner_enabled) {
    const WignerGrid g = wigner(run.primary_boson, cfg.wigner);
    s["negativity"] = negativity(g);
    std::ostringstream csv;
    write_wigner_csv(csv, g);
    out.files["wigner.csv"] = csv.str();
    out.files["wigner.json"] = dump(wigner_sidecar(g));
  }
  if (!run.result.series.empty()) out.files["series.csv"] = series_csv(run.result.series);
  out.files["plan.json"] = dump(plan.to_json());
  return out;
}

// ---------------------------------------------------------------- photon shift

InitialState shift_initial(const ExperimentConfig& cfg) {
  if (cfg.beta_th) return {InitialState::Kind::thermal, Spin::e, 0, 0.0, *cfg.beta_th};
  return {InitialState::Kind::coherent, Spin::e, 0, cfg.alpha, 0.0};
}

struct ShiftRun {
  json metrics;
  WignerGrid sta, added;
  ProtocolResult result;
  ProtocolPlan plan;
};

ShiftRun run_shift(const ExperimentConfig& cfg) {
  const InitialState init = shift_initial(cfg);
  ProtocolPlan plan = plan_photon_shift(cfg.repetitions, cfg.base, cfg.pulse, init, cfg.space);
  ProtocolResult res = run_plan(plan, cfg.space, make_opts(cfg, cfg.drive));
  const Matrix rho_b = reduce_boson(res.final_state);
  const Matrix rho0 = reduce_boson(init.build(cfg.space));
  const Matrix ref = photon_added_reference(rho0, cfg.repetitions);
  ShiftRun out{json::object(), wigner(rho_b, cfg.wigner), wigner(ref, cfg.wigner), std::move(res), std::move(plan)};
  const double n_sta = negativity(out.sta), n_add = negativity(out.added);
  json& m = out.metrics;
  m["negativity_sta"] = n_sta;
  m["negativity_added"] = n_add;
  m["negativity_ratio"] = n_add > 0.0 ? json(n_sta / n_add) : json(nullptr);
  m["wigner_integral"] = out.sta.integral();
  m["wigner_edge_max"] = out.sta.edge_max();
  m["wigner_imag_residue"] = out.sta.max_imag_residue;
  m["overlap_added"] = (rho_b * ref).trace().real();
  m["spin_excited"] = reduce_spin(out.result.final_state)(1, 1).real();
  m["purity"] = purity(rho_b);
  m["max_leak"] = out.result.max_leak;
  return out;
}

ExperimentOutput run_photon_shift(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  ShiftRun run = run_shift(cfg);
  out.summary = run.metrics;
  out.summary["repetitions"] = cfg.repetitions;
  out.summary["duration"] = run.result.duration;
  if (cfg.wigner_enabled) {
    for (const auto& [name, grid] : {std::pair<std::string, const WignerGrid*>{"wigner_sta", &run.sta},
                                     std::pair<std::string, const WignerGrid*>{"wigner_added", &run.added}}) {
      std::ostringstream csv;
      write_wigner_csv(csv, *grid);
      out.files[name + ".csv"] = csv.str();
      out.files[name + ".json"] = dump(wigner_sidecar(*grid));
    }
  }
  if (!run.result.series.empty()) out.files["series.csv"] = series_csv(run.result.series);
  out.files["plan.json"] = dump(run.plan.to_json());
  return out;
}

// ---------------------------------------------------------------- pulses

ExperimentOutput run_pulse_export(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  json pulses = json::array();
  for (int n : cfg.pulse_n_refs) {
    std::ostringstream csv;
    write_pulse_csv(csv, cfg.base, n, cfg.pulse_samples);
    const std::string name = "pulse_n" + std::to_string(n) + ".csv";
    out.files[name] = csv.str();
    const LcdFields a = lcd_fields(cfg.base, n, 0.0), b = lcd_fields(cfg.base, n, cfg.base.tau);
    json e = {{"n_ref", n},
              {"file", name},
              {"omega_q_tilde_start", a.omega_q},
              {"omega_q_tilde_end", b.omega_q},
              {"lambda_tilde_start", a.lambda},
              {"lambda_tilde_end", b.lambda}};
    if (cfg.fourier_enabled) {
      const FourierPulse wq = fit_lcd_pulse(cfg.base, n, FieldSource::omega_q_tilde, cfg.fourier.n_modes,
                                            cfg.fourier.omega_F, cfg.fourier.samples);
      const FourierPulse lam = fit_lcd_pulse(cfg.base, n, FieldSource::lambda_tilde, cfg.fourier.n_modes,
                                             cfg.fourier.omega_F, cfg.fourier.samples);
      e["fourier"] = {{"n_modes", cfg.fourier.n_modes},
                      {"omega_q_tilde", {{"omega_F", wq.omega_F}, {"c", wq.c}, {"s", wq.s}, {"residual", wq.residual}}},
                      {"lambda_tilde", {{"omega_F", lam.omega_F}, {"c", lam.c}, {"s", lam.s}, {"residual", lam.residual}}}};
    }
    pulses.push_back(e);
  }
  out.summary["pulses"] = pulses;
  return out;
}

// ---------------------------------------------------------------- robustness

// Target metrics used by the robustness studies.
json target_metrics(const ExperimentConfig& cfg) {
  switch (cfg.target) {
    case ExperimentKind::fock: {
      const ProtocolPlan plan = fock_plan(cfg, cfg.N);
      return fock_metrics(cfg, run_plan(plan, cfg.space, make_opts(cfg, cfg.drive)), cfg.N);
    }
    case ExperimentKind::cat: {
      const ProtocolPlan plan = plan_cat(cfg.n_low, cfg.n_high, cfg.base, cfg.pulse, cfg.measure, cfg.space);
      return cat_primary(run_cat_plan(plan, cfg, make_opts(cfg, cfg.drive)), cfg.measure);
    }
    default: {
      json m = run_shift(cfg).metrics;
      return {{"negativity_sta", m["negativity_sta"]}, {"negativity_added", m["negativity_added"]}};
    }
  }
}

std::string table_csv(const std::vector<std::string>& keys, const std::vector<json>& rows,
                      const std::vector<std::string>& errors) {
  std::string out;
  for (size_t k = 0; k < keys.size(); ++k) out += (k ? "," : "") + keys[k];
  out += ",error\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t k = 0; k < keys.size(); ++k) {
      if (k) out += ',';
      const json& v = rows[i].is_object() && rows[i].contains(keys[k]) ? rows[i][keys[k]] : json(nullptr);
      if (v.is_number()) out += fmt_num(v.get<double>());
      else if (v.is_string()) out += v.get<std::string>();
      else if (!v.is_null()) out += v.dump();
    }
    out += ',' + errors[i] + '\n';
  }
  return out;
}

json rows_json(const std::vector<json>& rows, const std::vector<std::string>& errors) {
  json arr = json::array();
  for (size_t i = 0; i < rows.size(); ++i) {
    json r = rows[i];
    if (!errors[i].empty()) r["error"] = errors[i];
    arr.push_back(r);
  }
  return arr;
}

ExperimentOutput run_fourier(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  const int n = static_cast<int>(cfg.fourier_modes.size());
  std::vector<std::string> errors;
  ExperimentConfig base = cfg;
  base.evolution.sample_interval = 0.0;
  base.wigner_enabled = false;
  auto rows = map_rows(n + 1, [&](int i) {
    ExperimentConfig c = base;
    c.fourier_enabled = i < n;
    if (i < n) c.fourier.n_modes = cfg.fourier_modes[i];
    json m = target_metrics(c);
    m["n_modes"] = i < n ? json(cfg.fourier_modes[i]) : json("exact");
    return m;
  }, errors);
  for (int i = 0; i <= n; ++i)
    if (!errors[i].empty()) rows[i] = {{"n_modes", i < n ? json(cfg.fourier_modes[i]) : json("exact")}};
  out.summary["target"] = experiment_name(cfg.target);
  out.summary["rows"] = rows_json(rows, errors);
  std::vector<std::string> keys = {"n_modes"};
  if (cfg.target == ExperimentKind::fock) keys.insert(keys.end(), {"fidelity", "infidelity", "transfer_infidelity"});
  else if (cfg.target == ExperimentKind::cat) keys.insert(keys.end(), {"fidelity", "infidelity", "phi"});
  else keys.insert(keys.end(), {"negativity_sta", "negativity_added"});
  out.files["fourier.csv"] = table_csv(keys, rows, errors);
  return out;
}

NoiseRates channel_rates(const std::string& ch, double g) {
  NoiseRates r;
  if (ch == "sm" || ch == "all") r.gamma_sm = g;
  if (ch == "sz" || ch == "all") r.gamma_sz = g;
  if (ch == "a" || ch == "a+ad" || ch == "all") r.gamma_a = g;
  if (ch == "ad" || ch == "a+ad" || ch == "all") r.gamma_ad = g;
  return r;
}

ExperimentOutput run_noise(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  struct Point {
    std::string channel;
    double rate;
  };
  std::vector<Point> pts = {{"none", 0.0}};
  for (const auto& ch : cfg.noise_channels)
    for (double g : cfg.noise_rates) pts.push_back({ch, g});
  std::vector<std::string> errors;
  ExperimentConfig base = cfg;
  base.evolution.sample_interval = 0.0;
  auto rows = map_rows(static_cast<int>(pts.size()), [&](int i) {
    ExperimentConfig c = base;
    c.noise = channel_rates(pts[i].channel, pts[i].rate);
    json m = target_metrics(c);
    m["channel"] = pts[i].channel;
    m["rate"] = pts[i].rate;
    return m;
  }, errors);
  for (size_t i = 0; i < pts.size(); ++i)
    if (!errors[i].empty()) rows[i] = {{"channel", pts[i].channel}, {"rate", pts[i].rate}};
  out.summary["target"] = experiment_name(cfg.target);
  out.summary["rows"] = rows_json(rows, errors);
  std::vector<std::string> keys = {"channel", "rate"};
  if (cfg.target == ExperimentKind::photon_shift) keys.insert(keys.end(), {"negativity_sta", "negativity_added"});
  else keys.insert(keys.end(), {"fidelity", "infidelity"});
  out.files["noise.csv"] = table_csv(keys, rows, errors);
  return out;
}

// ---------------------------------------------------------------- thermal

ExperimentOutput run_thermal(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  const int nn = static_cast<int>(cfg.thermal_targets.size());
  const int nt = static_cast<int>(cfg.thermal_n_th.size());
  std::vector<std::string> errors;
  ExperimentConfig base = cfg;
  base.evolution.sample_interval = 0.0;
  auto rows = map_rows(nn * nt, [&](int i) {
    ExperimentConfig c = base;
    const int N = cfg.thermal_targets[i / nt];
    const double n_th = cfg.thermal_n_th[i % nt];
    c.beta_th = std::log1p(1.0 / n_th) / cfg.space.omega;
    const ProtocolResult res = run_plan(fock_plan(c, N), c.space, make_opts(c, c.drive));
    const double F = joint_fidelity(res.final_state, c.space.index(Spin::e, N));
    return json{{"N", N}, {"n_th", n_th}, {"beta_th", *c.beta_th}, {"fidelity", F}, {"infidelity", 1.0 - F}};
  }, errors);

  for (const auto& e : errors)
    if (!e.empty()) throw NumericalError("thermal sweep row failed: " + e);

  // least squares through the origin, R^2 against the mean
  json fits = json::array();
  for (int a = 0; a < nn; ++a) {
    double sxy = 0, sxx = 0, mean = 0;
    for (int b = 0; b < nt; ++b) {
      const double x = cfg.thermal_n_th[b], y = rows[a * nt + b]["infidelity"].get<double>();
      sxy += x * y;
      sxx += x * x;
      mean += y / nt;
    }
    const double slope = sxy / sxx;
    double ss_res = 0, ss_tot = 0;
    for (int b = 0; b < nt; ++b) {
      const double x = cfg.thermal_n_th[b], y = rows[a * nt + b]["infidelity"].get<double>();
      ss_res += (y - slope * x) * (y - slope * x);
      ss_tot += (y - mean) * (y - mean);
    }
    fits.push_back({{"N", cfg.thermal_targets[a]}, {"slope", slope}, {"r_squared", ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0}});
  }
  double spread = 0.0;
  for (int b = 0; b < nt; ++b) {
    double lo = INFINITY, hi = -INFINITY;
    for (int a = 0; a < nn; ++a) {
      const double y = rows[a * nt + b]["infidelity"].get<double>();
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    spread = std::max(spread, hi - lo);
  }
  out.summary["rows"] = rows;
  out.summary["fits"] = fits;
  out.summary["max_spread_across_N"] = nn > 0 && nt > 0 ? spread : 0.0;
  out.files["thermal.csv"] = table_csv({"N", "n_th", "beta_th", "fidelity", "infidelity"}, rows, errors);
  return out;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  switch (cfg.experiment) {
    case ExperimentKind::fock: out = run_fock(cfg); break;
    case ExperimentKind::cat: out = run_cat(cfg); break;
    case ExperimentKind::photon_shift: out = run_photon_shift(cfg); break;
    case ExperimentKind::pulse_export: out = run_pulse_export(cfg); break;
    case ExperimentKind::robustness_fourier: out = run_fourier(cfg); break;
    case ExperimentKind::robustness_noise: out = run_noise(cfg); break;
    case ExperimentKind::thermal_sweep: out = run_thermal(cfg); break;
  }
  out.summary["experiment"] = experiment_name(cfg.experiment);
  out.summary["config"] = cfg.resolved;
  return out;
}

}  // namespace jcsta
