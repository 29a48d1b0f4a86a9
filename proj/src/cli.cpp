// Copyright 2026 The pgflow Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "pgflow/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <type_traits>

#include "CLI11.hpp"
#include "pgflow/continuous.hpp"
#include "pgflow/discrete.hpp"
#include "pgflow/errors.hpp"
#include "pgflow/experiments.hpp"
#include "pgflow/report_io.hpp"
#include "pgflow/rng.hpp"

namespace fs = std::filesystem;

namespace pgflow {
namespace {

/// Binds [verify] keys to experiment parameters; finish() rejects the rest.
class ExperimentParams {
 public:
  ExperimentParams(const RunConfig& cfg, std::string experiment)
      : cfg_(cfg), experiment_(std::move(experiment)) {}

  template <class T>
  ExperimentParams& bind(const std::string& key, T& out) {
    valid_.push_back(key);
    const auto it = cfg_.experiment_params.find(key);
    if (it == cfg_.experiment_params.end()) return *this;
    const std::string what = "verify." + key;
    if constexpr (std::is_same_v<T, double>) {
      out = parse_double(it->second, what);
    } else if constexpr (std::is_same_v<T, bool>) {
      out = parse_bool(it->second, what);
    } else if constexpr (std::is_integral_v<T>) {
      out = static_cast<T>(parse_u64(it->second, what));
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      out = parse_list(it->second, what);
    } else {
      static_assert(std::is_same_v<T, std::string>);
      out = it->second;
    }
    return *this;
  }

  void finish() const {
    for (const auto& [k, v] : cfg_.experiment_params) {
      (void)v;
      if (std::find(valid_.begin(), valid_.end(), k) == valid_.end()) {
        std::string list;
        for (const auto& s : valid_) list += (list.empty() ? "" : ", ") + s;
        throw ConfigError("unknown key 'verify." + k + "' for experiment " + experiment_ +
                          "; valid keys: experiment, " + list);
      }
    }
  }

 private:
  const RunConfig& cfg_;
  std::string experiment_;
  std::vector<std::string> valid_;
};

template <class P>
void apply_common(const RunConfig& cfg, P& p) {
  p.seed = cfg.seed;
  p.threads = cfg.threads;
  if (cfg.n_paths_given) p.n_paths = cfg.n_paths;
}

double end_time(const RunConfig& cfg) {
  if (cfg.T > 0.0) return cfg.T;
  if (cfg.n_steps > 0) return cfg.step() * static_cast<double>(cfg.n_steps);
  if (cfg.mode == "vr-pgf")
    return static_cast<double>(cfg.n_epochs * cfg.epoch_steps) * cfg.adj.h;
  throw ConfigError("simulation.T or simulation.n_steps is required for mode " + cfg.mode);
}

PathRunner make_runner(const RunConfig& cfg, const ProblemPtr& p, const Vector& x0,
                       const RecordOptions& rec) {
  const VolatilityMode vol = cfg.sigma ? VolatilityMode::constant_scalar(p->dim(), *cfg.sigma)
                                       : VolatilityMode::state_dependent();
  const std::string& mode = cfg.mode;
  if (mode == "sgd" || mode == "pgd") {
    if (cfg.n_steps == 0 && cfg.T <= 0.0)
      throw ConfigError("simulation.n_steps or simulation.T is required for mode " + mode);
    const std::size_t n = cfg.steps();
    const bool sgd = mode == "sgd";
    return [=](std::size_t, Rng& rng) {
      return sgd ? run_mb_sgd(*p, cfg.adj, cfg.batch, x0, n, rng, rec)
                 : run_pgd(*p, cfg.adj, cfg.batch, x0, n, rng, rec);
    };
  }
  if (mode == "svrg") {
    if (cfg.adj.family != PsiFamily::kConstant || !cfg.batch.is_constant() || cfg.batch.b0 != 1.0)
      throw ConfigError("mode svrg requires psi = constant and batch = constant 1");
    return [=](std::size_t, Rng& rng) {
      return run_svrg_option2(*p, cfg.adj.h, cfg.epoch_steps, cfg.n_epochs, x0, rng, rec);
    };
  }
  const double dt = cfg.step();
  const double T = end_time(cfg);
  if (mode == "mb-pgf")
    return [=](std::size_t, Rng& rng) {
      return simulate_mb_pgf(*p, cfg.adj, cfg.batch, x0, dt, T, rng, vol, rec);
    };
  if (mode == "time-changed")
    return [=](std::size_t, Rng& rng) {
      return simulate_time_changed(*p, cfg.adj, cfg.batch, x0, dt, T, rng, vol, rec);
    };
  const StalenessSchedule stale{cfg.epoch_steps, cfg.adj.h};
  return [=](std::size_t, Rng& rng) {
    return simulate_vr_pgf(*p, stale, x0, dt, T, rng, cfg.jumps, rec);
  };
}

fs::path output_dir(const RunConfig& cfg) {
  fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw ConfigError("cannot create output directory '" + cfg.out_dir + "'");
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

template <class F>
std::string render(F&& f) {
  std::ostringstream os;
  f(os);
  return os.str();
}

/// Runs the configured simulation as an ensemble and checks every [bound]
/// kind; also dumps one checkpoint curve CSV per kind.
VerificationReport config_bounds_experiment(const RunConfig& cfg) {
  ExperimentParams(cfg, "bounds").finish();
  if (cfg.bounds.empty()) throw ConfigError("experiment bounds needs [bound] kinds");
  if (cfg.n_paths < 2) throw ConfigError("experiment bounds needs ensemble.n_paths >= 2");
  check_bounds_admissible(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemPtr p = build_problem(cfg.problem);
  const Vector x0 = start_point(cfg.problem, *p);
  BoundInputs in = bound_inputs(cfg, *p);

  EnsembleOptions opt;
  opt.threads = cfg.threads;
  opt.extra_names = {"f_gap_wavg", "grad_norm_sq_wavg"};
  const AdjustmentSchedule adj = cfg.adj;
  std::size_t stride = cfg.stride;
  if (cfg.is_continuous()) {
    // The running averages are trapezoidal sums over the recorded grid, so
    // every Euler step is kept; a strided grid biases them upward early on.
    stride = 1;
    opt.extra = [adj](const Trajectory& tr, std::vector<std::vector<double>>& out) {
      out.push_back(psi_weighted_running_average(tr.times, tr.f_gap, adj));
      out.push_back(psi_weighted_running_average(tr.times, tr.grad_norm_sq, adj));
    };
  } else if (cfg.mode == "svrg") {
    opt.extra_names.clear();
    stride = cfg.epoch_steps;
  } else {
    stride = 1;  // index averages need every step
    opt.extra = [adj](const Trajectory& tr, std::vector<std::vector<double>>& out) {
      out.push_back(psi_weighted_index_average(tr.f_gap, adj));
      out.push_back(psi_weighted_index_average(tr.grad_norm_sq, adj));
    };
  }
  if (cfg.mode == "vr-pgf")
    stride = static_cast<std::size_t>(std::llround(in.period() / cfg.step()));
  const EnsembleStats st =
      ensemble_run(make_runner(cfg, p, x0, {stride, false}), cfg.n_paths, cfg.seed, opt);

  VerificationReport rep;
  rep.experiment = "bounds";
  rep.seed = cfg.seed;
  rep.n_paths = st.n_paths;
  rep.divergence_count = st.divergence_count;
  rep.config.emplace_back("mode", cfg.mode);
  rep.config.emplace_back("psi", cfg.adj.describe());
  rep.config.emplace_back("family", cfg.problem.family);
  const fs::path dir = output_dir(cfg);
  for (BoundKind k : cfg.bounds) {
    if (is_discrete(k) == cfg.is_continuous())
      throw ConfigError("bound " + to_string(k) + " does not match simulation mode " + cfg.mode);
    const VerificationReport sub = verify_bound(st, RateBound(k, in), cfg.slack_se);
    std::vector<double> t, mean, se, bound;
    for (Checkpoint c : sub.checkpoints) {
      t.push_back(c.t);
      mean.push_back(c.empirical);
      se.push_back(c.se);
      bound.push_back(c.reference);
      c.label = to_string(k) + ": " + c.label;
      rep.checkpoints.push_back(std::move(c));
    }
    write_file(dir / ("curve_" + to_string(k) + ".csv"),
               render([&](std::ostream& os) { write_curve_csv(os, t, mean, se, bound); }));
  }
  rep.finalize();
  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

using ExperimentFn = std::function<VerificationReport(const RunConfig&)>;

const std::map<std::string, ExperimentFn>& experiment_table() {
  static const std::map<std::string, ExperimentFn> table{
      {"ball",
       [](const RunConfig& cfg) {
         BallParams p;
         apply_common(cfg, p);
         if (cfg.dt > 0.0) p.dt = cfg.dt;
         std::string mode = "continuous";
         ExperimentParams e(cfg, "ball");
         e.bind("mode", mode).bind("d", p.d).bind("mu", p.mu).bind("sigma_sq", p.sigma_sq);
         e.bind("h", p.h).bind("b", p.b).bind("dt", p.dt).bind("T_long", p.T_long);
         e.bind("tail_start", p.tail_start).bind("x0_offset", p.x0_offset).bind("stride", p.stride);
         e.bind("n_paths", p.n_paths).bind("slack_se", p.slack_se).bind("rel_tol", p.rel_tol);
         e.finish();
         if (mode != "continuous" && mode != "discrete")
           throw ConfigError("verify.mode: expected continuous or discrete");
         p.mode = mode == "continuous" ? BallParams::Mode::kContinuous : BallParams::Mode::kDiscrete;
         return ball_experiment(p);
       }},
      {"time_change",
       [](const RunConfig& cfg) {
         TimeChangeParams p;
         apply_common(cfg, p);
         if (cfg.dt > 0.0) p.dt = cfg.dt;
         ExperimentParams e(cfg, "time_change");
         e.bind("lambda", p.lambda).bind("x0", p.x0).bind("h", p.h).bind("sigma", p.sigma);
         e.bind("dt", p.dt).bind("tau_horizon", p.tau_horizon);
         e.bind("n_checkpoints", p.n_checkpoints).bind("n_paths", p.n_paths);
         e.bind("slack_se", p.slack_se).bind("min_pass_fraction", p.min_pass_fraction);
         e.bind("warp", p.warp);
         e.finish();
         if (!(p.h > 0.0)) throw ConfigError("verify.h: must be positive");
         return time_change_experiment(p);
       }},
      {"svrg",
       [](const RunConfig& cfg) {
         SvrgParams p;
         apply_common(cfg, p);
         ExperimentParams e(cfg, "svrg");
         e.bind("curvature", p.curvature).bind("delta", p.delta).bind("offset", p.offset);
         e.bind("h", p.h).bind("m", p.m).bind("epochs", p.n_epochs);
         e.bind("dt_divisor", p.dt_divisor).bind("declared_mu", p.declared_mu);
         e.bind("declared_L", p.declared_L).bind("n_paths", p.n_paths).bind("slack_se", p.slack_se);
         e.bind("run_discrete", p.run_discrete).bind("run_continuous", p.run_continuous);
         e.finish();
         return svrg_experiment(p);
       }},
      {"discrete_bounds",
       [](const RunConfig& cfg) {
         DiscreteBoundsParams p;
         apply_common(cfg, p);
         std::string psi = "constant";
         double h = p.adj.h;
         ExperimentParams e(cfg, "discrete_bounds");
         e.bind("psi", psi).bind("h", h).bind("batch", p.batch).bind("n_steps", p.n_steps);
         e.bind("n_paths", p.n_paths).bind("slack_se", p.slack_se).bind("pl_only", p.pl_only);
         e.finish();
         if (!(h > 0.0)) throw ConfigError("verify.h: must be positive");
         p.adj = parse_psi(psi, h, "verify.psi");
         return discrete_bounds_experiment(p);
       }},
      {"continuous_bounds",
       [](const RunConfig& cfg) {
         ContinuousBoundsParams p;
         apply_common(cfg, p);
         std::string psi = "constant";
         double h = p.adj.h;
         ExperimentParams e(cfg, "continuous_bounds");
         e.bind("psi", psi).bind("h", h).bind("batch", p.batch).bind("dt_divisor", p.dt_divisor);
         e.bind("T", p.T).bind("n_paths", p.n_paths).bind("slack_se", p.slack_se);
         e.finish();
         if (!(h > 0.0)) throw ConfigError("verify.h: must be positive");
         p.adj = parse_psi(psi, h, "verify.psi");
         return continuous_bounds_experiment(p);
       }},
      {"asymptotic_rate",
       [](const RunConfig& cfg) {
         AsymptoticParams p;
         apply_common(cfg, p);
         ExperimentParams e(cfg, "asymptotic_rate");
         e.bind("a_values", p.a_values).bind("h", p.h).bind("n_steps", p.n_steps);
         e.bind("stride", p.stride).bind("n_paths", p.n_paths).bind("slope_tol", p.slope_tol);
         e.finish();
         return asymptotic_rate_experiment(p);
       }},
      {"landscape_stretch",
       [](const RunConfig& cfg) {
         LandscapeParams p;
         apply_common(cfg, p);
         if (cfg.dt > 0.0) p.dt = cfg.dt;
         ExperimentParams e(cfg, "landscape_stretch");
         e.bind("lambda", p.lambda).bind("x0", p.x0).bind("dt", p.dt).bind("T", p.T);
         e.bind("sigma", p.sigma).bind("h", p.h).bind("n_paths", p.n_paths);
         e.bind("slack_se", p.slack_se).bind("error_factor", p.error_factor);
         e.bind("slope_tol", p.slope_tol);
         e.finish();
         return landscape_stretch_experiment(p);
       }},
      {"weak_error",
       [](const RunConfig& cfg) {
         WeakErrorParams p;
         apply_common(cfg, p);
         ExperimentParams e(cfg, "weak_error");
         e.bind("h_list", p.h_list).bind("T", p.T).bind("mu", p.mu).bind("sigma_sq", p.sigma_sq);
         e.bind("d", p.d).bind("x0", p.x0).bind("n_paths", p.n_paths);
         e.finish();
         return weak_error_experiment(p);
       }},
      {"bounds", config_bounds_experiment},
  };
  return table;
}

void print_summary(const VerificationReport& r, std::ostream& log) {
  log << (r.pass ? "PASS " : "FAIL ") << r.experiment << "  checkpoints=" << r.checkpoints.size()
      << "  max_violation_se=" << format_double(r.max_violation_se)
      << "  paths=" << r.n_paths << "  runtime=" << r.runtime_seconds << "s\n";
}

void apply_overrides(RunConfig& cfg, const CliOverrides& o) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.paths) {
    if (*o.paths == 0) throw ConfigError("--paths: must be positive");
    cfg.n_paths = *o.paths;
    cfg.n_paths_given = true;
  }
  if (o.dt) {
    if (!(*o.dt > 0.0)) throw ConfigError("--dt: must be positive");
    cfg.dt = *o.dt;
  }
  if (o.out) cfg.out_dir = *o.out;
  if (o.format) {
    if (*o.format != "csv" && *o.format != "json")
      throw ConfigError("--format: expected csv or json");
    cfg.format = *o.format;
  }
}

}  // namespace

RunConfig load_run_config(const std::string& path, const CliOverrides& o) {
  RunConfig cfg = parse_run_config(path.empty() ? KeyValueConfig{} : KeyValueConfig::load(path));
  apply_overrides(cfg, o);
  check_bounds_admissible(cfg);
  return cfg;
}

std::vector<std::string> experiment_names() {
  std::vector<std::string> out;
  for (const auto& kv : experiment_table()) out.push_back(kv.first);
  return out;
}

VerificationReport run_experiment(const RunConfig& cfg, const std::string& name) {
  const auto& table = experiment_table();
  const auto it = table.find(name);
  if (it == table.end()) {
    std::string list;
    for (const auto& n : experiment_names()) list += (list.empty() ? "" : ", ") + n;
    throw ConfigError("unknown experiment '" + name + "'; valid: " + list);
  }
  return it->second(cfg);
}

int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  const ProblemPtr p = build_problem(cfg.problem);
  const Vector x0 = start_point(cfg.problem, *p);
  const RecordOptions rec{cfg.stride, false};
  const PathRunner runner = make_runner(cfg, p, x0, rec);
  const fs::path dir = output_dir(cfg);
  const bool json = cfg.format == "json";
  fs::path file;
  if (cfg.n_paths == 1) {
    Rng rng = Rng::for_path(cfg.seed, 0);
    const Trajectory tr = runner(0, rng);
    file = dir / ("trajectory." + cfg.format);
    write_file(file, json ? trajectory_json(tr)
                          : render([&](std::ostream& os) { write_trajectory_csv(os, tr); }));
    if (tr.diverged) log << "warning: trajectory diverged\n";
  } else {
    EnsembleOptions opt;
    opt.threads = cfg.threads;
    const EnsembleStats st = ensemble_run(runner, cfg.n_paths, cfg.seed, opt);
    file = dir / ("ensemble." + cfg.format);
    write_file(file, json ? ensemble_json(st)
                          : render([&](std::ostream& os) { write_ensemble_csv(os, st); }));
  }
  log << "wrote " << file.string() << '\n';
  return kExitPass;
}

int cmd_bound(const RunConfig& cfg, const std::vector<BoundKind>& kinds, std::ostream& log) {
  if (kinds.empty()) throw ConfigError("no bound kinds requested (use --kind or [bound] kinds)");
  const ProblemPtr p = build_problem(cfg.problem);
  const BoundInputs in = bound_inputs(cfg, *p);
  const fs::path dir = output_dir(cfg);
  for (BoundKind k : kinds) {
    try {
      check_admissible(in, k);
    } catch (const AdmissibilityError& e) {
      throw ConfigError("bound " + to_string(k) + " not admissible: violated condition " +
                        e.condition() + " (" + e.what() + ")");
    }
    const RateBound bound(k, in);
    std::vector<double> t, v;
    if (k == BoundKind::VR_CT || k == BoundKind::VR_DT) {
      for (std::size_t j = 0; j <= cfg.n_epochs; ++j) {
        t.push_back(in.period() * static_cast<double>(j));
        v.push_back(bound(static_cast<double>(j)));
      }
    } else if (is_discrete(k)) {
      if (cfg.n_steps == 0 && cfg.T <= 0.0)
        throw ConfigError("simulation.n_steps or simulation.T is required for " + to_string(k));
      const std::size_t n = cfg.n_steps > 0 ? cfg.n_steps
                                            : static_cast<std::size_t>(
                                                  std::ceil(cfg.T / cfg.adj.h - 1e-9));
      // Last-iterate kinds bound iterate k + 1; randomized kinds cover {0..k}.
      const bool next = k == BoundKind::PL_DT || k == BoundKind::WQC_DT_LAST;
      const std::vector<double> curve = bound_discrete_curve(in, n, k);
      for (std::size_t i = 0; i < n; i += cfg.stride) {
        t.push_back(cfg.adj.h * static_cast<double>(next ? i + 1 : i));
        v.push_back(curve[i]);
      }
    } else {
      const double dt = cfg.dt > 0.0 ? cfg.dt : cfg.adj.h;
      const double T = cfg.T > 0.0 ? cfg.T : dt * static_cast<double>(cfg.n_steps);
      if (!(T > 0.0)) throw ConfigError("simulation.T is required for " + to_string(k));
      const auto n = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
      // Averaged bounds divide by phi(t); their curve starts at the first grid step.
      const bool from_zero = k == BoundKind::PL_CT;
      for (std::size_t i = from_zero ? 0 : cfg.stride; i <= n; i += cfg.stride) {
        const double ti = dt * static_cast<double>(i);
        t.push_back(ti);
        v.push_back(bound(ti));
      }
    }
    const fs::path file = dir / ("bound_" + to_string(k) + "." + cfg.format);
    if (cfg.format == "json") {
      std::ostringstream os;
      os << "{\n  \"kind\": \"" << to_string(k) << "\",\n  \"t\": [";
      for (std::size_t i = 0; i < t.size(); ++i) os << (i ? ", " : "") << format_double(t[i]);
      os << "],\n  \"bound\": [";
      for (std::size_t i = 0; i < v.size(); ++i)
        os << (i ? ", " : "") << (std::isfinite(v[i]) ? format_double(v[i]) : "null");
      os << "]\n}\n";
      write_file(file, os.str());
    } else {
      write_file(file, render([&](std::ostream& os) { write_bound_csv(os, t, v); }));
    }
    log << "wrote " << file.string() << '\n';
  }
  return kExitPass;
}

int cmd_verify(const RunConfig& cfg, const std::string& experiment, std::ostream& log) {
  const std::string name = experiment.empty() ? cfg.experiment : experiment;
  if (name.empty()) throw ConfigError("no experiment named (use --experiment or [verify] experiment)");
  const VerificationReport rep = run_experiment(cfg, name);
  const fs::path dir = output_dir(cfg);
  write_file(dir / (name + ".json"), report_json(rep));
  print_summary(rep, log);
  return rep.pass ? kExitPass : kExitFail;
}

int cmd_suite(const std::string& config_dir, const CliOverrides& o, std::ostream& log) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(config_dir, ec)) {
    const auto ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".cfg" || ext == ".ini" || ext == ".json"))
      files.push_back(entry.path());
  }
  if (ec) throw ConfigError("cannot read config directory '" + config_dir + "'");
  if (files.empty()) throw ConfigError("no *.cfg / *.ini / *.json configs in '" + config_dir + "'");
  std::sort(files.begin(), files.end());

  // Parse everything first so a bad file fails before any simulation starts.
  std::vector<RunConfig> cfgs;
  for (const auto& f : files) {
    try {
      cfgs.push_back(load_run_config(f.string(), o));
    } catch (const ConfigError& e) {
      throw ConfigError(f.filename().string() + ": " + e.what());
    }
    if (cfgs.back().experiment.empty())
      throw ConfigError(f.filename().string() + ": [verify] experiment is required in a suite");
  }

  std::vector<VerificationReport> reports;
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    VerificationReport rep;
    try {
      // Curve dumps go to a per-config subdirectory so configs cannot clobber each other.
      RunConfig run_cfg = cfgs[i];
      if (run_cfg.experiment == "bounds")
        run_cfg.out_dir = (fs::path(run_cfg.out_dir) / files[i].stem()).string();
      rep = run_experiment(run_cfg, run_cfg.experiment);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      // A failing experiment never aborts the suite.
      rep.experiment = cfgs[i].experiment;
      rep.seed = cfgs[i].seed;
      rep.pass = false;
      rep.notes.push_back(std::string("error: ") + e.what());
    }
    rep.config.emplace_back("config_file", files[i].filename().string());
    const fs::path dir = output_dir(cfgs[i]);
    write_file(dir / (files[i].stem().string() + ".json"), report_json(rep));
    print_summary(rep, log);
    reports.push_back(std::move(rep));
  }
  RunConfig top;
  apply_overrides(top, o);
  write_file(output_dir(top) / "suite.json", suite_json(reports));
  const bool all = std::all_of(reports.begin(), reports.end(),
                               [](const VerificationReport& r) { return r.pass; });
  log << (all ? "suite PASS" : "suite FAIL") << " (" << reports.size() << " experiments)\n";
  return all ? kExitPass : kExitFail;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"pgflow: stochastic gradient flows, their diffusion models and rate bounds"};
  app.require_subcommand(1);

  std::string config_path, config_dir, experiment;
  std::vector<std::string> kind_names;
  CliOverrides o;
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  double dt = 0.0;
  std::string out_dir, format;

  auto common = [&](CLI::App* sub, bool with_config) {
    if (with_config) sub->add_option("--config", config_path, "Config file (key = value or JSON)");
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    sub->add_option("--paths", paths, "Number of Monte-Carlo paths");
    sub->add_option("--dt", dt, "Euler-Maruyama step");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };
  CLI::App* simulate = app.add_subcommand("simulate", "Simulate one path or an ensemble");
  common(simulate, true);
  CLI::App* bound = app.add_subcommand("bound", "Evaluate rate bounds on a grid");
  common(bound, true);
  bound->add_option("--kind", kind_names, "Bound kind (repeatable), e.g. PL_CT");
  CLI::App* verify = app.add_subcommand("verify", "Run a named experiment and write its report");
  common(verify, true);
  verify->add_option("--experiment", experiment, "Experiment name");
  CLI::App* suite = app.add_subcommand("suite", "Run every experiment config in a directory");
  common(suite, false);
  suite->add_option("--config-dir", config_dir, "Directory of experiment configs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitPass : kExitConfigError;
  }

  for (CLI::App* sub : {simulate, bound, verify, suite}) {
    if (sub->count("--seed")) o.seed = seed;
    if (sub->count("--paths")) o.paths = paths;
    if (sub->count("--dt")) o.dt = dt;
    if (sub->count("--out")) o.out = out_dir;
    if (sub->count("--format")) o.format = format;
  }

  try {
    if (*suite) return cmd_suite(config_dir, o, out);
    RunConfig cfg = load_run_config(config_path, o);
    if (*simulate) return cmd_simulate(cfg, out);
    if (*bound) {
      std::vector<BoundKind> kinds = cfg.bounds;
      if (!kind_names.empty()) {
        kinds.clear();
        for (const auto& n : kind_names) {
          try {
            kinds.push_back(bound_kind_from_string(n));
          } catch (const std::exception& e) {
            throw ConfigError(std::string("--kind: ") + e.what());
          }
        }
      }
      return cmd_bound(cfg, kinds, out);
    }
    return cmd_verify(cfg, experiment, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const AdmissibilityError& e) {
    err << "config error: condition " << e.condition() << " violated: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  }
}

}  // namespace pgflow
