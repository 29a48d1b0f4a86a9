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


#include "pgflow/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pgflow/errors.hpp"

namespace pgflow {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string json_scalar(const nlohmann::json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  if (j.is_number_integer() || j.is_number_unsigned()) return j.dump();
  if (j.is_number_float()) return shortest(j.get<double>());
  throw ConfigError(where + ": expected a scalar");
}

std::string json_value(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) return json_scalar(j, where);
  std::string out;
  const bool rows = !j.empty() && j.front().is_array();
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (i) out += rows ? "; " : ", ";
    if (rows) {
      if (!j[i].is_array()) throw ConfigError(where + ": mixed rows and scalars");
      for (std::size_t k = 0; k < j[i].size(); ++k)
        out += (k ? " " : "") + json_scalar(j[i][k], where);
    } else {
      out += json_scalar(j[i], where);
    }
  }
  return out;
}

/// Consumes keys from one section; anything left over is an error.
class SectionReader {
 public:
  SectionReader(const KeyValueConfig& kv, std::string name, std::vector<std::string> valid)
      : name_(std::move(name)), valid_(std::move(valid)) {
    if (kv.has(name_)) {
      section_ = &kv.section(name_);
      for (const auto& [k, v] : *section_) {
        (void)v;
        if (std::find(valid_.begin(), valid_.end(), k) == valid_.end())
          throw ConfigError("unknown key '" + name_ + "." + k + "'; valid keys: " + join(valid_));
      }
    }
  }

  const std::string* get(const std::string& key) const {
    if (!section_) return nullptr;
    const auto it = section_->find(key);
    return it == section_->end() ? nullptr : &it->second;
  }
  std::string what(const std::string& key) const { return name_ + "." + key; }

  void read(const std::string& key, double& out) const {
    if (auto* v = get(key)) out = parse_double(*v, what(key));
  }
  void read(const std::string& key, std::optional<double>& out) const {
    if (auto* v = get(key)) out = parse_double(*v, what(key));
  }
  void read(const std::string& key, std::size_t& out) const {
    if (auto* v = get(key)) out = static_cast<std::size_t>(parse_u64(*v, what(key)));
  }
  void read(const std::string& key, bool& out) const {
    if (auto* v = get(key)) out = parse_bool(*v, what(key));
  }
  void read(const std::string& key, std::string& out) const {
    if (auto* v = get(key)) out = *v;
  }
  void read(const std::string& key, std::vector<double>& out) const {
    if (auto* v = get(key)) out = parse_list(*v, what(key));
  }

 private:
  std::string name_;
  std::vector<std::string> valid_;
  const KeyValueConfig::Section* section_ = nullptr;
};

Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

}  // namespace

double parse_double(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  double v = 0.0;
  const char* end = t.data() + t.size();
  const auto r = std::from_chars(t.data(), end, v);
  if (t.empty() || r.ec != std::errc() || r.ptr != end)
    throw ConfigError(what + ": expected a number, got '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  std::uint64_t v = 0;
  const char* end = t.data() + t.size();
  const auto r = std::from_chars(t.data(), end, v);
  if (t.empty() || r.ec != std::errc() || r.ptr != end)
    throw ConfigError(what + ": expected a non-negative integer, got '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(what + ": expected true or false, got '" + s + "'");
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::string t = s;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream is(t);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(parse_double(tok, what));
  return out;
}

std::vector<std::vector<double>> parse_rows(const std::string& s, const std::string& what) {
  std::vector<std::vector<double>> rows;
  std::istringstream is(s);
  std::string row;
  while (std::getline(is, row, ';')) {
    if (trim(row).empty()) continue;
    rows.push_back(parse_list(row, what));
  }
  return rows;
}

AdjustmentSchedule parse_psi(const std::string& s, double h, const std::string& what) {
  std::istringstream is(s);
  std::string fam;
  is >> fam;
  std::string rest;
  std::getline(is, rest);
  try {
    if (fam == "constant" && trim(rest).empty()) return AdjustmentSchedule::constant(h);
    if (fam == "power") return AdjustmentSchedule::power(h, parse_double(rest, what));
  } catch (const PreconditionError& e) {
    throw ConfigError(what + ": " + e.what());
  }
  throw ConfigError(what + ": expected 'constant' or 'power <a>', got '" + s + "'");
}

KeyValueConfig KeyValueConfig::parse_text(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream is(text);
  std::string line, current;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string at = "line " + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(at + ": unterminated section header");
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty()) throw ConfigError(at + ": empty section name");
      cfg.data_[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(at + ": expected 'key = value'");
    if (current.empty()) throw ConfigError(at + ": key outside of any [section]");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(at + ": empty key");
    auto& sec = cfg.data_[current];
    if (sec.count(key)) throw ConfigError(at + ": duplicate key '" + current + "." + key + "'");
    sec[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("JSON config must be an object of sections");
  KeyValueConfig cfg;
  for (const auto& [name, sec] : j.items()) {
    if (!sec.is_object()) throw ConfigError("JSON section '" + name + "' must be an object");
    auto& out = cfg.data_[name];
    for (const auto& [key, value] : sec.items()) out[key] = json_value(value, name + "." + key);
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  const auto pos = text.find_first_not_of(" \t\r\n");
  if (pos != std::string::npos && text[pos] == '{') return parse_json(text);
  return parse_text(text);
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const KeyValueConfig::Section& KeyValueConfig::section(const std::string& name) const {
  static const Section empty;
  const auto it = data_.find(name);
  return it == data_.end() ? empty : it->second;
}

std::vector<std::string> KeyValueConfig::section_names() const {
  std::vector<std::string> out;
  for (const auto& kv : data_) out.push_back(kv.first);
  return out;
}

void KeyValueConfig::set(const std::string& section, const std::string& key,
                         const std::string& value) {
  data_[section][key] = value;
}

bool RunConfig::is_continuous() const {
  return mode == "mb-pgf" || mode == "vr-pgf" || mode == "time-changed";
}

double RunConfig::step() const {
  if (!is_continuous()) return adj.h;
  return dt > 0.0 ? dt : adj.h;
}

std::size_t RunConfig::steps() const {
  if (mode == "svrg") return n_epochs * epoch_steps;
  if (mode == "vr-pgf" && T <= 0.0)
    return static_cast<std::size_t>(
        std::llround(static_cast<double>(n_epochs * epoch_steps) * adj.h / step()));
  if (n_steps > 0) return n_steps;
  return static_cast<std::size_t>(std::ceil(T / step() - 1e-9));
}

RunConfig parse_run_config(const KeyValueConfig& kv) {
  static const std::vector<std::string> kSections{"problem", "schedule", "simulation",
                                                  "ensemble", "output", "bound", "verify"};
  for (const auto& s : kv.section_names())
    if (std::find(kSections.begin(), kSections.end(), s) == kSections.end())
      throw ConfigError("unknown section '[" + s + "]'; valid sections: " + join(kSections));

  RunConfig cfg;
  {
    SectionReader r(kv, "problem",
                    {"family", "lambda", "x_star", "offsets", "d", "mu", "sigma_sq", "curvature",
                     "delta", "offset", "x0", "L", "mu_pl", "mu_rsi", "tau", "sigma_star_sq"});
    ProblemConfig& p = cfg.problem;
    r.read("family", p.family);
    r.read("lambda", p.lambda);
    r.read("x_star", p.x_star);
    if (auto* v = r.get("offsets")) p.offsets = parse_rows(*v, r.what("offsets"));
    r.read("d", p.d);
    r.read("mu", p.mu);
    r.read("sigma_sq", p.sigma_sq);
    r.read("curvature", p.curvature);
    r.read("delta", p.delta);
    r.read("offset", p.offset);
    r.read("x0", p.x0);
    r.read("L", p.L);
    r.read("mu_pl", p.mu_pl);
    r.read("mu_rsi", p.mu_rsi);
    r.read("tau", p.tau);
    r.read("sigma_star_sq", p.sigma_star_sq);
    static const std::vector<std::string> kFamilies{
        "canonical_pl", "perturbed_quadratic", "isotropic_quadratic", "svrg_quadratic", "logcosh"};
    if (std::find(kFamilies.begin(), kFamilies.end(), p.family) == kFamilies.end())
      throw ConfigError("problem.family: unknown family '" + p.family + "'; valid: " +
                        join(kFamilies));
  }
  {
    SectionReader r(kv, "schedule", {"psi", "a", "h", "batch", "epoch_steps"});
    double h = cfg.adj.h;
    r.read("h", h);
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("schedule.h: must be positive, got " + shortest(h));
    std::string psi = "constant";
    r.read("psi", psi);
    if (auto* a = r.get("a")) psi += " " + *a;
    cfg.adj = parse_psi(psi, h, r.what("psi"));
    if (auto* b = r.get("batch")) {
      std::istringstream is(*b);
      std::string fam, rest;
      is >> fam;
      std::getline(is, rest);
      const auto nums = parse_list(rest, r.what("batch"));
      if (fam == "constant" && nums.size() == 1) {
        cfg.batch = BatchSchedule::constant(nums[0]);
      } else if (fam == "linear" && nums.size() == 2) {
        cfg.batch = BatchSchedule::linear(nums[0], nums[1]);
      } else {
        throw ConfigError("schedule.batch: expected 'constant <b>' or 'linear <b0> <rate>'");
      }
      try {
        cfg.batch.validate();
      } catch (const PreconditionError& e) {
        throw ConfigError(std::string("schedule.batch: ") + e.what());
      }
    }
    r.read("epoch_steps", cfg.epoch_steps);
    if (cfg.epoch_steps == 0) throw ConfigError("schedule.epoch_steps: must be positive");
  }
  {
    SectionReader r(kv, "simulation",
                    {"mode", "dt", "T", "n_steps", "epochs", "sigma", "stride", "jumps"});
    r.read("mode", cfg.mode);
    r.read("dt", cfg.dt);
    r.read("T", cfg.T);
    r.read("n_steps", cfg.n_steps);
    r.read("epochs", cfg.n_epochs);
    r.read("sigma", cfg.sigma);
    r.read("stride", cfg.stride);
    r.read("jumps", cfg.jumps);
    static const std::vector<std::string> kModes{"sgd",    "pgd",    "svrg",
                                                 "mb-pgf", "vr-pgf", "time-changed"};
    if (std::find(kModes.begin(), kModes.end(), cfg.mode) == kModes.end())
      throw ConfigError("simulation.mode: unknown mode '" + cfg.mode + "'; valid: " + join(kModes));
    if (cfg.dt < 0.0 || !std::isfinite(cfg.dt)) throw ConfigError("simulation.dt: must be positive");
    if (cfg.T < 0.0 || !std::isfinite(cfg.T)) throw ConfigError("simulation.T: must be non-negative");
    if (cfg.stride == 0) throw ConfigError("simulation.stride: must be positive");
    if (cfg.sigma && !(*cfg.sigma >= 0.0)) throw ConfigError("simulation.sigma: must be non-negative");
  }
  {
    SectionReader r(kv, "ensemble", {"n_paths", "seed", "threads", "slack_se"});
    r.read("n_paths", cfg.n_paths);
    cfg.n_paths_given = r.get("n_paths") != nullptr;
    if (auto* v = r.get("seed")) cfg.seed = parse_u64(*v, r.what("seed"));
    r.read("threads", cfg.threads);
    r.read("slack_se", cfg.slack_se);
    if (cfg.n_paths == 0) throw ConfigError("ensemble.n_paths: must be positive");
  }
  {
    SectionReader r(kv, "output", {"dir", "format"});
    r.read("dir", cfg.out_dir);
    r.read("format", cfg.format);
    if (cfg.format != "csv" && cfg.format != "json")
      throw ConfigError("output.format: expected csv or json, got '" + cfg.format + "'");
  }
  {
    SectionReader r(kv, "bound", {"kinds"});
    if (auto* v = r.get("kinds")) {
      std::string t = *v;
      std::replace(t.begin(), t.end(), ',', ' ');
      std::istringstream is(t);
      std::string tok;
      while (is >> tok) {
        try {
          cfg.bounds.push_back(bound_kind_from_string(tok));
        } catch (const std::exception& e) {
          throw ConfigError(std::string("bound.kinds: ") + e.what());
        }
      }
    }
  }
  // [verify] keys other than `experiment` belong to the named experiment and
  // are checked when it is built.
  for (const auto& [k, v] : kv.section("verify")) {
    if (k == "experiment")
      cfg.experiment = v;
    else
      cfg.experiment_params[k] = v;
  }
  return cfg;
}

ProblemPtr build_problem(const ProblemConfig& pc) {
  try {
    ProblemPtr p;
    if (pc.family == "canonical_pl") {
      p = make_canonical_pl_problem();
    } else if (pc.family == "isotropic_quadratic") {
      std::optional<Vector> xs;
      if (!pc.x_star.empty()) xs = to_vector(pc.x_star);
      p = make_isotropic_quadratic(pc.d, pc.mu, pc.sigma_sq, xs);
    } else if (pc.family == "svrg_quadratic") {
      p = make_svrg_problem(pc.curvature, pc.delta, pc.offset);
    } else if (pc.family == "perturbed_quadratic") {
      if (pc.lambda.empty()) throw ConfigError("problem.lambda: required for perturbed_quadratic");
      const Vector lambda = to_vector(pc.lambda);
      const Vector xs = pc.x_star.empty() ? Vector::Zero(lambda.size()) : to_vector(pc.x_star);
      std::vector<Vector> noise;
      for (const auto& row : pc.offsets) noise.push_back(to_vector(row));
      if (noise.empty()) noise.push_back(Vector::Zero(lambda.size()));
      p = make_perturbed_quadratic(lambda, xs, noise);
    } else if (pc.family == "logcosh") {
      if (pc.offsets.empty()) throw ConfigError("problem.offsets: required for logcosh");
      const std::size_t d = pc.offsets.front().size();
      Matrix half(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(pc.offsets.size()));
      for (std::size_t i = 0; i < pc.offsets.size(); ++i) {
        if (pc.offsets[i].size() != d) throw ConfigError("problem.offsets: ragged rows");
        half.col(static_cast<Eigen::Index>(i)) = to_vector(pc.offsets[i]);
      }
      const Vector xs = pc.x_star.empty() ? Vector::Zero(static_cast<Eigen::Index>(d))
                                          : to_vector(pc.x_star);
      p = make_logcosh_problem(xs, half);
    } else {
      throw ConfigError("problem.family: unknown family '" + pc.family + "'");
    }
    if (pc.L || pc.mu_pl || pc.mu_rsi || pc.tau || pc.sigma_star_sq) {
      ProblemConstants c = p->constants();
      if (pc.L) c.L = *pc.L;
      if (pc.mu_pl) c.mu_pl = *pc.mu_pl;
      if (pc.mu_rsi) c.mu_rsi = *pc.mu_rsi;
      if (pc.tau) c.tau_wqc = *pc.tau;
      if (pc.sigma_star_sq) c.sigma_star_sq = *pc.sigma_star_sq;
      p = with_constants(p, c);
    }
    return p;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
}

Vector start_point(const ProblemConfig& pc, const FiniteSumProblem& p) {
  if (pc.x0.empty()) {
    if (pc.family == "canonical_pl") return canonical_pl_start();
    return p.x_star() + Vector::Ones(static_cast<Eigen::Index>(p.dim()));
  }
  if (pc.x0.size() != p.dim())
    throw ConfigError("problem.x0: expected " + std::to_string(p.dim()) + " entries, got " +
                      std::to_string(pc.x0.size()));
  return to_vector(pc.x0);
}

BoundInputs bound_inputs(const RunConfig& cfg, const FiniteSumProblem& p) {
  BoundInputs in = BoundInputs::from_problem(p, start_point(cfg.problem, p), cfg.adj, cfg.batch);
  in.m = cfg.epoch_steps;
  return in;
}

void check_bounds_admissible(const RunConfig& cfg) {
  if (cfg.bounds.empty()) return;
  const ProblemPtr p = build_problem(cfg.problem);
  const BoundInputs in = bound_inputs(cfg, *p);
  for (BoundKind k : cfg.bounds) {
    try {
      check_admissible(in, k);
    } catch (const AdmissibilityError& e) {
      throw ConfigError("bound " + to_string(k) + " not admissible: violated condition " +
                        e.condition() + " (" + e.what() + ")");
    } catch (const PreconditionError& e) {
      throw ConfigError("bound " + to_string(k) + ": " + e.what());
    }
  }
}

}  // namespace pgflow
