// Copyright 2026 The clockvmc Authors - All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "clockvmc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "clockvmc/errors.hpp"
#include "clockvmc/exact_oracle.hpp"
#include "clockvmc/io.hpp"
#include "clockvmc/random.hpp"

namespace clockvmc {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(TrainMode mode) {
  return mode == TrainMode::energy ? "energy" : "infidelity";
}

TrainMode parse_mode(std::string_view text) {
  if (text == "energy") return TrainMode::energy;
  if (text == "infidelity") return TrainMode::infidelity;
  throw ConfigError("unknown mode '" + std::string(text) + "' (expected energy or infidelity)");
}

ClockHamiltonian ProblemConfig::hamiltonian() const { return hamiltonian(n_phys, n_clock); }

ClockHamiltonian ProblemConfig::hamiltonian(int n_phys_override, int n_clock_override) const {
  const TfimParams tfim{n_phys_override, coupling, field};
  if (n_steps && n_clock_override == n_clock) return ClockHamiltonian(tfim, *n_steps, total_time);
  return ClockHamiltonian::with_clock_spins(tfim, n_clock_override, total_time);
}

// ---------------------------------------------------------------------------
// config parsing

namespace {

void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& target, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <class T>
void read_optional(const json& j, const char* key, std::optional<T>& target,
                   const std::string& where) {
  if (!j.contains(key)) return;
  T value{};
  read(j, key, value, where);
  target = value;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

RunConfig parse_run_config(const json& config, std::string subcommand, bool paper_scale) {
  RunConfig c;
  c.subcommand = std::move(subcommand);
  c.paper_scale = paper_scale;
  // budget profile
  c.vmc.iterations_per_stage = paper_scale ? 300 : 200;
  c.n_trials = paper_scale ? 100 : 30;
  c.max_total_spins = paper_scale ? 10 : 9;

  check_keys(config, {"problem", "ansatz", "mode", "vmc", "sampler", "infidelity", "tune",
                      "diagnose", "evolve", "seed", "out"},
             "config");

  if (config.contains("problem")) {
    const json& p = config.at("problem");
    check_keys(p, {"n_phys", "n_clock", "n_steps", "coupling", "field", "total_time",
                   "initial_state"},
               "problem");
    read(p, "n_phys", c.problem.n_phys, "problem");
    read(p, "n_clock", c.problem.n_clock, "problem");
    read_optional(p, "n_steps", c.problem.n_steps, "problem");
    read(p, "coupling", c.problem.coupling, "problem");
    read(p, "field", c.problem.field, "problem");
    read(p, "total_time", c.problem.total_time, "problem");
    read(p, "initial_state", c.problem.initial_state, "problem");
  }
  require(c.problem.n_phys >= 1, "problem.n_phys must be >= 1");
  require(c.problem.n_clock >= 0, "problem.n_clock must be >= 0");
  require(c.problem.n_phys + c.problem.n_clock <= 62, "problem too large");
  if (c.problem.n_steps) {
    require(clock_spins_for(*c.problem.n_steps) == c.problem.n_clock,
            "problem.n_steps needs exactly problem.n_clock clock spins");
  }
  require(std::isfinite(c.problem.total_time) && c.problem.total_time >= 0.0,
          "problem.total_time must be a non-negative number");
  require(std::isfinite(c.problem.coupling) && std::isfinite(c.problem.field),
          "problem.coupling and problem.field must be finite");
  // The pinning term of the Hamiltonian is built for the all-up start.
  require(c.problem.initial_state == "all-up",
          "problem.initial_state: only \"all-up\" is supported");

  c.ansatz.n_spins = c.problem.n_phys + c.problem.n_clock;
  if (config.contains("ansatz")) {
    const json& a = config.at("ansatz");
    check_keys(a, {"kind", "alpha", "n_layers", "n_hidden"}, "ansatz");
    if (a.contains("kind")) {
      std::string kind;
      read(a, "kind", kind, "ansatz");
      try {
        c.ansatz.kind = parse_ansatz(kind);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("ansatz.kind: ") + e.what());
      }
    }
    read(a, "alpha", c.ansatz.alpha, "ansatz");
    read(a, "n_layers", c.ansatz.n_layers, "ansatz");
    read(a, "n_hidden", c.ansatz.n_hidden, "ansatz");
  }

  if (config.contains("mode")) {
    std::string mode;
    read(config, "mode", mode, "config");
    c.mode = parse_mode(mode);
  }

  if (config.contains("vmc")) {
    const json& v = config.at("vmc");
    check_keys(v, {"learning_rate", "iterations_per_stage", "schedule_stages", "weight_decay",
                   "beta1", "beta2", "epsilon", "record_wallclock", "final_samples"},
               "vmc");
    read(v, "learning_rate", c.vmc.learning_rate, "vmc");
    read(v, "iterations_per_stage", c.vmc.iterations_per_stage, "vmc");
    read(v, "schedule_stages", c.vmc.schedule_stages, "vmc");
    read(v, "weight_decay", c.vmc.weight_decay, "vmc");
    read(v, "beta1", c.vmc.beta1, "vmc");
    read(v, "beta2", c.vmc.beta2, "vmc");
    read(v, "epsilon", c.vmc.epsilon, "vmc");
    read(v, "record_wallclock", c.vmc.record_wallclock, "vmc");
    read(v, "final_samples", c.vmc.final_samples, "vmc");
  }
  if (config.contains("sampler")) {
    const json& s = config.at("sampler");
    check_keys(s, {"n_samples", "n_chains", "burn_in_sweeps", "thinning_sweeps"}, "sampler");
    read(s, "n_samples", c.vmc.sampler.n_samples, "sampler");
    read(s, "n_chains", c.vmc.sampler.n_chains, "sampler");
    read(s, "burn_in_sweeps", c.vmc.sampler.burn_in_sweeps, "sampler");
    read(s, "thinning_sweeps", c.vmc.sampler.thinning_sweeps, "sampler");
  }
  if (config.contains("infidelity")) {
    const json& f = config.at("infidelity");
    check_keys(f, {"learning_rate", "iterations_per_stage", "schedule_stages", "weight_decay",
                   "beta1", "beta2", "epsilon"},
               "infidelity");
    read(f, "learning_rate", c.infidelity.learning_rate, "infidelity");
    read(f, "iterations_per_stage", c.infidelity.iterations_per_stage, "infidelity");
    read(f, "schedule_stages", c.infidelity.schedule_stages, "infidelity");
    read(f, "weight_decay", c.infidelity.weight_decay, "infidelity");
    read(f, "beta1", c.infidelity.beta1, "infidelity");
    read(f, "beta2", c.infidelity.beta2, "infidelity");
    read(f, "epsilon", c.infidelity.epsilon, "infidelity");
  }
  c.infidelity.record_wallclock = c.vmc.record_wallclock;

  if (config.contains("tune")) {
    const json& t = config.at("tune");
    check_keys(t, {"n_trials", "gamma", "n_candidates", "n_startup", "sampler", "clock_sweep",
                   "total_spins"},
               "tune");
    read(t, "n_trials", c.n_trials, "tune");
    read(t, "gamma", c.tpe.gamma, "tune");
    read(t, "n_candidates", c.tpe.n_candidates, "tune");
    read(t, "n_startup", c.tpe.n_startup, "tune");
    if (t.contains("sampler")) {
      std::string s;
      read(t, "sampler", s, "tune");
      require(s == "tpe" || s == "random", "tune.sampler must be \"tpe\" or \"random\"");
      c.tpe.random_search = s == "random";
    }
    read(t, "clock_sweep", c.clock_sweep, "tune");
    read_optional(t, "total_spins", c.total_spins, "tune");
  }
  if (c.clock_sweep.empty()) c.clock_sweep = {c.problem.n_clock};
  require(c.n_trials >= 1, "tune.n_trials must be >= 1");
  for (int nt : c.clock_sweep) {
    require(nt >= 0, "tune.clock_sweep entries must be >= 0");
    if (c.total_spins) require(*c.total_spins - nt >= 1, "tune.total_spins too small for the sweep");
  }

  if (config.contains("diagnose")) {
    const json& d = config.at("diagnose");
    check_keys(d, {"max_total_spins", "grid"}, "diagnose");
    read(d, "max_total_spins", c.max_total_spins, "diagnose");
    if (d.contains("grid")) {
      try {
        for (const auto& point : d.at("grid")) {
          c.grid.emplace_back(point.at(0).get<int>(), point.at(1).get<int>());
        }
      } catch (const json::exception& e) {
        throw ConfigError(std::string("diagnose.grid: expected [[n_phys, n_clock], ...]: ") + e.what());
      }
    }
  }
  require(c.max_total_spins >= 1, "diagnose.max_total_spins must be >= 1");
  for (const auto& [ns, nt] : c.grid) require(ns >= 1 && nt >= 0, "diagnose.grid: bad point");

  if (config.contains("evolve")) {
    const json& e = config.at("evolve");
    check_keys(e, {"checkpoint"}, "evolve");
    if (e.contains("checkpoint")) {
      std::string path;
      read(e, "checkpoint", path, "evolve");
      c.checkpoint = path;
    }
  }

  read(config, "seed", c.seed, "config");
  if (config.contains("out")) {
    std::string out;
    read(config, "out", out, "config");
    c.out = out;
  }

  try {
    c.ansatz.validate();
    c.vmc.validate();
    c.tpe.validate();
    if (!(c.infidelity.learning_rate > 0.0) || c.infidelity.iterations_per_stage < 0 ||
        c.infidelity.schedule_stages < 1 || c.infidelity.weight_decay < 0.0) {
      throw std::invalid_argument("infidelity settings out of range");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

json RunConfig::resolved() const {
  json j;
  j["subcommand"] = subcommand;
  j["problem"] = {{"n_phys", problem.n_phys},
                  {"n_clock", problem.n_clock},
                  {"n_steps", problem.n_steps ? json(*problem.n_steps) : json(nullptr)},
                  {"coupling", problem.coupling},
                  {"field", problem.field},
                  {"total_time", problem.total_time},
                  {"initial_state", problem.initial_state}};
  j["ansatz"] = {{"kind", std::string(to_string(ansatz.kind))},
                 {"alpha", ansatz.alpha},
                 {"n_layers", ansatz.n_layers},
                 {"n_hidden", ansatz.n_hidden}};
  j["mode"] = std::string(to_string(mode));
  j["vmc"] = {{"learning_rate", vmc.learning_rate},
              {"iterations_per_stage", vmc.iterations_per_stage},
              {"schedule_stages", vmc.schedule_stages},
              {"weight_decay", vmc.weight_decay},
              {"beta1", vmc.beta1},
              {"beta2", vmc.beta2},
              {"epsilon", vmc.epsilon},
              {"record_wallclock", vmc.record_wallclock},
              {"final_samples", vmc.final_samples}};
  j["sampler"] = {{"n_samples", vmc.sampler.n_samples},
                  {"n_chains", vmc.sampler.n_chains},
                  {"burn_in_sweeps", vmc.sampler.burn_in_sweeps},
                  {"thinning_sweeps", vmc.sampler.thinning_sweeps}};
  j["infidelity"] = {{"learning_rate", infidelity.learning_rate},
                     {"iterations_per_stage", infidelity.iterations_per_stage},
                     {"schedule_stages", infidelity.schedule_stages},
                     {"weight_decay", infidelity.weight_decay},
                     {"beta1", infidelity.beta1},
                     {"beta2", infidelity.beta2},
                     {"epsilon", infidelity.epsilon}};
  j["tune"] = {{"n_trials", n_trials},
               {"gamma", tpe.gamma},
               {"n_candidates", tpe.n_candidates},
               {"n_startup", tpe.n_startup},
               {"sampler", tpe.random_search ? "random" : "tpe"},
               {"clock_sweep", clock_sweep},
               {"total_spins", total_spins ? json(*total_spins) : json(nullptr)}};
  json g = json::array();
  for (const auto& [ns, nt] : grid) g.push_back({ns, nt});
  j["diagnose"] = {{"max_total_spins", max_total_spins}, {"grid", g}};
  j["evolve"] = {{"checkpoint", checkpoint ? json(checkpoint->generic_string()) : json(nullptr)},
                 {"exact", exact}};
  j["paper_scale"] = paper_scale;
  return j;
}

std::string RunConfig::config_hash() const { return hex64(fnv1a(resolved().dump())); }

std::string train_stem(const RunConfig& c) {
  std::ostringstream s;
  s << "train_" << to_string(c.ansatz.kind) << "_" << to_string(c.mode) << "_ns"
    << c.problem.n_phys << "_nt" << c.problem.n_clock;
  return s.str();
}

// ---------------------------------------------------------------------------
// subcommands

namespace {

struct Context {
  RunConfig config;
  Provenance provenance;
  std::ostream& out;
  std::ostream& err;
};

void write_json(const fs::path& path, json body, const Provenance& p) {
  body["provenance"] = p.header_line().substr(2);
  write_atomic(path, body.dump(2) + "\n");
}

std::string num(double v) { return format_number(v); }

json num_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Columns: t, time, sampled, sampled_stderr, exact_variational, ed.
// sampled is the (N+1)-scaled clock-projected estimator on a fresh batch;
// exact_variational is that estimator's exact expectation; ed is the
// renormalised projection of the exact ground state.
CsvTable magnetization_table(const ClockHamiltonian& h, const Model* model,
                             const StateVector* ed, const SamplerConfig& sampler) {
  CsvTable table;
  table.columns = {"t", "time", "sampled", "sampled_stderr", "exact_variational", "ed"};
  const PhysicalOperator op = average_magnetization(h.tfim().n_phys);
  std::optional<SampleBatch> batch;
  std::optional<StateVector> psi;
  std::optional<LogPsiCache> cache;
  if (model) {
    cache.emplace(*model);
    batch = draw_samples(*cache, sampler);
    if (h.layout().dimension() <= kDefaultDenseCap) psi = model_state(*model, h.layout());
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::uint64_t t = 0; t <= h.n_steps(); ++t) {
    double sampled = nan, stderr_ = nan, exact_var = nan, ed_value = nan;
    if (model) {
      const ObservableEstimate est = estimate_observable(*cache, h, op, t, *batch);
      sampled = est.mean;
      stderr_ = est.std_error;
      if (psi) exact_var = exact_time_observable(*psi, h, op, t);
    }
    if (ed) ed_value = exact_time_magnetization(*ed, t);
    table.add_row({std::to_string(t), num(h.dt() * static_cast<double>(t)), num(sampled),
                   num(stderr_), num(exact_var), num(ed_value)});
  }
  return table;
}

std::optional<StateVector> exact_ground_state(const ClockHamiltonian& h, BasisIndex cap,
                                              std::ostream& err) {
  if (h.layout().dimension() > cap) {
    err << "warning: " << h.layout().dimension() << " basis states exceed the dense cap "
        << cap << "; exact columns left empty\n";
    return std::nullopt;
  }
  return ground_state(h, cap).state;
}

int cmd_diagnose(Context& ctx) {
  const RunConfig& c = ctx.config;
  std::vector<std::pair<int, int>> grid = c.grid;
  if (grid.empty()) {
    for (int total = 1; total <= c.max_total_spins; ++total) {
      for (int nt = 0; nt < total; ++nt) grid.emplace_back(total - nt, nt);
    }
  }
  CsvTable table;
  table.columns = {"n_s", "n_t", "n_p", "renyi2", "gini", "coverage", "energy"};
  json skipped = json::array();
  for (const auto& [ns, nt] : grid) {
    try {
      const ClockHamiltonian h = c.problem.hamiltonian(ns, nt);
      const DiagnosticsReport r = diagnose_ground_state(h);
      for (int np = 1; np <= ns; ++np) {
        table.add_row({std::to_string(ns), std::to_string(nt), std::to_string(np),
                       num(r.renyi2_per_spin[static_cast<std::size_t>(np - 1)]), num(r.gini),
                       num(r.coverage_ratio), num(r.ground_energy)});
      }
    } catch (const std::exception& e) {
      ctx.err << "warning: grid point n_s=" << ns << " n_t=" << nt << " skipped: " << e.what()
              << "\n";
      skipped.push_back({{"n_s", ns}, {"n_t", nt}, {"reason", e.what()}});
    }
  }
  write_atomic(c.out / "diagnostics.csv", table.render(&ctx.provenance));
  write_json(c.out / "diagnostics_summary.json",
             {{"points", grid.size() - skipped.size()}, {"skipped", skipped}}, ctx.provenance);
  ctx.out << "diagnostics: " << table.rows.size() << " rows -> "
          << (c.out / "diagnostics.csv").string() << "\n";
  return 0;
}

CsvTable trace_table(const TrainingTrace& trace, bool with_infidelity) {
  CsvTable t;
  t.columns = {"stage", "iter", "energy", "stderr", "acceptance", "grad_norm", "wallclock_ms"};
  if (with_infidelity) t.columns.push_back("infidelity");
  for (const auto& r : trace.records) {
    std::vector<std::string> row{std::to_string(r.stage), std::to_string(r.iteration),
                                 num(r.energy),           num(r.std_error),
                                 num(r.acceptance),       num(r.grad_norm),
                                 num(r.wallclock_ms)};
    if (with_infidelity) row.push_back(num(r.infidelity));
    t.add_row(std::move(row));
  }
  return t;
}

int cmd_train(Context& ctx) {
  const RunConfig& c = ctx.config;
  const ClockHamiltonian h = c.problem.hamiltonian();
  const std::uint64_t init_seed = derive_seed(c.seed, {1});
  const auto initial = init_parameters(c.ansatz, init_seed);
  const std::optional<StateVector> ed = exact_ground_state(h, c.vmc.dense_cap, ctx.err);

  TrainResult result;
  json hyper;
  if (c.mode == TrainMode::energy) {
    VmcConfig cfg = c.vmc;
    cfg.seed = derive_seed(c.seed, {2});
    result = train_vmc(*initial, h, cfg, ed ? &*ed : nullptr);
    hyper = c.resolved()["vmc"];
    hyper["sampler"] = c.resolved()["sampler"];
  } else {
    if (!ed) throw ConfigError("infidelity mode needs the exact ground state within the dense cap");
    result = c.infidelity.schedule_stages > 1
                 ? train_infidelity_adiabatic(*initial, h, c.infidelity)
                 : train_infidelity(*initial, *ed, c.infidelity);
    result.trace.final_energy = exact_variational_energy(*result.model, h);
    result.trace.final_energy_error = 0.0;
    hyper = c.resolved()["infidelity"];
  }

  const std::string stem = train_stem(c);
  write_atomic(c.out / (stem + "_trace.csv"),
               trace_table(result.trace, c.mode == TrainMode::infidelity).render(&ctx.provenance));
  json checkpoint = model_checkpoint(*result.model, init_seed);
  write_json(c.out / (stem + "_checkpoint.json"), checkpoint, ctx.provenance);

  SamplerConfig sampler = c.vmc.sampler;
  sampler.seed = derive_seed(c.seed, {3});
  const CsvTable mag = magnetization_table(h, result.model.get(), ed ? &*ed : nullptr, sampler);
  write_atomic(c.out / (stem + "_magnetization.csv"), mag.render(&ctx.provenance));

  json mag_json = json::array();
  for (const auto& row : mag.rows) {
    mag_json.push_back({{"t", std::stoi(row[0])},
                        {"sampled", num_json(parse_number(row[2]))},
                        {"sampled_stderr", num_json(parse_number(row[3]))},
                        {"exact_variational", num_json(parse_number(row[4]))},
                        {"ed", num_json(parse_number(row[5]))}});
  }
  json summary{{"command", "train"},
               {"ansatz", std::string(to_string(c.ansatz.kind))},
               {"model", spec_to_json(c.ansatz)},
               {"mode", std::string(to_string(c.mode))},
               {"n_phys", c.problem.n_phys},
               {"n_clock", c.problem.n_clock},
               {"n_steps", h.n_steps()},
               {"total_time", h.total_time()},
               {"seed", c.seed},
               {"hyper_parameters", hyper},
               {"final_energy", num_json(result.trace.final_energy)},
               {"final_energy_error", num_json(result.trace.final_energy_error)},
               {"final_infidelity", num_json(result.trace.final_infidelity)},
               {"iterations", result.trace.records.size()},
               {"events", result.trace.events},
               {"wallclock_ms", c.vmc.record_wallclock ? json(result.trace.wallclock_ms) : json(nullptr)},
               {"magnetization", mag_json}};
  write_json(c.out / (stem + "_summary.json"), summary, ctx.provenance);

  ctx.out << "train " << to_string(c.ansatz.kind) << " (" << to_string(c.mode) << "): energy "
          << num(result.trace.final_energy) << " +- " << num(result.trace.final_energy_error)
          << ", infidelity " << num(result.trace.final_infidelity) << "\n";
  return 0;
}

int cmd_tune(Context& ctx) {
  const RunConfig& c = ctx.config;
  const SearchSpace space = SearchSpace::for_ansatz(c.ansatz.kind);
  const std::string kind(to_string(c.ansatz.kind));
  CsvTable box;
  box.columns = {"n_s", "n_t", "rank", "trial_id", "objective", "infidelity"};
  json studies = json::array();
  for (int nt : c.clock_sweep) {
    const int ns = c.total_spins ? *c.total_spins - nt : c.problem.n_phys;
    const ClockHamiltonian h = c.problem.hamiltonian(ns, nt);
    std::shared_ptr<const StateVector> reference;
    if (h.layout().dimension() <= c.vmc.dense_cap) {
      reference = std::make_shared<StateVector>(ground_state(h, c.vmc.dense_cap).state);
    }
    StudyConfig sc;
    sc.n_trials = c.n_trials;
    sc.seed = derive_seed(c.seed, {4, static_cast<std::uint64_t>(ns), static_cast<std::uint64_t>(nt)});
    sc.tpe = c.tpe;
    sc.ledger = c.out / ("tune_" + kind + "_ns" + std::to_string(ns) + "_nt" + std::to_string(nt) + ".ndjson");
    sc.ledger_header = ctx.provenance.header_line();
    const StudyRecord study = run_study(space, vmc_objective(c.ansatz.kind, h, c.vmc, reference), sc);
    std::string warning;
    const auto best = study.best_k(10, &warning);
    if (!warning.empty()) ctx.err << "warning: n_t=" << nt << ": " << warning << "\n";
    for (const auto& t : study.trials) {
      if (t.status == TrialStatus::failed) {
        ctx.err << "trial " << t.id << " (n_t=" << nt << ") failed: " << t.message << "\n";
      }
    }
    for (std::size_t r = 0; r < best.size(); ++r) {
      box.add_row({std::to_string(ns), std::to_string(nt), std::to_string(r + 1),
                   std::to_string(best[r].id), num(best[r].objective), num(best[r].infidelity)});
    }
    studies.push_back({{"n_s", ns},
                       {"n_t", nt},
                       {"n_trials", study.trials.size()},
                       {"n_completed", study.n_completed()},
                       {"best", best.empty() ? json(nullptr) : best.front().to_json()}});
    ctx.out << "tune " << kind << " n_s=" << ns << " n_t=" << nt << ": "
            << study.n_completed() << "/" << study.trials.size() << " completed";
    if (!best.empty()) {
      ctx.out << ", best energy " << num(best.front().objective) << " (infidelity "
              << num(best.front().infidelity) << ")";
    }
    ctx.out << "\n";
  }
  write_atomic(c.out / ("tune_" + kind + "_boxplot.csv"), box.render(&ctx.provenance));
  write_json(c.out / ("tune_" + kind + "_summary.json"),
             {{"command", "tune"}, {"ansatz", kind}, {"studies", studies}}, ctx.provenance);
  return 0;
}

int cmd_evolve(Context& ctx) {
  const RunConfig& c = ctx.config;
  const ClockHamiltonian h = c.problem.hamiltonian();
  std::unique_ptr<Model> model;
  const bool want_model = c.checkpoint.has_value() || !c.exact;
  if (want_model) {
    const fs::path path = c.checkpoint ? *c.checkpoint : c.out / (train_stem(c) + "_checkpoint.json");
    const std::string text = read_text(path);
    try {
      model = model_from_checkpoint(json::parse(text));
    } catch (const json::exception& e) {
      throw ConfigError("unreadable checkpoint " + path.string() + ": " + e.what());
    }
    if (model->n_spins() != h.layout().size()) {
      throw ConfigError("checkpoint has " + std::to_string(model->n_spins()) +
                        " spins, problem needs " + std::to_string(h.layout().size()));
    }
  }
  std::optional<StateVector> ed;
  if (c.exact || h.layout().dimension() <= c.vmc.dense_cap) {
    ed = exact_ground_state(h, c.exact ? kDefaultDenseCap : c.vmc.dense_cap, ctx.err);
  }
  SamplerConfig sampler = c.vmc.sampler;
  sampler.seed = derive_seed(c.seed, {5});
  const CsvTable table = magnetization_table(h, model.get(), ed ? &*ed : nullptr, sampler);
  const fs::path path = c.out / "evolve_magnetization.csv";
  write_atomic(path, table.render(&ctx.provenance));
  ctx.out << "evolve: " << table.rows.size() << " time points -> " << path.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// report

std::vector<fs::path> sorted_matches(const fs::path& dir, std::string_view prefix,
                                     std::string_view suffix) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() >= prefix.size() + suffix.size() && name.starts_with(prefix) &&
        name.ends_with(suffix)) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_report(Context& ctx) {
  const RunConfig& c = ctx.config;
  json warnings = json::array();
  if (!fs::is_directory(c.out)) warnings.push_back("output directory " + c.out.string() + " does not exist");

  // (ansatz, method) -> n_t -> infidelity
  std::map<std::pair<std::string, std::string>, std::map<int, double>> table;
  json train = json::array();
  for (const auto& path : sorted_matches(c.out, "train_", "_summary.json")) {
    try {
      const json s = json::parse(read_text(path));
      const std::string method = s.at("mode").get<std::string>() == "energy" ? "vmc" : "infidelity";
      const double inf = s.at("final_infidelity").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                            : s.at("final_infidelity").get<double>();
      table[{s.at("ansatz").get<std::string>(), method}][s.at("n_clock").get<int>()] = inf;
      train.push_back({{"file", path.filename().string()},
                       {"ansatz", s.at("ansatz")},
                       {"mode", s.at("mode")},
                       {"n_phys", s.at("n_phys")},
                       {"n_clock", s.at("n_clock")},
                       {"final_energy", s.at("final_energy")},
                       {"final_infidelity", s.at("final_infidelity")}});
    } catch (const std::exception& e) {
      warnings.push_back("skipped " + path.filename().string() + ": " + e.what());
    }
  }
  json tune = json::array();
  for (const auto& path : sorted_matches(c.out, "tune_", ".ndjson")) {
    const std::string name = path.stem().string();  // tune_<kind>_ns<S>_nt<T>
    const auto ns_at = name.rfind("_ns");
    const auto nt_at = name.rfind("_nt");
    if (ns_at == std::string::npos || nt_at == std::string::npos || nt_at < ns_at) {
      warnings.push_back("skipped " + path.filename().string() + ": unrecognised name");
      continue;
    }
    try {
      const std::string kind = name.substr(5, ns_at - 5);
      const int ns = std::stoi(name.substr(ns_at + 3, nt_at - ns_at - 3));
      const int nt = std::stoi(name.substr(nt_at + 3));
      const StudyRecord study = load_ledger(path);
      const auto best = study.best_k(10);
      std::vector<double> infs;
      for (const auto& t : best) infs.push_back(t.infidelity);
      std::sort(infs.begin(), infs.end());
      const double median = infs.empty() ? std::numeric_limits<double>::quiet_NaN()
                                         : (infs.size() % 2 ? infs[infs.size() / 2]
                                                            : 0.5 * (infs[infs.size() / 2 - 1] + infs[infs.size() / 2]));
      if (!best.empty()) table[{kind, "vmc-tuned"}][nt] = best.front().infidelity;
      tune.push_back({{"file", path.filename().string()},
                      {"ansatz", kind},
                      {"n_phys", ns},
                      {"n_clock", nt},
                      {"n_trials", study.trials.size()},
                      {"n_completed", study.n_completed()},
                      {"best_objective", best.empty() ? json(nullptr) : num_json(best.front().objective)},
                      {"best_infidelity", best.empty() ? json(nullptr) : num_json(best.front().infidelity)},
                      {"best10_median_infidelity", num_json(median)}});
    } catch (const std::exception& e) {
      warnings.push_back("skipped " + path.filename().string() + ": " + e.what());
    }
  }
  json diagnostics = nullptr;
  if (fs::exists(c.out / "diagnostics.csv")) {
    try {
      const CsvTable d = read_csv(c.out / "diagnostics.csv");
      std::set<std::pair<std::string, std::string>> points;
      for (const auto& row : d.rows) points.emplace(row[d.column("n_s")], row[d.column("n_t")]);
      diagnostics = {{"rows", d.rows.size()}, {"grid_points", points.size()}};
    } catch (const std::exception& e) {
      warnings.push_back(std::string("skipped diagnostics.csv: ") + e.what());
    }
  }
  if (train.empty() && tune.empty() && diagnostics.is_null()) {
    warnings.push_back("no artifacts found in " + c.out.string());
  }

  std::set<int> clock_sizes;
  for (const auto& [key, row] : table) {
    for (const auto& [nt, v] : row) clock_sizes.insert(nt);
  }
  json comparison = json::array();
  for (const auto& [key, row] : table) {
    json entry{{"ansatz", key.first}, {"method", key.second}};
    json values = json::object();
    for (const auto& [nt, v] : row) values[std::to_string(nt)] = num_json(v);
    entry["infidelity_by_n_t"] = values;
    comparison.push_back(entry);
  }

  json report{{"command", "report"},
              {"train", train},
              {"tune", tune},
              {"diagnostics", diagnostics},
              {"comparison", comparison},
              {"warnings", warnings}};
  if (fs::is_directory(c.out)) write_json(c.out / "report.json", report, ctx.provenance);

  for (const auto& w : warnings) ctx.err << "warning: " << w.get<std::string>() << "\n";
  ctx.out << std::left << std::setw(10) << "ansatz" << std::setw(12) << "method";
  for (int nt : clock_sizes) ctx.out << std::setw(12) << ("N_T=" + std::to_string(nt));
  ctx.out << "\n";
  for (const auto& [key, row] : table) {
    ctx.out << std::setw(10) << key.first << std::setw(12) << key.second;
    for (int nt : clock_sizes) {
      auto it = row.find(nt);
      std::ostringstream cell;
      if (it == row.end()) {
        cell << "-";
      } else {
        cell << std::setprecision(3) << it->second;
      }
      ctx.out << std::setw(12) << cell.str();
    }
    ctx.out << "\n";
  }
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variational Monte Carlo and exact diagonalisation for clock-encoded time evolution"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool paper_scale = false;
  bool exact = false;
  std::optional<std::string> ansatz;
  std::optional<std::string> mode;
  std::optional<std::string> sampler;
  std::optional<std::string> checkpoint;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--seed", seed, "master seed (overrides CLOCKVMC_SEED and the config)");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_flag("--paper-scale", paper_scale, "full budget profile instead of the desk profile");
    sub->add_option("--ansatz", ansatz, "rbm | mp-rbm | ar | ar-split");
  };
  CLI::App* diagnose = app.add_subcommand("diagnose", "exact ground-state diagnostics over a grid");
  CLI::App* train = app.add_subcommand("train", "train one model (energy or infidelity)");
  CLI::App* tune = app.add_subcommand("tune", "hyper-parameter study per clock size");
  CLI::App* evolve = app.add_subcommand("evolve", "per-time-step magnetisation");
  CLI::App* report = app.add_subcommand("report", "merge artifacts in the output directory");
  for (CLI::App* sub : {diagnose, train, tune, evolve, report}) add_common(sub);
  train->add_option("--mode", mode, "energy | infidelity");
  tune->add_option("--sampler", sampler, "tpe | random");
  evolve->add_flag("--exact", exact, "exact ground-state column without a checkpoint");
  evolve->add_option("--checkpoint", checkpoint, "model checkpoint (JSON)");
  evolve->add_option("--mode", mode, "mode of the default checkpoint");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    std::string subcommand = app.get_subcommands().front()->get_name();
    json config = json::object();
    if (!config_path.empty()) {
      const std::string text = read_text(config_path);
      try {
        config = json::parse(text);
      } catch (const json::exception& e) {
        throw ConfigError("cannot parse " + config_path + ": " + e.what());
      }
    }
    if (ansatz) config["ansatz"]["kind"] = *ansatz;
    if (mode) config["mode"] = *mode;
    if (sampler) config["tune"]["sampler"] = *sampler;
    if (out_dir) config["out"] = *out_dir;
    if (const char* env = std::getenv("CLOCKVMC_SEED"); env && *env) {
      try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(env, &used);
        if (used != std::string_view(env).size()) throw std::invalid_argument("trailing text");
        config["seed"] = static_cast<std::uint64_t>(v);
      } catch (const std::exception&) {
        throw ConfigError("CLOCKVMC_SEED must be an unsigned integer");
      }
    }
    if (seed) config["seed"] = *seed;

    RunConfig rc = parse_run_config(config, subcommand, paper_scale);
    rc.exact = exact;
    if (checkpoint) rc.checkpoint = *checkpoint;
    Context ctx{rc, Provenance{subcommand, rc.config_hash(), rc.seed}, out, err};
    if (subcommand != "report") fs::create_directories(rc.out);
    if (subcommand == "diagnose") return cmd_diagnose(ctx);
    if (subcommand == "train") return cmd_train(ctx);
    if (subcommand == "tune") return cmd_tune(ctx);
    if (subcommand == "evolve") return cmd_evolve(ctx);
    return cmd_report(ctx);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const MissingArtifact& e) {
    err << "missing artifact: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace clockvmc
