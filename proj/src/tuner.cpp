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

#include "clockvmc/tuner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <numbers>
#include <stdexcept>

#include "clockvmc/errors.hpp"
#include "clockvmc/io.hpp"
#include "clockvmc/random.hpp"

namespace clockvmc {

namespace {
constexpr double kNegativeEnergySigmas = 5.0;
}  // namespace

bool Dimension::contains(double value) const {
  switch (kind) {
    case Kind::int_uniform:
      return value >= low && value <= high && value == std::round(value);
    case Kind::log_uniform:
      return value >= low && value <= high;
    case Kind::categorical:
      return std::find(choices.begin(), choices.end(), value) != choices.end();
  }
  return false;
}

SearchSpace SearchSpace::for_ansatz(AnsatzKind kind) {
  SearchSpace s;
  s.dims.push_back({"n_samples", Dimension::Kind::int_uniform, 256, 2048, {}});
  s.dims.push_back({"learning_rate", Dimension::Kind::log_uniform, 1e-4, 1.0, {}});
  if (is_autoregressive(kind)) {
    s.dims.push_back({"n_layers", Dimension::Kind::categorical, 0, 0, {1, 2, 3}});
    s.dims.push_back({"n_hidden", Dimension::Kind::categorical, 0, 0, {2, 4, 8, 16, 32}});
  } else {
    s.dims.push_back({"n_chains", Dimension::Kind::categorical, 0, 0, {4, 8, 16}});
    s.dims.push_back({"alpha", Dimension::Kind::categorical, 0, 0, {1, 2, 3, 4, 5}});
  }
  return s;
}

const Dimension& SearchSpace::dim(const std::string& name) const {
  for (const auto& d : dims) {
    if (d.name == name) return d;
  }
  throw std::out_of_range("no search dimension " + name);
}

bool SearchSpace::contains(const HyperParams& params) const {
  if (params.size() != dims.size()) return false;
  for (const auto& d : dims) {
    auto it = params.find(d.name);
    if (it == params.end() || !d.contains(it->second)) return false;
  }
  return true;
}

namespace {

double sample_dim_prior(const Dimension& d, std::mt19937_64& rng) {
  switch (d.kind) {
    case Dimension::Kind::int_uniform: {
      std::uniform_int_distribution<long> u(static_cast<long>(d.low), static_cast<long>(d.high));
      return static_cast<double>(u(rng));
    }
    case Dimension::Kind::log_uniform: {
      std::uniform_real_distribution<double> u(std::log(d.low), std::log(d.high));
      return std::clamp(std::exp(u(rng)), d.low, d.high);
    }
    case Dimension::Kind::categorical: {
      std::uniform_int_distribution<std::size_t> u(0, d.choices.size() - 1);
      return d.choices[u(rng)];
    }
  }
  return 0.0;
}

}  // namespace

HyperParams SearchSpace::sample_prior(std::mt19937_64& rng) const {
  HyperParams p;
  for (const auto& d : dims) p[d.name] = sample_dim_prior(d, rng);
  return p;
}

void TpeConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("tpe gamma must lie in (0, 1)");
  if (n_candidates < 1) throw std::invalid_argument("tpe n_candidates must be >= 1");
  if (n_startup < 0) throw std::invalid_argument("tpe n_startup must be >= 0");
}

std::string_view to_string(TrialStatus status) {
  switch (status) {
    case TrialStatus::complete: return "complete";
    case TrialStatus::failed: return "failed";
    case TrialStatus::pending: return "pending";
  }
  return "pending";
}

TrialStatus parse_trial_status(std::string_view text) {
  if (text == "complete") return TrialStatus::complete;
  if (text == "failed") return TrialStatus::failed;
  if (text == "pending") return TrialStatus::pending;
  throw std::invalid_argument("unknown trial status " + std::string(text));
}

namespace {
nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}
double number_from(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}
}  // namespace

nlohmann::json Trial::to_json() const {
  nlohmann::json j;
  j["trial_id"] = id;
  j["params"] = params;
  j["objective"] = number_or_null(objective);
  j["infidelity"] = number_or_null(infidelity);
  j["seed"] = seed;
  j["status"] = std::string(to_string(status));
  if (!message.empty()) j["message"] = message;
  return j;
}

Trial Trial::from_json(const nlohmann::json& j) {
  Trial t;
  t.id = j.at("trial_id").get<int>();
  t.params = j.at("params").get<HyperParams>();
  t.objective = number_from(j.at("objective"));
  t.infidelity = number_from(j.at("infidelity"));
  t.seed = j.at("seed").get<std::uint64_t>();
  t.status = parse_trial_status(j.at("status").get<std::string>());
  if (j.contains("message")) t.message = j.at("message").get<std::string>();
  return t;
}

std::size_t StudyRecord::n_completed() const {
  return static_cast<std::size_t>(std::count_if(trials.begin(), trials.end(), [](const Trial& t) {
    return t.status == TrialStatus::complete;
  }));
}

std::vector<Trial> StudyRecord::best_k(std::size_t k, std::string* warning) const {
  std::vector<Trial> done;
  for (const auto& t : trials) {
    if (t.status == TrialStatus::complete) done.push_back(t);
  }
  std::stable_sort(done.begin(), done.end(),
                   [](const Trial& a, const Trial& b) { return a.objective < b.objective; });
  if (done.size() < k) {
    if (warning) {
      *warning = "only " + std::to_string(done.size()) + " completed trials, fewer than " +
                 std::to_string(k);
    }
  } else {
    done.resize(k);
  }
  return done;
}

// ---------------------------------------------------------------------------
// Parzen estimators

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

// Mixture of a uniform prior on [low, high] and Gaussians truncated to it.
// Bandwidths follow the adjacent-point rule over the sorted observations with
// the bounds appended, clipped to [(high-low)/min(100, n+1), high-low].
struct ContinuousParzen {
  double low, high;
  std::vector<double> mu, sigma;

  ContinuousParzen(std::vector<double> points, double lo, double hi) : low(lo), high(hi) {
    std::sort(points.begin(), points.end());
    const double span = high - low;
    const std::size_t n = points.size();
    const double min_sigma = span / std::min(100.0, static_cast<double>(n) + 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double left = i == 0 ? points[i] - low : points[i] - points[i - 1];
      const double right = i + 1 == n ? high - points[i] : points[i + 1] - points[i];
      mu.push_back(points[i]);
      sigma.push_back(std::clamp(std::max(left, right), min_sigma, span));
    }
  }

  double log_density(double x) const {
    const double span = high - low;
    double p = 1.0 / span;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const double z = (x - mu[i]) / sigma[i];
      const double mass = normal_cdf((high - mu[i]) / sigma[i]) - normal_cdf((low - mu[i]) / sigma[i]);
      p += std::exp(-0.5 * z * z) / (sigma[i] * std::sqrt(2.0 * std::numbers::pi) * mass);
    }
    return std::log(p / static_cast<double>(mu.size() + 1));
  }

  double sample(std::mt19937_64& rng) const {
    std::uniform_int_distribution<std::size_t> pick(0, mu.size());
    const std::size_t c = pick(rng);
    if (c == mu.size()) return std::uniform_real_distribution<double>(low, high)(rng);
    std::normal_distribution<double> g(mu[c], sigma[c]);
    for (int attempt = 0; attempt < 100; ++attempt) {
      const double x = g(rng);
      if (x >= low && x <= high) return x;
    }
    return std::clamp(mu[c], low, high);
  }
};

struct CategoricalParzen {
  std::vector<double> choices;
  std::vector<double> weights;  // (1 + count) / (K + n)

  CategoricalParzen(const std::vector<double>& values, std::vector<double> options)
      : choices(std::move(options)), weights(choices.size(), 1.0) {
    for (double v : values) {
      auto it = std::find(choices.begin(), choices.end(), v);
      if (it != choices.end()) weights[static_cast<std::size_t>(it - choices.begin())] += 1.0;
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double& w : weights) w /= total;
  }

  double log_density(double x) const {
    auto it = std::find(choices.begin(), choices.end(), x);
    return std::log(weights[static_cast<std::size_t>(it - choices.begin())]);
  }

  double sample(std::mt19937_64& rng) const {
    std::discrete_distribution<std::size_t> d(weights.begin(), weights.end());
    return choices[d(rng)];
  }
};

// Work in log space for log-uniform dims and on the integer range for ints.
double to_model_space(const Dimension& d, double v) {
  return d.kind == Dimension::Kind::log_uniform ? std::log(v) : v;
}

double from_model_space(const Dimension& d, double x) {
  if (d.kind == Dimension::Kind::log_uniform) return std::clamp(std::exp(x), d.low, d.high);
  return std::clamp(std::round(x), d.low, d.high);
}

struct DimensionModel {
  std::optional<ContinuousParzen> cont;
  std::optional<CategoricalParzen> cat;

  DimensionModel(const Dimension& d, const std::vector<double>& values) {
    if (d.kind == Dimension::Kind::categorical) {
      cat.emplace(values, d.choices);
    } else {
      std::vector<double> pts;
      for (double v : values) pts.push_back(to_model_space(d, v));
      // integers are spread over [low - 1/2, high + 1/2] so both ends round inward
      const double pad = d.kind == Dimension::Kind::int_uniform ? 0.5 : 0.0;
      cont.emplace(pts, to_model_space(d, d.low) - pad, to_model_space(d, d.high) + pad);
    }
  }
};

}  // namespace

HyperParams suggest(const StudyRecord& study, const SearchSpace& space, const TpeConfig& config,
                    std::uint64_t seed) {
  config.validate();
  auto rng = make_rng(derive_seed(seed, {0x79e}));

  std::vector<const Trial*> done;
  std::vector<const Trial*> pending;
  for (const auto& t : study.trials) {
    if (t.status == TrialStatus::complete) done.push_back(&t);
    if (t.status == TrialStatus::pending) pending.push_back(&t);
  }
  if (config.random_search || static_cast<int>(done.size()) < config.n_startup || done.empty()) {
    return space.sample_prior(rng);
  }

  // Constant liar: pending trials are imputed at the median objective.
  std::vector<std::pair<double, const Trial*>> scored;
  for (const Trial* t : done) scored.emplace_back(t->objective, t);
  {
    std::vector<double> objs;
    for (const Trial* t : done) objs.push_back(t->objective);
    std::nth_element(objs.begin(), objs.begin() + static_cast<long>(objs.size() / 2), objs.end());
    const double median = objs[objs.size() / 2];
    for (const Trial* t : pending) scored.emplace_back(median, t);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  if (scored.front().first == scored.back().first) return space.sample_prior(rng);

  const std::size_t n = scored.size();
  const std::size_t n_good = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(config.gamma * static_cast<double>(n))), 1, n - 1);

  std::vector<DimensionModel> good, bad;
  for (const auto& d : space.dims) {
    std::vector<double> gv, bv;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = scored[i].second->params.at(d.name);
      (i < n_good ? gv : bv).push_back(v);
    }
    good.emplace_back(d, gv);
    bad.emplace_back(d, bv);
  }

  HyperParams best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < config.n_candidates; ++c) {
    HyperParams cand;
    double score = 0.0;
    for (std::size_t k = 0; k < space.dims.size(); ++k) {
      const Dimension& d = space.dims[k];
      if (good[k].cat) {
        const double v = good[k].cat->sample(rng);
        cand[d.name] = v;
        score += good[k].cat->log_density(v) - bad[k].cat->log_density(v);
      } else {
        const double x = good[k].cont->sample(rng);
        const double v = from_model_space(d, x);
        const double xv = d.kind == Dimension::Kind::int_uniform ? v : x;
        cand[d.name] = v;
        score += good[k].cont->log_density(xv) - bad[k].cont->log_density(xv);
      }
    }
    if (score > best_score) {
      best_score = score;
      best = std::move(cand);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

StudyRecord load_ledger(const std::filesystem::path& path) {
  StudyRecord study;
  if (!std::filesystem::exists(path)) return study;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    study.trials.push_back(Trial::from_json(nlohmann::json::parse(line)));
  }
  return study;
}

namespace {
void append_ledger(const std::filesystem::path& path, const Trial& trial,
                   const std::string& header) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (fresh && !header.empty()) out << header << '\n';
  if (!out) throw std::runtime_error("cannot append to ledger " + path.string());
  out << trial.to_json().dump() << '\n';
  out.flush();
}
}  // namespace

StudyRecord run_study(const SearchSpace& space, const Objective& objective,
                      const StudyConfig& config) {
  config.tpe.validate();
  if (config.n_trials < 0) throw std::invalid_argument("n_trials must be >= 0");
  StudyRecord study;
  if (config.ledger) study = load_ledger(*config.ledger);
  // A pending record is a trial that was interrupted; run it again.
  std::erase_if(study.trials, [](const Trial& t) { return t.status == TrialStatus::pending; });

  for (int id = static_cast<int>(study.trials.size()); id < config.n_trials; ++id) {
    Trial trial;
    trial.id = id;
    trial.seed = derive_seed(config.seed, {static_cast<std::uint64_t>(id), 0x7e1a1ULL});
    trial.params = suggest(study, space, config.tpe,
                           derive_seed(config.seed, {static_cast<std::uint64_t>(id), 0x5e99ULL}));
    try {
      const TrialOutcome out = objective(trial.params, trial.seed);
      trial.objective = out.objective;
      trial.infidelity = out.infidelity;
      if (std::isfinite(out.objective)) {
        trial.status = TrialStatus::complete;
      } else {
        trial.status = TrialStatus::failed;
        trial.message = "non-finite objective";
      }
    } catch (const std::exception& e) {
      trial.status = TrialStatus::failed;
      trial.message = e.what();
    }
    if (config.ledger) append_ledger(*config.ledger, trial, config.ledger_header);
    study.trials.push_back(std::move(trial));
  }
  return study;
}

ModelSpec spec_for(AnsatzKind kind, int n_spins, const HyperParams& params) {
  ModelSpec spec;
  spec.kind = kind;
  spec.n_spins = n_spins;
  if (is_autoregressive(kind)) {
    spec.n_layers = static_cast<int>(params.at("n_layers"));
    spec.n_hidden = static_cast<int>(params.at("n_hidden"));
  } else {
    spec.alpha = static_cast<int>(params.at("alpha"));
  }
  spec.validate();
  return spec;
}

VmcConfig config_for(const VmcConfig& base, const HyperParams& params) {
  VmcConfig cfg = base;
  cfg.learning_rate = params.at("learning_rate");
  cfg.sampler.n_samples = static_cast<int>(params.at("n_samples"));
  if (auto it = params.find("n_chains"); it != params.end()) {
    cfg.sampler.n_chains = static_cast<int>(it->second);
  }
  return cfg;
}

Objective vmc_objective(AnsatzKind kind, const ClockHamiltonian& h, const VmcConfig& base,
                        std::shared_ptr<const StateVector> reference) {
  return [kind, h, base, reference](const HyperParams& params, std::uint64_t seed) {
    const ModelSpec spec = spec_for(kind, h.layout().size(), params);
    VmcConfig cfg = config_for(base, params);
    cfg.seed = seed;
    const auto model = init_parameters(spec, derive_seed(seed, {0x1417ULL}));
    const TrainResult r = train_vmc(*model, h, cfg, reference.get());
    // The clock Hamiltonian is a sum of positive semidefinite terms, so an
    // estimate clearly below zero means the chains stopped mixing.
    if (r.trace.final_energy < -kNegativeEnergySigmas * r.trace.final_energy_error - 1e-12) {
      throw NumericError("estimated energy " + format_number(r.trace.final_energy) +
                         " lies below the spectrum; sampler failed to equilibrate");
    }
    return TrialOutcome{r.trace.final_energy, r.trace.final_infidelity};
  };
}

}  // namespace clockvmc
