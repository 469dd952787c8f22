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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "clockvmc/hamiltonian.hpp"
#include "clockvmc/models.hpp"
#include "clockvmc/vmc.hpp"

namespace clockvmc {

using HyperParams = std::map<std::string, double>;

struct Dimension {
  enum class Kind { int_uniform, log_uniform, categorical };

  std::string name;
  Kind kind = Kind::int_uniform;
  double low = 0.0;
  double high = 0.0;
  std::vector<double> choices;  // categorical only

  bool contains(double value) const;
};

struct SearchSpace {
  std::vector<Dimension> dims;

  // n_samples, learning_rate, plus n_chains and alpha (RBM family) or
  // n_layers and n_hidden (autoregressive family).
  static SearchSpace for_ansatz(AnsatzKind kind);

  const Dimension& dim(const std::string& name) const;
  bool contains(const HyperParams& params) const;
  HyperParams sample_prior(std::mt19937_64& rng) const;
};

struct TpeConfig {
  double gamma = 0.25;
  int n_candidates = 24;
  int n_startup = 10;
  bool random_search = false;  // prior sampling only

  void validate() const;
};

enum class TrialStatus { complete, failed, pending };
std::string_view to_string(TrialStatus status);
TrialStatus parse_trial_status(std::string_view text);

struct Trial {
  int id = 0;
  HyperParams params;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double infidelity = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  TrialStatus status = TrialStatus::pending;
  std::string message;

  nlohmann::json to_json() const;
  static Trial from_json(const nlohmann::json& j);
};

struct StudyRecord {
  std::vector<Trial> trials;

  std::size_t n_completed() const;
  // Lowest objectives first. With fewer than k completed trials, returns all
  // of them and sets *warning.
  std::vector<Trial> best_k(std::size_t k, std::string* warning = nullptr) const;
};

/// Tree-structured Parzen estimator over `space`. Only trial objectives are
/// read; pending trials count at the median completed objective.
HyperParams suggest(const StudyRecord& study, const SearchSpace& space,
                    const TpeConfig& config, std::uint64_t seed);

struct TrialOutcome {
  double objective = std::numeric_limits<double>::quiet_NaN();
  double infidelity = std::numeric_limits<double>::quiet_NaN();
};

// Throwing or returning a non-finite objective marks the trial failed.
using Objective = std::function<TrialOutcome(const HyperParams&, std::uint64_t seed)>;

struct StudyConfig {
  int n_trials = 30;
  std::uint64_t seed = 0;
  TpeConfig tpe;
  std::optional<std::filesystem::path> ledger;  // NDJSON, appended per trial
  std::string ledger_header;  // written as a '#' line when the ledger is created
};

/// Runs trials until the study holds n_trials. An existing ledger is loaded
/// first, so an interrupted study resumes at its recorded trial count.
StudyRecord run_study(const SearchSpace& space, const Objective& objective,
                      const StudyConfig& config);

// Lines starting with '#' are comments. A missing file is an empty study.
StudyRecord load_ledger(const std::filesystem::path& path);

/// Trains an ansatz on h with the sampled hyper-parameters and the iteration
/// budget in `base`; objective is the final estimated energy, infidelity is
/// measured against `reference` (diagnostic only).
Objective vmc_objective(AnsatzKind kind, const ClockHamiltonian& h, const VmcConfig& base,
                        std::shared_ptr<const StateVector> reference);

// Model dims and VmcConfig for one hyper-parameter assignment.
ModelSpec spec_for(AnsatzKind kind, int n_spins, const HyperParams& params);
VmcConfig config_for(const VmcConfig& base, const HyperParams& params);

}  // namespace clockvmc
