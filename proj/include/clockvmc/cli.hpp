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
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "clockvmc/models.hpp"
#include "clockvmc/tuner.hpp"
#include "clockvmc/vmc.hpp"

namespace clockvmc {

enum class TrainMode { energy, infidelity };
std::string_view to_string(TrainMode mode);
TrainMode parse_mode(std::string_view text);

struct ProblemConfig {
  int n_phys = 5;
  int n_clock = 4;
  std::optional<std::uint64_t> n_steps;  // default 2^n_clock - 1
  double coupling = 0.25;
  double field = 1.0;
  double total_time = 3.0;
  std::string initial_state = "all-up";

  ClockHamiltonian hamiltonian() const;
  ClockHamiltonian hamiltonian(int n_phys_override, int n_clock_override) const;
};

struct RunConfig {
  std::string subcommand;
  ProblemConfig problem;
  ModelSpec ansatz;  // n_spins filled from the problem
  TrainMode mode = TrainMode::energy;
  VmcConfig vmc;
  InfidelityConfig infidelity;

  // tune
  int n_trials = 30;
  TpeConfig tpe;
  std::vector<int> clock_sweep;      // default {problem.n_clock}
  std::optional<int> total_spins;    // n_phys = total_spins - n_clock per sweep point

  // diagnose
  int max_total_spins = 9;
  std::vector<std::pair<int, int>> grid;  // explicit (n_phys, n_clock); default from max_total_spins

  // evolve
  std::optional<std::filesystem::path> checkpoint;
  bool exact = false;

  bool paper_scale = false;
  std::filesystem::path out = "out";
  std::uint64_t seed = 0;

  // Canonical JSON of the resolved configuration, without out and seed.
  nlohmann::json resolved() const;
  std::string config_hash() const;
};

// Budget profile defaults, then the JSON config on top. Unknown keys and
// out-of-support values raise ConfigError.
RunConfig parse_run_config(const nlohmann::json& config, std::string subcommand, bool paper_scale);

// File stem shared by the train outputs and the evolve default checkpoint.
std::string train_stem(const RunConfig& config);

/// Entry point used by the clockvmc executable. Returns the process exit code:
/// 0 success, 1 configuration error, 2 numeric failure, 3 missing artifact.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace clockvmc
