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

#include <complex>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "clockvmc/models.hpp"
#include "clockvmc/spin_basis.hpp"

namespace clockvmc {

// Memoised log Psi over basis indices for one parameter snapshot. Dense storage
// up to 2^24 states, hash map beyond. Not thread-safe.
class LogPsiCache {
 public:
  explicit LogPsiCache(const Model& model);

  const Model& model() const { return model_; }
  Complex operator()(BasisIndex index);

 private:
  const Model& model_;
  bool dense_;
  std::vector<Complex> values_;
  std::vector<std::uint8_t> filled_;
  std::unordered_map<BasisIndex, Complex> sparse_;
  std::vector<Spin> scratch_;
};

struct SamplerConfig {
  int n_samples = 1024;
  int n_chains = 8;
  // Sweeps of n_spins single-flip proposals.
  int burn_in_sweeps = 10;
  int thinning_sweeps = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SampleBatch {
  int n_spins = 0;
  std::vector<BasisIndex> indices;
  std::vector<int> chain_id;  // -1 for independent (autoregressive) samples
  std::vector<Complex> log_psi;
  double acceptance_rate = 1.0;

  std::size_t size() const { return indices.size(); }
  SpinConfiguration configuration(std::size_t i, SpinLayout layout) const {
    return index_to_config(indices[i], layout);
  }
};

// min(1, |Psi(new)|^2 / |Psi(old)|^2), in log domain.
double metropolis_acceptance(Complex log_psi_old, Complex log_psi_new);

/// Single-spin-flip Metropolis-Hastings. Chains start at uniformly random
/// configurations, discard burn-in, and together return exactly n_samples.
SampleBatch metropolis_sample(const Model& model, const SamplerConfig& config);
SampleBatch metropolis_sample(LogPsiCache& cache, const SamplerConfig& config);

/// Exact ancestral sampling from the chained conditionals.
SampleBatch ar_direct_sample(const ArModel& model, int n_samples, std::uint64_t seed);

// Metropolis for RBM-family models, ancestral sampling for AR models.
SampleBatch draw_samples(LogPsiCache& cache, const SamplerConfig& config);

}  // namespace clockvmc
