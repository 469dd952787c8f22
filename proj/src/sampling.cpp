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

#include "clockvmc/sampling.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "clockvmc/errors.hpp"
#include "clockvmc/random.hpp"

namespace clockvmc {

namespace {
constexpr int kDenseCacheBits = 24;
constexpr int kStartRetries = 1000;
}  // namespace

LogPsiCache::LogPsiCache(const Model& model)
    : model_(model), dense_(model.n_spins() <= kDenseCacheBits), scratch_(model.n_spins()) {
  if (dense_) {
    const std::size_t dim = std::size_t{1} << model.n_spins();
    values_.resize(dim);
    filled_.assign(dim, 0);
  }
}

Complex LogPsiCache::operator()(BasisIndex index) {
  if (dense_) {
    if (!filled_[index]) {
      index_to_spins(index, scratch_);
      values_[index] = model_.log_psi(scratch_);
      filled_[index] = 1;
    }
    return values_[index];
  }
  auto it = sparse_.find(index);
  if (it != sparse_.end()) return it->second;
  index_to_spins(index, scratch_);
  const Complex v = model_.log_psi(scratch_);
  sparse_.emplace(index, v);
  return v;
}

void SamplerConfig::validate() const {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (n_chains < 1) throw std::invalid_argument("n_chains must be >= 1");
  if (burn_in_sweeps < 0 || thinning_sweeps < 0) {
    throw std::invalid_argument("burn-in and thinning must be non-negative");
  }
}

double metropolis_acceptance(Complex log_psi_old, Complex log_psi_new) {
  if (std::isinf(log_psi_new.real()) && log_psi_new.real() < 0) return 0.0;
  const double log_ratio = 2.0 * (log_psi_new.real() - log_psi_old.real());
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

SampleBatch metropolis_sample(const Model& model, const SamplerConfig& config) {
  LogPsiCache cache(model);
  return metropolis_sample(cache, config);
}

SampleBatch metropolis_sample(LogPsiCache& cache, const SamplerConfig& config) {
  config.validate();
  const int n = cache.model().n_spins();
  const BasisIndex dim_mask =
      n >= 64 ? ~BasisIndex{0} : (BasisIndex{1} << n) - 1;

  SampleBatch batch;
  batch.n_spins = n;
  batch.indices.reserve(config.n_samples);
  batch.chain_id.reserve(config.n_samples);
  batch.log_psi.reserve(config.n_samples);

  const long burn_in = static_cast<long>(config.burn_in_sweeps) * n;
  const long thinning = std::max(1L, static_cast<long>(config.thinning_sweeps) * n);
  std::size_t proposed = 0, accepted = 0;

  for (int chain = 0; chain < config.n_chains; ++chain) {
    const int n_keep = config.n_samples / config.n_chains +
                       (chain < config.n_samples % config.n_chains ? 1 : 0);
    if (n_keep == 0) continue;
    auto rng = make_rng(derive_seed(config.seed, {0x3e7a, static_cast<std::uint64_t>(chain)}));
    std::uniform_int_distribution<int> site(0, n - 1);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    BasisIndex current = 0;
    Complex log_current;
    int attempt = 0;
    for (;; ++attempt) {
      if (attempt == kStartRetries) {
        throw NumericError("Metropolis: model amplitude vanishes on every start configuration tried");
      }
      current = rng() & dim_mask;
      log_current = cache(current);
      if (std::isfinite(log_current.real())) break;
    }

    auto step = [&]() {
      const int j = site(rng);
      const BasisIndex candidate = current ^ (BasisIndex{1} << (n - 1 - j));
      const Complex log_candidate = cache(candidate);
      const double a = metropolis_acceptance(log_current, log_candidate);
      ++proposed;
      if (a >= 1.0 || uniform(rng) < a) {
        current = candidate;
        log_current = log_candidate;
        ++accepted;
      }
    };

    for (long s = 0; s < burn_in; ++s) step();
    for (int k = 0; k < n_keep; ++k) {
      for (long s = 0; s < thinning; ++s) step();
      batch.indices.push_back(current);
      batch.chain_id.push_back(chain);
      batch.log_psi.push_back(log_current);
    }
  }
  batch.acceptance_rate =
      proposed == 0 ? 1.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  return batch;
}

SampleBatch ar_direct_sample(const ArModel& model, int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  const int n = model.n_spins();
  auto rng = make_rng(derive_seed(seed, {0xa5}));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  // Conditionals for site i depend only on the i-bit prefix; memoise them.
  std::map<std::pair<int, BasisIndex>, std::array<Complex, 2>> memo;

  SampleBatch batch;
  batch.n_spins = n;
  batch.indices.reserve(n_samples);
  batch.chain_id.assign(n_samples, -1);
  batch.log_psi.reserve(n_samples);
  std::vector<Spin> spins(n);
  for (int s = 0; s < n_samples; ++s) {
    std::fill(spins.begin(), spins.end(), Spin{1});
    BasisIndex prefix = 0;
    Complex log_psi(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
      auto key = std::make_pair(i, prefix);
      auto it = memo.find(key);
      if (it == memo.end()) {
        const Eigen::MatrixX2cd lc = model.log_conditionals(spins);
        it = memo.emplace(key, std::array<Complex, 2>{lc(i, 0), lc(i, 1)}).first;
      }
      const auto& [log_up, log_down] = it->second;
      const double q_up = std::exp(2.0 * log_up.real());
      const bool up = uniform(rng) < q_up;
      spins[i] = up ? Spin{1} : Spin{-1};
      log_psi += up ? log_up : log_down;
      prefix = (prefix << 1) | (up ? 0U : 1U);
    }
    batch.indices.push_back(prefix);
    batch.log_psi.push_back(log_psi);
  }
  batch.acceptance_rate = 1.0;
  return batch;
}

SampleBatch draw_samples(LogPsiCache& cache, const SamplerConfig& config) {
  config.validate();
  if (is_autoregressive(cache.model().kind())) {
    const auto& ar = dynamic_cast<const ArModel&>(cache.model());
    return ar_direct_sample(ar, config.n_samples, config.seed);
  }
  return metropolis_sample(cache, config);
}

}  // namespace clockvmc
