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
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "clockvmc/exact_oracle.hpp"
#include "clockvmc/hamiltonian.hpp"
#include "clockvmc/models.hpp"
#include "clockvmc/sampling.hpp"

namespace clockvmc {

// E_loc(s) = sum_s' <s|H|s'> Psi(s')/Psi(s). NaN when Psi(s) == 0.
Complex local_energy(const Model& model, const ClockHamiltonian& h,
                     const SpinConfiguration& config);
Complex local_energy(LogPsiCache& cache, const ClockHamiltonian& h, BasisIndex index);

// Standard errors of Metropolis batches include the integrated autocorrelation
// time of the chains (never below the independent-sample value).
struct EnergyEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  double imag_mean = 0.0;     // vanishes in expectation for Hermitian H
  std::size_t n_used = 0;
  std::size_t n_flagged = 0;  // zero-amplitude samples left out
  bool single_sample = false; // std_error undefined, reported as 0
};

EnergyEstimate estimate_energy(const Model& model, const ClockHamiltonian& h,
                               const SampleBatch& batch);

struct GradientEstimate {
  EnergyEstimate energy;
  std::vector<double> gradient;  // dE/dp_k over the real parameter slots
};

/// 2 Re < (O_k - <O_k>)^* (E_loc - <E_loc>) > over the batch.
GradientEstimate estimate_gradient(const Model& model, const ClockHamiltonian& h,
                                   const SampleBatch& batch);
GradientEstimate estimate_gradient(LogPsiCache& cache, const ClockHamiltonian& h,
                                   const SampleBatch& batch);

// Same estimator with the exact weights P(s) over the whole basis.
GradientEstimate exact_energy_gradient(const Model& model, const ClockHamiltonian& h);

struct AdamWConfig {
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
};

/// Adam with decoupled weight decay:
///   p <- p (1 - lr wd);  p <- p - lr m_hat / (sqrt(v_hat) + eps)
class AdamW {
 public:
  AdamW(std::size_t n_params, AdamWConfig config);

  // Returns false (and leaves everything untouched) on a non-finite gradient.
  bool step(std::span<double> params, std::span<const double> grad);

  std::size_t steps() const { return t_; }
  const AdamWConfig& config() const { return config_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }

 private:
  AdamWConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t t_ = 0;
};

struct VmcConfig {
  double learning_rate = 1e-2;
  int iterations_per_stage = 300;
  int schedule_stages = 20;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  SamplerConfig sampler;
  std::uint64_t seed = 0;
  bool record_wallclock = false;
  // Compare against the exact ground state at the end (dense cap permitting).
  bool final_infidelity = true;
  // Batch for the reported final energy; the larger of this and sampler.n_samples.
  int final_samples = 8192;
  BasisIndex dense_cap = BasisIndex{1} << 12;

  void validate() const;
  AdamWConfig adamw() const {
    return {learning_rate, beta1, beta2, epsilon, weight_decay};
  }
};

struct TraceRecord {
  int stage = 0;
  int iteration = 0;
  double energy = 0.0;
  double std_error = 0.0;
  double acceptance = 1.0;
  double grad_norm = 0.0;
  double param_norm = 0.0;
  double wallclock_ms = 0.0;
  double infidelity = std::numeric_limits<double>::quiet_NaN();
  bool step_rejected = false;
};

struct TrainingTrace {
  std::vector<TraceRecord> records;
  std::vector<std::string> events;
  double final_energy = std::numeric_limits<double>::quiet_NaN();
  double final_energy_error = std::numeric_limits<double>::quiet_NaN();
  double final_infidelity = std::numeric_limits<double>::quiet_NaN();
  double wallclock_ms = 0.0;
};

struct TrainResult {
  std::unique_ptr<Model> model;
  TrainingTrace trace;
};

/// Energy minimisation with the adiabatic clock schedule: stage k of K trains
/// on the Hamiltonian with total time k T / K (same number of steps).
/// `reference` (the exact ground state of h) skips the final diagonalisation.
TrainResult train_vmc(const Model& initial, const ClockHamiltonian& h,
                      const VmcConfig& config, const StateVector* reference = nullptr);

struct InfidelityConfig {
  double learning_rate = 1e-2;
  int iterations_per_stage = 2000;
  int schedule_stages = 1;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  bool record_wallclock = false;

  AdamWConfig adamw() const {
    return {learning_rate, beta1, beta2, epsilon, weight_decay};
  }
};

struct InfidelityGradient {
  double infidelity = 1.0;
  std::vector<double> gradient;
};

// 1 - |<target|Psi>|^2 / (<Psi|Psi><target|target>) and its gradient, by full enumeration.
InfidelityGradient infidelity_gradient(const Model& model, const StateVector& target);

TrainResult train_infidelity(const Model& initial, const StateVector& target,
                             const InfidelityConfig& config);
// Adiabatic variant: stage k targets the exact ground state at total time k T / K.
TrainResult train_infidelity_adiabatic(const Model& initial, const ClockHamiltonian& h,
                                       const InfidelityConfig& config);

struct ObservableEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// (N+1) < sum_s' <s|O (x) |t><t||s'> Psi(s')/Psi(s) > over the batch.
ObservableEstimate estimate_observable(const Model& model, const ClockHamiltonian& h,
                                       const PhysicalOperator& op, std::uint64_t t,
                                       const SampleBatch& batch);
ObservableEstimate estimate_observable(LogPsiCache& cache, const ClockHamiltonian& h,
                                       const PhysicalOperator& op, std::uint64_t t,
                                       const SampleBatch& batch);

}  // namespace clockvmc
