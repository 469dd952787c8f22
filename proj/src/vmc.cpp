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

#include "clockvmc/vmc.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "clockvmc/errors.hpp"
#include "clockvmc/random.hpp"

namespace clockvmc {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

bool vanishing(Complex log_psi) {
  return std::isinf(log_psi.real()) && log_psi.real() < 0.0;
}

double l2_norm(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

// Standard error of the mean of a Markov-chain batch: sqrt(var tau / n) with the
// integrated autocorrelation time tau from the chain-averaged autocorrelation
// (deviations taken from the pooled mean, so offsets between chains count as
// correlation). The window grows until it exceeds kSokalWindow * tau. tau is
// floored at 1, the independent-sample value. Samples of one chain are contiguous.
constexpr double kSokalWindow = 5.0;

double std_error_of_mean(const std::vector<double>& values, const std::vector<int>& chain) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n - 1);
  if (var == 0.0) return 0.0;
  double tau = 1.0;
  if (!chain.empty() && chain.front() >= 0) {
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    std::size_t shortest = n;
    for (std::size_t begin = 0; begin < n;) {
      std::size_t end = begin;
      while (end < n && chain[end] == chain[begin]) ++end;
      runs.emplace_back(begin, end);
      shortest = std::min(shortest, end - begin);
      begin = end;
    }
    for (std::size_t lag = 1; lag < shortest / 2; ++lag) {
      double cov = 0.0;
      std::size_t pairs = 0;
      for (const auto& [begin, end] : runs) {
        for (std::size_t i = begin; i + lag < end; ++i) {
          cov += (values[i] - mean) * (values[i + lag] - mean);
        }
        pairs += end - begin - lag;
      }
      tau += 2.0 * cov / static_cast<double>(pairs) / var;
      if (static_cast<double>(lag) >= kSokalWindow * tau) break;
    }
    tau = std::max(tau, 1.0);
  }
  return std::sqrt(var * tau / static_cast<double>(n));
}

struct WeightedEntry {
  BasisIndex index;
  double weight;
};

// Covariance-form gradient over weighted basis states. Local energies are
// passed in so both the sampled and the exhaustive route share one code path.
std::vector<double> covariance_gradient(const Model& model,
                                        const std::vector<WeightedEntry>& entries,
                                        const std::vector<Complex>& e_loc,
                                        Complex e_mean) {
  const std::size_t np = model.n_params();
  std::vector<Complex> acc(np, Complex(0.0, 0.0));
  std::vector<Complex> o(np);
  std::vector<Spin> spins(model.n_spins());
  double total = 0.0;
  for (std::size_t e = 0; e < entries.size(); ++e) {
    index_to_spins(entries[e].index, spins);
    model.log_derivatives(spins, o);
    const Complex centred = entries[e].weight * (e_loc[e] - e_mean);
    for (std::size_t k = 0; k < np; ++k) acc[k] += std::conj(o[k]) * centred;
    total += entries[e].weight;
  }
  std::vector<double> grad(np);
  for (std::size_t k = 0; k < np; ++k) grad[k] = 2.0 * acc[k].real() / total;
  return grad;
}

struct GroupedBatch {
  std::vector<WeightedEntry> entries;
  std::vector<Complex> e_loc;
  std::size_t n_flagged = 0;
  // per kept sample, in batch order
  std::vector<double> sample_energy;
  std::vector<int> sample_chain;
};

GroupedBatch group_batch(LogPsiCache& cache, const ClockHamiltonian& h,
                         const SampleBatch& batch) {
  if (batch.size() == 0) throw std::invalid_argument("empty sample batch");
  std::map<BasisIndex, double> counts;
  GroupedBatch grouped;
  for (BasisIndex index : batch.indices) {
    if (vanishing(cache(index))) {
      ++grouped.n_flagged;
      continue;
    }
    counts[index] += 1.0;
  }
  if (counts.empty()) throw NumericError("every sample has zero amplitude");
  std::map<BasisIndex, double> energy_of;
  for (const auto& [index, count] : counts) {
    grouped.entries.push_back({index, count});
    grouped.e_loc.push_back(local_energy(cache, h, index));
    energy_of[index] = grouped.e_loc.back().real();
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    auto it = energy_of.find(batch.indices[i]);
    if (it == energy_of.end()) continue;
    grouped.sample_energy.push_back(it->second);
    grouped.sample_chain.push_back(batch.chain_id.empty() ? -1 : batch.chain_id[i]);
  }
  return grouped;
}

EnergyEstimate summarise(const GroupedBatch& g) {
  EnergyEstimate est;
  double w = 0.0;
  Complex sum(0.0, 0.0);
  for (std::size_t e = 0; e < g.entries.size(); ++e) {
    w += g.entries[e].weight;
    sum += g.entries[e].weight * g.e_loc[e];
  }
  est.mean = sum.real() / w;
  est.imag_mean = sum.imag() / w;
  est.n_used = static_cast<std::size_t>(w);
  est.n_flagged = g.n_flagged;
  if (est.n_used <= 1) {
    est.single_sample = true;
    est.std_error = 0.0;
  } else {
    est.std_error = std_error_of_mean(g.sample_energy, g.sample_chain);
  }
  if (!std::isfinite(est.mean)) throw NumericError("non-finite energy estimate");
  return est;
}

}  // namespace

Complex local_energy(LogPsiCache& cache, const ClockHamiltonian& h, BasisIndex index) {
  const Complex log_here = cache(index);
  if (vanishing(log_here)) {
    return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  }
  Complex e(0.0, 0.0);
  for (const auto& [j, v] : h.row(index)) {
    const Complex log_there = j == index ? log_here : cache(j);
    if (vanishing(log_there)) continue;
    e += v * std::exp(log_there - log_here);
  }
  return e;
}

Complex local_energy(const Model& model, const ClockHamiltonian& h,
                     const SpinConfiguration& config) {
  if (config.layout() != h.layout()) {
    throw std::invalid_argument("configuration layout does not match Hamiltonian");
  }
  LogPsiCache cache(model);
  return local_energy(cache, h, config_to_index(config));
}

EnergyEstimate estimate_energy(const Model& model, const ClockHamiltonian& h,
                               const SampleBatch& batch) {
  LogPsiCache cache(model);
  return summarise(group_batch(cache, h, batch));
}

GradientEstimate estimate_gradient(LogPsiCache& cache, const ClockHamiltonian& h,
                                   const SampleBatch& batch) {
  const GroupedBatch g = group_batch(cache, h, batch);
  GradientEstimate out;
  out.energy = summarise(g);
  const Complex mean(out.energy.mean, out.energy.imag_mean);
  out.gradient = covariance_gradient(cache.model(), g.entries, g.e_loc, mean);
  return out;
}

GradientEstimate estimate_gradient(const Model& model, const ClockHamiltonian& h,
                                   const SampleBatch& batch) {
  LogPsiCache cache(model);
  return estimate_gradient(cache, h, batch);
}

GradientEstimate exact_energy_gradient(const Model& model, const ClockHamiltonian& h) {
  LogPsiCache cache(model);
  const BasisIndex dim = h.layout().dimension();
  double max_re = -std::numeric_limits<double>::infinity();
  for (BasisIndex i = 0; i < dim; ++i) max_re = std::max(max_re, cache(i).real());
  if (!std::isfinite(max_re)) throw std::domain_error("model amplitudes vanish everywhere");

  GroupedBatch g;
  for (BasisIndex i = 0; i < dim; ++i) {
    const Complex lp = cache(i);
    if (vanishing(lp)) continue;
    const double p = std::exp(2.0 * (lp.real() - max_re));
    if (p == 0.0) continue;
    g.entries.push_back({i, p});
    g.e_loc.push_back(local_energy(cache, h, i));
  }
  double w = 0.0;
  Complex sum(0.0, 0.0);
  for (std::size_t e = 0; e < g.entries.size(); ++e) {
    w += g.entries[e].weight;
    sum += g.entries[e].weight * g.e_loc[e];
  }
  GradientEstimate out;
  out.energy.mean = sum.real() / w;
  out.energy.imag_mean = sum.imag() / w;
  out.energy.n_used = g.entries.size();
  out.gradient = covariance_gradient(model, g.entries, g.e_loc, sum / w);
  return out;
}

// ---------------------------------------------------------------------------

AdamW::AdamW(std::size_t n_params, AdamWConfig config)
    : config_(config), m_(n_params, 0.0), v_(n_params, 0.0) {
  if (!(config.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (config.weight_decay < 0.0) throw std::invalid_argument("weight decay must be non-negative");
}

bool AdamW::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw std::invalid_argument("AdamW: parameter/gradient size mismatch");
  }
  for (double g : grad) {
    if (!std::isfinite(g)) return false;
  }
  ++t_;
  const double lr = config_.learning_rate;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    params[k] *= 1.0 - lr * config_.weight_decay;
    m_[k] = config_.beta1 * m_[k] + (1.0 - config_.beta1) * grad[k];
    v_[k] = config_.beta2 * v_[k] + (1.0 - config_.beta2) * grad[k] * grad[k];
    const double m_hat = m_[k] / bc1;
    const double v_hat = v_[k] / bc2;
    params[k] -= lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
  }
  return true;
}

// ---------------------------------------------------------------------------

void VmcConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (iterations_per_stage < 0) throw std::invalid_argument("iterations_per_stage must be >= 0");
  if (schedule_stages < 1) throw std::invalid_argument("schedule_stages must be >= 1");
  if (weight_decay < 0.0) throw std::invalid_argument("weight_decay must be >= 0");
  if (final_samples < 1) throw std::invalid_argument("final_samples must be >= 1");
  sampler.validate();
}

TrainResult train_vmc(const Model& initial, const ClockHamiltonian& h,
                      const VmcConfig& config, const StateVector* reference) {
  config.validate();
  if (initial.n_spins() != h.layout().size()) {
    throw std::invalid_argument("model size does not match Hamiltonian");
  }
  const auto start = Clock::now();
  TrainResult result{initial.clone(), {}};
  Model& model = *result.model;
  std::vector<double> params = model.parameters();
  AdamW optimizer(params.size(), config.adamw());

  for (int k = 1; k <= config.schedule_stages; ++k) {
    const double t_k = h.total_time() * k / config.schedule_stages;
    const ClockHamiltonian stage_h = h.with_total_time(t_k);
    double first_energy = 0.0, last_energy = 0.0;
    for (int it = 0; it < config.iterations_per_stage; ++it) {
      LogPsiCache cache(model);
      SamplerConfig sampler = config.sampler;
      sampler.seed = derive_seed(config.seed, {static_cast<std::uint64_t>(k),
                                               static_cast<std::uint64_t>(it)});
      const SampleBatch batch = draw_samples(cache, sampler);
      const GradientEstimate g = estimate_gradient(cache, stage_h, batch);

      TraceRecord rec;
      rec.stage = k;
      rec.iteration = it;
      rec.energy = g.energy.mean;
      rec.std_error = g.energy.std_error;
      rec.acceptance = batch.acceptance_rate;
      rec.grad_norm = l2_norm(g.gradient);
      if (!optimizer.step(params, g.gradient)) {
        rec.step_rejected = true;
        result.trace.events.push_back("stage " + std::to_string(k) + " iter " +
                                      std::to_string(it) +
                                      ": non-finite gradient, step rejected");
      } else {
        model.set_parameters(params);
      }
      rec.param_norm = l2_norm(params);
      if (config.record_wallclock) rec.wallclock_ms = elapsed_ms(start);
      result.trace.records.push_back(rec);
      if (it == 0) first_energy = rec.energy;
      last_energy = rec.energy;
    }
    if (config.iterations_per_stage > 1 && last_energy >= first_energy) {
      result.trace.events.push_back("stage " + std::to_string(k) +
                                    ": energy did not decrease over the stage budget");
    }
  }

  {
    LogPsiCache cache(model);
    SamplerConfig sampler = config.sampler;
    sampler.seed = derive_seed(config.seed, {0xf17a1ULL});
    sampler.n_samples = std::max(sampler.n_samples, config.final_samples);
    const SampleBatch batch = draw_samples(cache, sampler);
    const GradientEstimate g = estimate_gradient(cache, h, batch);
    result.trace.final_energy = g.energy.mean;
    result.trace.final_energy_error = g.energy.std_error;
  }
  if (reference) {
    result.trace.final_infidelity = infidelity(*reference, model_state(model, h.layout()));
  } else if (config.final_infidelity && h.layout().dimension() <= config.dense_cap) {
    const GroundState gs = ground_state(h, config.dense_cap);
    result.trace.final_infidelity = infidelity(gs.state, model_state(model, h.layout()));
  }
  result.trace.wallclock_ms = elapsed_ms(start);
  return result;
}

// ---------------------------------------------------------------------------

InfidelityGradient infidelity_gradient(const Model& model, const StateVector& target) {
  if (model.n_spins() != target.layout.size()) {
    throw std::invalid_argument("model size does not match target state");
  }
  const StateVector psi = model_state(model, target.layout, false);
  const Eigen::VectorXcd& a = psi.amplitudes;
  const Eigen::VectorXcd& phi = target.amplitudes;
  const double n_phi = phi.squaredNorm();
  if (n_phi == 0.0) throw std::domain_error("zero target state");
  const Complex overlap = phi.dot(a);  // sum conj(phi) a
  const double n_psi = a.squaredNorm();
  const double fidelity = std::norm(overlap) / (n_psi * n_phi);

  const std::size_t np = model.n_params();
  std::vector<Complex> d_overlap(np, Complex(0.0, 0.0));
  std::vector<double> d_norm(np, 0.0);
  std::vector<Complex> o(np);
  std::vector<Spin> spins(model.n_spins());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) == Complex(0.0, 0.0)) continue;
    index_to_spins(static_cast<BasisIndex>(i), spins);
    model.log_derivatives(spins, o);
    const Complex w_overlap = std::conj(phi(i)) * a(i);
    const double w_norm = std::norm(a(i));
    for (std::size_t k = 0; k < np; ++k) {
      d_overlap[k] += w_overlap * o[k];
      d_norm[k] += w_norm * o[k].real();
    }
  }
  InfidelityGradient out;
  out.infidelity = std::clamp(1.0 - fidelity, 0.0, 1.0);
  out.gradient.resize(np);
  for (std::size_t k = 0; k < np; ++k) {
    // dF = 2 Re(conj(A) dA) / (N |phi|^2) - F dN / N,   dN = 2 Re sum |a|^2 O
    const double d_fid = 2.0 * (std::conj(overlap) * d_overlap[k]).real() / (n_psi * n_phi) -
                         fidelity * 2.0 * d_norm[k] / n_psi;
    out.gradient[k] = -d_fid;
  }
  return out;
}

namespace {

void infidelity_stage(Model& model, std::vector<double>& params, AdamW& optimizer,
                      const StateVector& target, int stage, int iterations,
                      bool record_wallclock, Clock::time_point start,
                      TrainingTrace& trace) {
  for (int it = 0; it < iterations; ++it) {
    const InfidelityGradient g = infidelity_gradient(model, target);
    TraceRecord rec;
    rec.stage = stage;
    rec.iteration = it;
    rec.energy = std::numeric_limits<double>::quiet_NaN();
    rec.std_error = 0.0;
    rec.infidelity = g.infidelity;
    rec.grad_norm = l2_norm(g.gradient);
    if (!optimizer.step(params, g.gradient)) {
      rec.step_rejected = true;
      trace.events.push_back("stage " + std::to_string(stage) + " iter " +
                             std::to_string(it) + ": non-finite gradient, step rejected");
    } else {
      model.set_parameters(params);
    }
    rec.param_norm = l2_norm(params);
    if (record_wallclock) rec.wallclock_ms = elapsed_ms(start);
    trace.records.push_back(rec);
  }
}

}  // namespace

TrainResult train_infidelity(const Model& initial, const StateVector& target,
                             const InfidelityConfig& config) {
  const auto start = Clock::now();
  TrainResult result{initial.clone(), {}};
  std::vector<double> params = result.model->parameters();
  AdamW optimizer(params.size(), config.adamw());
  infidelity_stage(*result.model, params, optimizer, target, 1,
                   config.iterations_per_stage, config.record_wallclock, start,
                   result.trace);
  result.trace.final_infidelity =
      infidelity(target, model_state(*result.model, target.layout));
  result.trace.wallclock_ms = elapsed_ms(start);
  return result;
}

TrainResult train_infidelity_adiabatic(const Model& initial, const ClockHamiltonian& h,
                                       const InfidelityConfig& config) {
  if (config.schedule_stages < 1) throw std::invalid_argument("schedule_stages must be >= 1");
  const auto start = Clock::now();
  TrainResult result{initial.clone(), {}};
  std::vector<double> params = result.model->parameters();
  AdamW optimizer(params.size(), config.adamw());
  StateVector target;
  for (int k = 1; k <= config.schedule_stages; ++k) {
    const ClockHamiltonian stage_h =
        h.with_total_time(h.total_time() * k / config.schedule_stages);
    target = ground_state(stage_h).state;
    infidelity_stage(*result.model, params, optimizer, target, k,
                     config.iterations_per_stage, config.record_wallclock, start,
                     result.trace);
  }
  result.trace.final_infidelity =
      infidelity(target, model_state(*result.model, target.layout));
  result.trace.final_energy = exact_variational_energy(*result.model, h);
  result.trace.final_energy_error = 0.0;
  result.trace.wallclock_ms = elapsed_ms(start);
  return result;
}

// ---------------------------------------------------------------------------

ObservableEstimate estimate_observable(LogPsiCache& cache, const ClockHamiltonian& h,
                                       const PhysicalOperator& op, std::uint64_t t,
                                       const SampleBatch& batch) {
  if (t > h.n_steps()) throw std::invalid_argument("time index beyond the last step");
  if (batch.size() == 0) throw std::invalid_argument("empty sample batch");
  const SpinLayout& layout = h.layout();
  const BasisIndex word = h.clock_word(t);
  const double scale = static_cast<double>(h.n_steps() + 1);
  std::map<BasisIndex, double> local;
  std::vector<double> values;
  std::vector<int> chains;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const BasisIndex index = batch.indices[i];
    const Complex log_here = cache(index);
    if (vanishing(log_here)) continue;
    double value = 0.0;
    if (clock_part(index, layout) == word) {
      auto it = local.find(index);
      if (it == local.end()) {
        Complex acc(0.0, 0.0);
        for (const auto& [q, v] : op.row(phys_part(index, layout))) {
          const Complex log_there = cache(join_index(q, word, layout));
          if (!vanishing(log_there)) acc += v * std::exp(log_there - log_here);
        }
        it = local.emplace(index, scale * acc.real()).first;
      }
      value = it->second;
    }
    values.push_back(value);
    chains.push_back(batch.chain_id.empty() ? -1 : batch.chain_id[i]);
  }
  if (values.empty()) throw NumericError("every sample has zero amplitude");
  ObservableEstimate est;
  est.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  est.std_error = std_error_of_mean(values, chains);
  return est;
}

ObservableEstimate estimate_observable(const Model& model, const ClockHamiltonian& h,
                                       const PhysicalOperator& op, std::uint64_t t,
                                       const SampleBatch& batch) {
  LogPsiCache cache(model);
  return estimate_observable(cache, h, op, t, batch);
}

}  // namespace clockvmc
