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

#include <doctest.h>

#include <cmath>
#include <random>

#include "clockvmc/vmc.hpp"

using namespace clockvmc;

namespace {

std::unique_ptr<Model> scrambled(const ModelSpec& spec, std::uint64_t seed, double scale) {
  auto model = make_model(spec);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, scale);
  auto p = model->parameters();
  for (double& v : p) v = n(rng);
  model->set_parameters(p);
  return model;
}

// Wraps a fixed state vector as a parameter-free model.
class TabulatedModel final : public Model {
 public:
  explicit TabulatedModel(const StateVector& s)
      : Model(ModelSpec{AnsatzKind::rbm, s.layout.size(), 1}), amplitudes_(s.amplitudes) {}
  std::size_t n_params() const override { return 0; }
  Complex log_psi(std::span<const Spin> spins) const override {
    const Complex a = amplitudes_(static_cast<Eigen::Index>(spins_to_index(spins)));
    if (a == Complex(0.0, 0.0)) return {-INFINITY, 0.0};
    return std::log(a);
  }
  void log_derivatives(std::span<const Spin>, std::span<Complex>) const override {}
  std::vector<double> parameters() const override { return {}; }
  void set_parameters(std::span<const double>) override {}
  std::unique_ptr<Model> clone() const override { return std::make_unique<TabulatedModel>(*this); }

 private:
  Eigen::VectorXcd amplitudes_;
};

}  // namespace

TEST_CASE("exact energy: Rayleigh quotient equals the probability-weighted local energy") {
  const auto h = ClockHamiltonian::with_clock_spins(TfimParams{3, 0.25, 1.0}, 2, 3.0);
  for (auto kind : {AnsatzKind::rbm, AnsatzKind::mp_rbm, AnsatzKind::ar, AnsatzKind::ar_split}) {
    const auto m = scrambled({kind, 5, 1, 2, 3}, 3, 0.5);
    const double rq = exact_variational_energy(*m, h);
    const GradientEstimate g = exact_energy_gradient(*m, h);
    CAPTURE(to_string(kind));
    CHECK(std::abs(g.energy.mean - rq) < 1e-10);
    CHECK(std::abs(g.energy.imag_mean) < 1e-10);
  }
}

TEST_CASE("local energy vanishes on the exact ground state") {
  const auto h = ClockHamiltonian::with_clock_spins(TfimParams{4, 0.25, 1.0}, 3, 3.0);
  const GroundState gs = ground_state(h);
  const TabulatedModel m(gs.state);
  LogPsiCache cache(m);
  double worst = 0.0;
  for (BasisIndex i = 0; i < h.layout().dimension(); ++i) {
    const Complex e = local_energy(cache, h, i);
    if (std::isnan(e.real())) continue;
    if (std::abs(gs.state.amplitudes(static_cast<Eigen::Index>(i))) < 1e-8) continue;
    worst = std::max(worst, std::abs(e));
  }
  CHECK(worst < 1e-6);
  SamplerConfig c;
  c.n_samples = 2000;
  c.seed = 4;
  const EnergyEstimate est = estimate_energy(m, h, metropolis_sample(m, c));
  CHECK(std::abs(est.mean) < 1e-6);
  CHECK(est.std_error < 1e-6);
}

TEST_CASE("eigenstate with nonzero energy has zero-variance local energy") {
  // history state of an excited physical start is not an eigenstate, but the
  // uniform clock state with all-down spins and no field is: H0 = n_phys on it.
  const auto h = ClockHamiltonian::with_clock_spins(TfimParams{2, 0.25, 0.0}, 1, 1.0);
  StateVector s{h.layout(), Eigen::VectorXcd::Zero(8)};
  const Eigen::MatrixXcd dense = fk_dense(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
  s.amplitudes = es.eigenvectors().col(5);
  const TabulatedModel m(s);
  LogPsiCache cache(m);
  for (BasisIndex i = 0; i < 8; ++i) {
    if (std::abs(s.amplitudes(static_cast<Eigen::Index>(i))) < 1e-10) continue;
    CHECK(std::abs(local_energy(cache, h, i) - es.eigenvalues()(5)) < 1e-9);
  }
}

TEST_CASE("local energy against the dense matrix") {
  const auto h = ClockHamiltonian::with_clock_spins(TfimParams{3, 0.25, 1.0}, 2, 3.0);
  const Eigen::MatrixXcd dense = fk_dense(h);
  const auto m = scrambled({AnsatzKind::rbm, 5, 1}, 8, 0.9);
  const StateVector psi = model_state(*m, h.layout(), false);
  const Eigen::VectorXcd hpsi = dense * psi.amplitudes;
  for (BasisIndex i = 0; i < 32; ++i) {
    const SpinConfiguration c = index_to_config(i, h.layout());
    const Complex e = local_energy(*m, h, c);
    CHECK(std::abs(e - hpsi(static_cast<Eigen::Index>(i)) / psi.amplitudes(static_cast<Eigen::Index>(i))) < 1e-10);
  }
}

TEST_CASE("exhaustive energy gradient against finite differences") {
  const auto h = ClockHamiltonian::with_clock_spins(TfimParams{3, 0.25, 1.0}, 2, 3.0);
  for (auto kind : {AnsatzKind::rbm, AnsatzKind::mp_rbm, AnsatzKind::ar, AnsatzKind::ar_split}) {
    auto m = scrambled({kind, 5, 1, 2, 2}, 21, 0.4);
    const auto g = exact_energy_gradient(*m, h).gradient;
    const auto p0 = m->parameters();
    const double step = 1e-5;
    double worst = 0.0;
    for (std::size_t k = 0; k < p0.size(); ++k) {
      auto p = p0;
      p[k] += step;
      m->set_parameters(p);
      const double up = exact_variational_energy(*m, h);
      p[k] = p0[k] - step;
      m->set_parameters(p);
      const double down = exact_variational_energy(*m, h);
      worst = std::max(worst, std::abs((up - down) / (2 * step) - g[k]));
    }
    m->set_parameters(p0);
    CAPTURE(to_string(kind));
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("sampled estimates lie within three standard errors") {
  const auto h = ClockHamiltonian::with_clock_spins(TfimParams{3, 0.25, 1.0}, 2, 3.0);
  const auto m = scrambled({AnsatzKind::rbm, 5, 1}, 5, 0.3);
  const double exact = exact_variational_energy(*m, h);
  SamplerConfig c;
  c.n_samples = 40000;
  c.n_chains = 16;
  c.thinning_sweeps = 2;
  c.seed = 31;
  const EnergyEstimate est = estimate_energy(*m, h, metropolis_sample(*m, c));
  CAPTURE(est.mean);
  CAPTURE(exact);
  CAPTURE(est.std_error);
  CHECK(est.std_error > 0.0);
  CHECK(std::abs(est.mean - exact) < 3.0 * est.std_error);
  CHECK(std::abs(est.imag_mean) < 5.0 * est.std_error);
  CHECK(est.n_used == 40000);
  CHECK(est.n_flagged == 0);

  // the sampled gradient converges to the exhaustive one
  const auto ge = exact_energy_gradient(*m, h).gradient;
  const auto gs = estimate_gradient(*m, h, metropolis_sample(*m, c)).gradient;
  double diff = 0.0, norm = 0.0;
  for (std::size_t k = 0; k < ge.size(); ++k) {
    diff += (ge[k] - gs[k]) * (ge[k] - gs[k]);
    norm += ge[k] * ge[k];
  }
  CHECK(std::sqrt(diff / norm) < 0.1);
}

TEST_CASE("single-sample batch is flagged") {
  const auto h = ClockHamiltonian::with_clock_spins(TfimParams{2, 0.25, 1.0}, 1, 1.0);
  const auto m = make_model({AnsatzKind::rbm, 3, 1});
  SamplerConfig c;
  c.n_samples = 1;
  c.n_chains = 1;
  const EnergyEstimate est = estimate_energy(*m, h, metropolis_sample(*m, c));
  CHECK(est.single_sample);
  CHECK(est.std_error == 0.0);
  CHECK(est.n_used == 1);
}

TEST_CASE("AdamW closed forms") {
  SUBCASE("first step") {
    AdamW opt(2, AdamWConfig{0.1, 0.9, 0.999, 1e-12, 0.01});
    std::vector<double> p{1.0, -2.0};
    const std::vector<double> g{0.5, -3.0};
    REQUIRE(opt.step(p, g));
    // decay first, then a unit-magnitude Adam step
    CHECK(p[0] == doctest::Approx(1.0 * (1.0 - 0.001) - 0.1).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(-2.0 * (1.0 - 0.001) + 0.1).epsilon(1e-12));
    CHECK(opt.steps() == 1);
  }
  SUBCASE("second step") {
    const double lr = 0.05, b1 = 0.9, b2 = 0.999, eps = 1e-8, wd = 0.1;
    AdamW opt(1, AdamWConfig{lr, b1, b2, eps, wd});
    std::vector<double> p{0.3};
    opt.step(p, std::vector<double>{2.0});
    opt.step(p, std::vector<double>{-1.0});
    double ref = 0.3, m = 0.0, v = 0.0;
    for (int t = 1; t <= 2; ++t) {
      const double g = t == 1 ? 2.0 : -1.0;
      ref *= 1.0 - lr * wd;
      m = b1 * m + (1 - b1) * g;
      v = b2 * v + (1 - b2) * g * g;
      ref -= lr * (m / (1 - std::pow(b1, t))) / (std::sqrt(v / (1 - std::pow(b2, t))) + eps);
    }
    CHECK(p[0] == doctest::Approx(ref).epsilon(1e-14));
  }
  SUBCASE("zero gradient only decays") {
    AdamW opt(1, AdamWConfig{0.1, 0.9, 0.999, 1e-8, 0.5});
    std::vector<double> p{2.0};
    opt.step(p, std::vector<double>{0.0});
    CHECK(p[0] == doctest::Approx(2.0 * 0.95));
  }
  SUBCASE("non-finite gradient is rejected") {
    AdamW opt(2, AdamWConfig{});
    std::vector<double> p{1.0, 2.0};
    CHECK_FALSE(opt.step(p, std::vector<double>{NAN, 1.0}));
    CHECK_FALSE(opt.step(p, std::vector<double>{1.0, INFINITY}));
    CHECK(p == std::vector<double>{1.0, 2.0});
    CHECK(opt.steps() == 0);
  }
  CHECK_THROWS(AdamW(1, AdamWConfig{0.0}));
}

TEST_CASE("infidelity gradient against finite differences") {
  const auto h = ClockHamiltonian::with_clock_spins(TfimParams{3, 0.25, 1.0}, 2, 3.0);
  const StateVector target = ground_state(h).state;
  for (auto kind : {AnsatzKind::rbm, AnsatzKind::mp_rbm, AnsatzKind::ar, AnsatzKind::ar_split}) {
    auto m = scrambled({kind, 5, 1, 2, 2}, 41, 0.4);
    const InfidelityGradient g = infidelity_gradient(*m, target);
    CHECK(g.infidelity == doctest::Approx(infidelity(target, model_state(*m, h.layout()))).epsilon(1e-12));
    const auto p0 = m->parameters();
    double worst = 0.0;
    for (std::size_t k = 0; k < p0.size(); ++k) {
      auto p = p0;
      p[k] += 1e-6;
      m->set_parameters(p);
      const double up = infidelity(target, model_state(*m, h.layout()));
      p[k] = p0[k] - 1e-6;
      m->set_parameters(p);
      const double down = infidelity(target, model_state(*m, h.layout()));
      worst = std::max(worst, std::abs((up - down) / 2e-6 - g.gradient[k]));
    }
    m->set_parameters(p0);
    CAPTURE(to_string(kind));
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("infidelity training against its own state starts at zero") {
  const auto m = scrambled({AnsatzKind::rbm, 4, 1}, 2, 0.3);
  const StateVector self = model_state(*m, SpinLayout{2, 2});
  InfidelityConfig cfg;
  cfg.iterations_per_stage = 5;
  const TrainResult r = train_infidelity(*m, self, cfg);
  CHECK(r.trace.records.size() == 5);
  CHECK(r.trace.records.front().infidelity < 1e-12);
  CHECK(r.trace.records.front().grad_norm < 1e-10);
}

TEST_CASE("infidelity training ignores the target's phase and scale") {
  const auto h = ClockHamiltonian::with_clock_spins(TfimParams{2, 0.25, 1.0}, 2, 3.0);
  const StateVector target = ground_state(h).state;
  StateVector rotated = target;
  rotated.amplitudes *= 2.5 * std::exp(Complex(0.0, 0.9));
  const auto m = init_parameters({AnsatzKind::mp_rbm, 4, 1}, 6);
  InfidelityConfig cfg;
  cfg.iterations_per_stage = 50;
  const TrainResult a = train_infidelity(*m, target, cfg);
  const TrainResult b = train_infidelity(*m, rotated, cfg);
  CHECK(std::abs(a.trace.final_infidelity - b.trace.final_infidelity) < 1e-8);
}

TEST_CASE("infidelity training reduces the infidelity") {
  const auto h = ClockHamiltonian::with_clock_spins(TfimParams{2, 0.25, 1.0}, 2, 3.0);
  const StateVector target = ground_state(h).state;
  const auto m = init_parameters({AnsatzKind::rbm, 4, 2}, 1);
  InfidelityConfig cfg;
  cfg.iterations_per_stage = 400;
  cfg.learning_rate = 0.02;
  const TrainResult r = train_infidelity(*m, target, cfg);
  CHECK(r.trace.final_infidelity < 0.5 * r.trace.records.front().infidelity);
}

TEST_CASE("VMC training") {
  const auto h = ClockHamiltonian::with_clock_spins(TfimParams{2, 0.25, 1.0}, 1, 1.0);
  const auto m = init_parameters({AnsatzKind::rbm, 3, 1}, 3);
  VmcConfig cfg;
  cfg.iterations_per_stage = 30;
  cfg.schedule_stages = 4;
  cfg.sampler.n_samples = 256;
  cfg.seed = 5;
  const TrainResult a = train_vmc(*m, h, cfg);
  REQUIRE(a.trace.records.size() == 120);
  CHECK(a.trace.records.front().stage == 1);
  CHECK(a.trace.records.back().stage == 4);
  CHECK(a.trace.records.back().iteration == 29);
  CHECK(std::isfinite(a.trace.final_energy));
  CHECK(std::isfinite(a.trace.final_infidelity));
  for (const auto& r : a.trace.records) CHECK(r.wallclock_ms == 0.0);

  SUBCASE("deterministic for a fixed seed") {
    const TrainResult b = train_vmc(*m, h, cfg);
    CHECK(b.model->parameters() == a.model->parameters());
    CHECK(b.trace.final_energy == a.trace.final_energy);
  }
  SUBCASE("a single stage trains on the full time") {
    cfg.schedule_stages = 1;
    cfg.iterations_per_stage = 200;
    const TrainResult b = train_vmc(*m, h, cfg);
    CHECK(b.trace.records.size() == 200);
    CHECK(b.trace.final_energy < b.trace.records.front().energy);
  }
  SUBCASE("zero iterations evaluates the initial state") {
    cfg.iterations_per_stage = 0;
    const TrainResult b = train_vmc(*m, h, cfg);
    CHECK(b.trace.records.empty());
    CHECK(b.model->parameters() == m->parameters());
  }
  SUBCASE("validation") {
    cfg.schedule_stages = 0;
    CHECK_THROWS(train_vmc(*m, h, cfg));
  }
}

TEST_CASE("time-resolved observable") {
  SUBCASE("uniform model, identity operator") {
    const auto h = ClockHamiltonian::with_clock_spins(TfimParams{3, 0.25, 1.0}, 2, 3.0);
    const auto m = make_model({AnsatzKind::rbm, 5, 1});
    SamplerConfig c;
    c.n_samples = 20000;
    c.seed = 8;
    const SampleBatch b = metropolis_sample(*m, c);
    for (std::uint64_t t = 0; t <= 3; ++t) {
      const ObservableEstimate est = estimate_observable(*m, h, identity_operator(), t, b);
      CHECK(std::abs(est.mean - 1.0) < 4.0 * est.std_error);
    }
  }
  SUBCASE("ground state reproduces the exact magnetisation") {
    const auto h = ClockHamiltonian::with_clock_spins(TfimParams{3, 0.25, 1.0}, 2, 3.0);
    const GroundState gs = ground_state(h);
    const TabulatedModel m(gs.state);
    SamplerConfig c;
    c.n_samples = 100000;
    c.seed = 10;
    const SampleBatch b = metropolis_sample(m, c);
    const PhysicalOperator op = average_magnetization(3);
    for (std::uint64_t t = 0; t <= 3; ++t) {
      const ObservableEstimate est = estimate_observable(m, h, op, t, b);
      const double exact = exact_time_observable(gs.state, h, op, t);
      CHECK(std::abs(exact - exact_time_magnetization(gs.state, t)) < 1e-9);
      CHECK(std::abs(est.mean - exact) < 4.0 * est.std_error + 1e-12);
    }
  }
  CHECK_THROWS(estimate_observable(*make_model({AnsatzKind::rbm, 3, 1}),
                                   ClockHamiltonian::with_clock_spins(TfimParams{2, 0.25, 1.0}, 1, 1.0),
                                   identity_operator(), 2,
                                   SampleBatch{3, {0}, {0}, {Complex(0, 0)}, 1.0}));
}

TEST_CASE("standard error accounts for chain autocorrelation") {
  // Sparse thinning on a peaked distribution: consecutive kept samples are
  // strongly correlated, so the iid formula would understate the spread.
  const auto h = ClockHamiltonian::with_clock_spins(TfimParams{3, 0.25, 1.0}, 2, 3.0);
  const auto m = scrambled({AnsatzKind::rbm, 5, 1}, 8, 0.9);
  SamplerConfig c;
  c.n_samples = 4000;
  c.n_chains = 4;
  c.thinning_sweeps = 0;
  const int repeats = 60;
  std::vector<double> means;
  double reported = 0.0;
  for (int r = 0; r < repeats; ++r) {
    c.seed = 1000 + static_cast<std::uint64_t>(r);
    const EnergyEstimate est = estimate_energy(*m, h, metropolis_sample(*m, c));
    means.push_back(est.mean);
    reported += est.std_error / repeats;
  }
  double mu = 0.0;
  for (double v : means) mu += v / repeats;
  double spread = 0.0;
  for (double v : means) spread += (v - mu) * (v - mu) / (repeats - 1);
  spread = std::sqrt(spread);
  CAPTURE(spread);
  CAPTURE(reported);
  CHECK(reported > 0.6 * spread);
  CHECK(reported < 1.7 * spread);
}
