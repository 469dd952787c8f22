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
#include <filesystem>

#include "clockvmc/errors.hpp"
#include "clockvmc/random.hpp"
#include "clockvmc/tuner.hpp"

using namespace clockvmc;

namespace {

SearchSpace lr_only() {
  SearchSpace s;
  s.dims.push_back({"learning_rate", Dimension::Kind::log_uniform, 1e-4, 1.0, {}});
  return s;
}

TrialOutcome synthetic(const HyperParams& p, std::uint64_t) {
  const double x = std::log10(p.at("learning_rate")) + 2.0;
  return {x * x, std::numeric_limits<double>::quiet_NaN()};
}

StudyRecord fake_history(const SearchSpace& space, int n, std::uint64_t seed) {
  StudyRecord study;
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < n; ++i) {
    Trial t;
    t.id = i;
    t.params = space.sample_prior(rng);
    t.objective = u(rng);
    t.status = TrialStatus::complete;
    study.trials.push_back(t);
  }
  return study;
}

}  // namespace

TEST_CASE("search space supports") {
  const SearchSpace rbm = SearchSpace::for_ansatz(AnsatzKind::rbm);
  CHECK(rbm.dims.size() == 4);
  CHECK(rbm.dim("n_samples").low == 256);
  CHECK(rbm.dim("n_samples").high == 2048);
  CHECK(rbm.dim("learning_rate").low == 1e-4);
  CHECK(rbm.dim("learning_rate").high == 1.0);
  CHECK(rbm.dim("n_chains").choices == std::vector<double>{4, 8, 16});
  CHECK(rbm.dim("alpha").choices == std::vector<double>{1, 2, 3, 4, 5});
  const SearchSpace ar = SearchSpace::for_ansatz(AnsatzKind::ar_split);
  CHECK(ar.dim("n_layers").choices == std::vector<double>{1, 2, 3});
  CHECK(ar.dim("n_hidden").choices == std::vector<double>{2, 4, 8, 16, 32});
  CHECK_THROWS(ar.dim("alpha"));

  auto rng = make_rng(1);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const HyperParams p = rbm.sample_prior(rng);
    REQUIRE(rbm.contains(p));
    lo = std::min(lo, p.at("learning_rate"));
    hi = std::max(hi, p.at("learning_rate"));
  }
  // log-uniform: a quarter of the mass per decade
  CHECK(lo < 2e-4);
  CHECK(hi > 0.5);
  HyperParams bad = rbm.sample_prior(rng);
  bad["alpha"] = 6;
  CHECK_FALSE(rbm.contains(bad));
  bad = rbm.sample_prior(rng);
  bad["n_samples"] = 256.5;
  CHECK_FALSE(rbm.contains(bad));
}

TEST_CASE("TPE suggestions stay inside the supports") {
  for (auto kind : {AnsatzKind::rbm, AnsatzKind::ar}) {
    const SearchSpace space = SearchSpace::for_ansatz(kind);
    const StudyRecord history = fake_history(space, 40, 7);
    for (std::uint64_t s = 0; s < 300; ++s) REQUIRE(space.contains(suggest(history, space, TpeConfig{}, s)));
  }
}

TEST_CASE("cold start and disabled Parzen stage sample the prior") {
  const SearchSpace space = SearchSpace::for_ansatz(AnsatzKind::rbm);
  const StudyRecord history = fake_history(space, 30, 3);
  TpeConfig random;
  random.random_search = true;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const HyperParams cold = suggest(StudyRecord{}, space, TpeConfig{}, s);
    CHECK(space.contains(cold));
    CHECK(suggest(history, space, random, s) == cold);
    // fewer completed trials than n_startup
    CHECK(suggest(fake_history(space, 9, 3), space, TpeConfig{}, s) == cold);
  }
  // TPE proper does not reproduce the prior draw
  int same = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    same += suggest(history, space, TpeConfig{}, s) == suggest(StudyRecord{}, space, TpeConfig{}, s);
  }
  CHECK(same < 20);
}

TEST_CASE("all-equal objectives fall back to the prior") {
  const SearchSpace space = SearchSpace::for_ansatz(AnsatzKind::rbm);
  StudyRecord history = fake_history(space, 25, 4);
  for (auto& t : history.trials) t.objective = 0.5;
  for (std::uint64_t s = 0; s < 20; ++s) {
    CHECK(suggest(history, space, TpeConfig{}, s) == suggest(StudyRecord{}, space, TpeConfig{}, s));
  }
}

TEST_CASE("tpe config validation") {
  TpeConfig c;
  c.gamma = 1.0;
  CHECK_THROWS(c.validate());
  c = TpeConfig{};
  c.n_candidates = 0;
  CHECK_THROWS(c.validate());
}

TEST_CASE("synthetic objective: TPE finds the optimum and beats random search") {
  const SearchSpace space = lr_only();
  int hits = 0;
  double tpe_total = 0.0, random_total = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    StudyConfig cfg;
    cfg.n_trials = 60;
    cfg.seed = 1000 + s;
    const StudyRecord study = run_study(space, synthetic, cfg);
    const double lr = study.best_k(1).front().params.at("learning_rate");
    if (lr >= std::pow(10.0, -2.5) && lr <= std::pow(10.0, -1.5)) ++hits;
    tpe_total += study.best_k(1).front().objective;
    cfg.tpe.random_search = true;
    random_total += run_study(space, synthetic, cfg).best_k(1).front().objective;
  }
  CAPTURE(tpe_total);
  CAPTURE(random_total);
  CHECK(hits >= 95);
  CHECK(tpe_total < random_total);
}

TEST_CASE("study bookkeeping") {
  const SearchSpace space = lr_only();
  StudyConfig cfg;
  cfg.n_trials = 25;
  cfg.seed = 9;
  const StudyRecord a = run_study(space, synthetic, cfg);
  REQUIRE(a.trials.size() == 25);
  for (int i = 0; i < 25; ++i) CHECK(a.trials[static_cast<std::size_t>(i)].id == i);

  SUBCASE("deterministic") {
    const StudyRecord b = run_study(space, synthetic, cfg);
    for (std::size_t i = 0; i < 25; ++i) {
      CHECK(a.trials[i].params == b.trials[i].params);
      CHECK(a.trials[i].seed == b.trials[i].seed);
    }
  }
  SUBCASE("best_k") {
    const auto best = a.best_k(10);
    REQUIRE(best.size() == 10);
    for (std::size_t i = 1; i < best.size(); ++i) CHECK(best[i - 1].objective <= best[i].objective);
    CHECK(a.best_k(1).front().objective == best.front().objective);
    std::string warning;
    CHECK(a.best_k(40, &warning).size() == 25);
    CHECK_FALSE(warning.empty());
  }
  SUBCASE("single trial is a prior draw") {
    cfg.n_trials = 1;
    const StudyRecord one = run_study(space, synthetic, cfg);
    REQUIRE(one.trials.size() == 1);
    CHECK(one.trials[0].params == a.trials[0].params);
  }
}

TEST_CASE("failed trials are recorded and left out of the fit") {
  const SearchSpace space = lr_only();
  int calls = 0;
  const Objective flaky = [&](const HyperParams& p, std::uint64_t s) {
    ++calls;
    if (calls % 3 == 0) throw NumericError("diverged");
    if (calls % 5 == 0) return TrialOutcome{std::numeric_limits<double>::infinity(), 0.0};
    return synthetic(p, s);
  };
  StudyConfig cfg;
  cfg.n_trials = 30;
  const StudyRecord study = run_study(space, flaky, cfg);
  int failed = 0;
  for (const auto& t : study.trials) {
    if (t.status == TrialStatus::failed) {
      ++failed;
      CHECK_FALSE(t.message.empty());
    } else {
      CHECK(std::isfinite(t.objective));
    }
  }
  CHECK(failed == 14);
  CHECK(study.n_completed() == 16);
  for (const auto& t : study.best_k(10)) CHECK(t.status == TrialStatus::complete);
}

TEST_CASE("pending trials are imputed, not ignored") {
  const SearchSpace space = SearchSpace::for_ansatz(AnsatzKind::rbm);
  StudyRecord history = fake_history(space, 20, 5);
  Trial pending;
  pending.id = 20;
  pending.params = history.trials[0].params;
  pending.status = TrialStatus::pending;
  history.trials.push_back(pending);
  for (std::uint64_t s = 0; s < 50; ++s) CHECK(space.contains(suggest(history, space, TpeConfig{}, s)));
}

TEST_CASE("ledger persistence and resume") {
  const SearchSpace space = lr_only();
  const auto dir = std::filesystem::temp_directory_path() / "clockvmc_ledger_test";
  std::filesystem::remove_all(dir);
  const auto path = dir / "study.ndjson";

  StudyConfig cfg;
  cfg.seed = 12;
  cfg.n_trials = 14;
  const StudyRecord uninterrupted = run_study(space, synthetic, cfg);

  cfg.ledger = path;
  cfg.n_trials = 6;
  run_study(space, synthetic, cfg);
  CHECK(load_ledger(path).trials.size() == 6);

  int calls = 0;
  const Objective counted = [&](const HyperParams& p, std::uint64_t s) {
    ++calls;
    return synthetic(p, s);
  };
  cfg.n_trials = 14;
  const StudyRecord resumed = run_study(space, counted, cfg);
  CHECK(calls == 8);
  REQUIRE(resumed.trials.size() == 14);
  for (std::size_t i = 0; i < 14; ++i) {
    CHECK(resumed.trials[i].params == uninterrupted.trials[i].params);
    CHECK(resumed.trials[i].objective == uninterrupted.trials[i].objective);
  }
  const StudyRecord reloaded = load_ledger(path);
  REQUIRE(reloaded.trials.size() == 14);
  CHECK(reloaded.trials[3].params == resumed.trials[3].params);
  CHECK(std::isnan(reloaded.trials[3].infidelity));
  std::filesystem::remove_all(dir);
}

TEST_CASE("trial JSON round trip") {
  Trial t;
  t.id = 4;
  t.params = {{"alpha", 2}, {"learning_rate", 0.0123}};
  t.objective = 0.25;
  t.infidelity = 0.1;
  t.seed = 99;
  t.status = TrialStatus::failed;
  t.message = "x";
  const Trial r = Trial::from_json(nlohmann::json::parse(t.to_json().dump()));
  CHECK(r.id == 4);
  CHECK(r.params == t.params);
  CHECK(r.objective == 0.25);
  CHECK(r.seed == 99);
  CHECK(r.status == TrialStatus::failed);
  CHECK(r.message == "x");
  CHECK_THROWS(parse_trial_status("done"));
}

TEST_CASE("VMC objective") {
  const auto h = ClockHamiltonian::with_clock_spins(TfimParams{2, 0.25, 1.0}, 1, 1.0);
  auto reference = std::make_shared<StateVector>(ground_state(h).state);
  VmcConfig base;
  base.iterations_per_stage = 3;
  base.schedule_stages = 2;
  const Objective f = vmc_objective(AnsatzKind::rbm, h, base, reference);
  const HyperParams p{{"n_samples", 300}, {"learning_rate", 0.01}, {"n_chains", 4}, {"alpha", 2}};
  const TrialOutcome a = f(p, 5);
  const TrialOutcome b = f(p, 5);
  CHECK(std::isfinite(a.objective));
  CHECK(a.infidelity >= 0.0);
  CHECK(a.infidelity <= 1.0);
  CHECK(a.objective == b.objective);
  CHECK(spec_for(AnsatzKind::rbm, 3, p).alpha == 2);
  CHECK(config_for(base, p).sampler.n_chains == 4);
  CHECK(config_for(base, p).sampler.n_samples == 300);
  const Objective g = vmc_objective(AnsatzKind::ar, h, base, reference);
  CHECK(std::isfinite(g({{"n_samples", 300}, {"learning_rate", 0.01}, {"n_layers", 2}, {"n_hidden", 4}}, 1).objective));
}
