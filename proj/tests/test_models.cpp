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
#include <numbers>
#include <random>

#include "clockvmc/models.hpp"

using namespace clockvmc;

namespace {

constexpr AnsatzKind kAllKinds[] = {AnsatzKind::rbm, AnsatzKind::mp_rbm, AnsatzKind::ar,
                                    AnsatzKind::ar_split};

std::vector<Spin> random_spins(int n, std::mt19937_64& rng) {
  std::vector<Spin> s(static_cast<std::size_t>(n));
  for (auto& v : s) v = (rng() & 1U) ? Spin{1} : Spin{-1};
  return s;
}

std::unique_ptr<Model> scrambled(const ModelSpec& spec, std::uint64_t seed, double scale) {
  auto model = make_model(spec);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, scale);
  auto p = model->parameters();
  for (double& v : p) v = n(rng);
  model->set_parameters(p);
  return model;
}

double wrap_phase(double x) { return std::remainder(x, 2.0 * std::numbers::pi); }

std::vector<Spin> spins_of(std::uint64_t bits, int n) {
  std::vector<Spin> s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = ((bits >> (n - 1 - i)) & 1U) ? -1 : 1;
  return s;
}

}  // namespace

TEST_CASE("ansatz names") {
  for (auto k : kAllKinds) CHECK(parse_ansatz(to_string(k)) == k);
  CHECK(parse_ansatz("mp-rbm") == AnsatzKind::mp_rbm);
  CHECK(parse_ansatz("ar-split") == AnsatzKind::ar_split);
  CHECK_THROWS_AS(parse_ansatz("mps"), std::invalid_argument);
}

TEST_CASE("spec validation") {
  CHECK_THROWS(ModelSpec{AnsatzKind::rbm, 0, 1}.validate());
  CHECK_THROWS(ModelSpec{AnsatzKind::rbm, 4, 0}.validate());
  CHECK_THROWS(ModelSpec{AnsatzKind::ar, 4, 1, 0, 8}.validate());
  CHECK_THROWS(ModelSpec{AnsatzKind::ar, 4, 1, 2, 0}.validate());
  CHECK_NOTHROW(ModelSpec{AnsatzKind::ar, 4, 1, 1, 1}.validate());
}

TEST_CASE("log2cosh is stable") {
  for (double re : {-1e3, -40.0, -1.0, 0.0, 0.5, 40.0, 1e3}) {
    for (double im : {-2.0, 0.0, 0.7, 3.0}) {
      const Complex z(re, im);
      const Complex v = log2cosh(z);
      REQUIRE(std::isfinite(v.real()));
      REQUIRE(std::isfinite(v.imag()));
      if (std::abs(re) < 30.0) {
        const Complex ref = std::log(2.0 * std::cosh(z));
        CHECK(std::abs(std::exp(v - ref) - 1.0) < 1e-12);
      } else {
        // log(2cosh z) -> |Re z| + i sign(Re z) Im z
        const Complex ref(std::abs(re), re > 0 ? im : -im);
        CHECK(std::abs(std::exp(v - ref) - 1.0) < 1e-12);
      }
    }
    CHECK(log2cosh(re) == doctest::Approx(std::abs(re) + std::log1p(std::exp(-2.0 * std::abs(re)))));
  }
}

TEST_CASE("parameter counts") {
  const int n = 9;
  CHECK(make_model({AnsatzKind::rbm, n, 2})->n_params() == 2 * (n + 2 * n + 2 * n * n));
  CHECK(make_model({AnsatzKind::mp_rbm, n, 2})->n_params() == 2 * (n + 2 * n + 2 * n * n));
  // masked entries are not parameters
  for (auto k : {AnsatzKind::ar, AnsatzKind::ar_split}) {
    const auto m = make_model({k, n, 1, 2, 4});
    CHECK(m->n_params() > 0);
    CHECK(m->parameters().size() == m->n_params());
  }
}

TEST_CASE("zero-parameter RBM gives N_H ln 2") {
  for (int alpha = 1; alpha <= 3; ++alpha) {
    const auto m = make_model({AnsatzKind::rbm, 6, alpha});
    std::mt19937_64 rng(alpha);
    for (int k = 0; k < 10; ++k) {
      const Complex v = m->log_psi(random_spins(6, rng));
      CHECK(v.real() == doctest::Approx(6 * alpha * std::log(2.0)).epsilon(1e-14));
      CHECK(v.imag() == 0.0);
    }
  }
}

TEST_CASE("RBM closed form") {
  auto m = scrambled({AnsatzKind::rbm, 4, 1}, 3, 0.4);
  const auto& rbm = dynamic_cast<const RbmModel&>(*m);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    const auto s = random_spins(4, rng);
    Eigen::VectorXcd sigma(4);
    for (int i = 0; i < 4; ++i) sigma(i) = double(s[static_cast<std::size_t>(i)]);
    Complex psi = std::exp((rbm.visible_bias().transpose() * sigma)(0));
    const Eigen::VectorXcd theta = rbm.hidden_bias() + rbm.weights() * sigma;
    for (Eigen::Index j = 0; j < theta.size(); ++j) psi *= 2.0 * std::cosh(theta(j));
    const Complex lp = m->log_psi(s);
    CHECK(std::abs(std::exp(lp) - psi) < 1e-12 * std::abs(psi));
  }
}

TEST_CASE("log derivatives agree with central differences") {
  const double h = 1e-5;
  for (auto kind : kAllKinds) {
    CAPTURE(to_string(kind));
    const ModelSpec spec{kind, 5, 2, 2, 3};
    std::mt19937_64 rng(17);
    int failures = 0;
    double worst = 0.0;
    for (int c = 0; c < 50; ++c) {
      auto m = scrambled(spec, 100 + c, 0.5);
      const auto s = random_spins(spec.n_spins, rng);
      const auto analytic = m->log_derivatives(s);
      const auto p0 = m->parameters();
      for (std::size_t k = 0; k < p0.size(); ++k) {
        auto p = p0;
        p[k] = p0[k] + h;
        m->set_parameters(p);
        const Complex up = m->log_psi(s);
        p[k] = p0[k] - h;
        m->set_parameters(p);
        const Complex down = m->log_psi(s);
        const Complex fd((up.real() - down.real()) / (2 * h), wrap_phase(up.imag() - down.imag()) / (2 * h));
        const double err = std::abs(fd - analytic[k]) / std::max(1.0, std::abs(analytic[k]));
        worst = std::max(worst, err);
        if (err > 1e-6) ++failures;
      }
      m->set_parameters(p0);
    }
    CAPTURE(worst);
    CHECK(failures == 0);
  }
}

TEST_CASE("holomorphic slots") {
  auto m = scrambled({AnsatzKind::rbm, 4, 1}, 8, 0.3);
  std::mt19937_64 rng(2);
  const auto d = m->log_derivatives(random_spins(4, rng));
  for (std::size_t k = 0; k < d.size(); k += 2) CHECK(std::abs(d[k + 1] - Complex(0, 1) * d[k]) < 1e-14);
}

TEST_CASE("autoregressive normalisation") {
  for (auto kind : {AnsatzKind::ar, AnsatzKind::ar_split}) {
    for (int layers = 1; layers <= 3; ++layers) {
      const int n = 7;
      auto m = scrambled({kind, n, 1, layers, 4}, 31 + layers, 1.0);
      double total = 0.0;
      for (std::uint64_t b = 0; b < (1U << n); ++b) total += std::exp(2.0 * m->log_psi(spins_of(b, n)).real());
      CAPTURE(to_string(kind));
      CAPTURE(layers);
      CHECK(std::abs(total - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("conditionals are normalised and causal") {
  for (auto kind : {AnsatzKind::ar, AnsatzKind::ar_split}) {
    auto m = scrambled({kind, 6, 1, 3, 4}, 77, 1.0);
    const auto& ar = dynamic_cast<const ArModel&>(*m);
    std::mt19937_64 rng(4);
    for (int c = 0; c < 20; ++c) {
      const auto s = random_spins(6, rng);
      const auto lc = ar.log_conditionals(s);
      for (int i = 0; i < 6; ++i) {
        const double norm = std::exp(2.0 * lc(i, 0).real()) + std::exp(2.0 * lc(i, 1).real());
        CHECK(std::abs(norm - 1.0) < 1e-12);
        const auto eta = ar.conditional(std::span<const Spin>(s).first(static_cast<std::size_t>(i)));
        CHECK(std::abs(eta[0] - std::exp(lc(i, 0))) < 1e-12);
        CHECK(std::abs(eta[1] - std::exp(lc(i, 1))) < 1e-12);
        // changing spins at or after site i does not move row i
        auto t = s;
        for (int j = i; j < 6; ++j) t[static_cast<std::size_t>(j)] = static_cast<Spin>(-t[static_cast<std::size_t>(j)]);
        const auto lt = ar.log_conditionals(t);
        CHECK(std::abs(lt(i, 0) - lc(i, 0)) < 1e-14);
        CHECK(std::abs(lt(i, 1) - lc(i, 1)) < 1e-14);
      }
    }
  }
}

TEST_CASE("mask connectivity") {
  MaskedNetwork<double> net(4, 3, 2, 2);
  // first layer: strictly earlier sites
  for (Eigen::Index out = 0; out < 8; ++out) {
    for (Eigen::Index in = 0; in < 4; ++in) CHECK(net.connected(0, out, in) == (in < out / 2));
  }
  // later layers: same or earlier site
  for (Eigen::Index out = 0; out < 8; ++out) {
    for (Eigen::Index in = 0; in < 8; ++in) CHECK(net.connected(1, out, in) == (in / 2 <= out / 2));
  }
}

TEST_CASE("initialisation") {
  for (auto kind : kAllKinds) {
    const ModelSpec spec{kind, 9, 1, 2, 8};
    const auto a = init_parameters(spec, 42);
    const auto b = init_parameters(spec, 42);
    const auto c = init_parameters(spec, 43);
    CHECK(a->parameters() == b->parameters());
    CHECK(a->parameters() != c->parameters());
    double sq = 0.0;
    for (double v : a->parameters()) sq += v * v;
    CHECK(std::sqrt(sq / double(a->n_params())) == doctest::Approx(0.01).epsilon(0.2));
    // near-uniform |Psi|^2
    double lo = INFINITY, hi = -INFINITY;
    for (std::uint64_t bits = 0; bits < 512; ++bits) {
      const double lp = 2.0 * a->log_psi(spins_of(bits, 9)).real();
      lo = std::min(lo, lp);
      hi = std::max(hi, lp);
    }
    CAPTURE(to_string(kind));
    CHECK(std::exp(hi - lo) < 10.0);
  }
}

TEST_CASE("checkpoint round trip") {
  for (auto kind : kAllKinds) {
    const ModelSpec spec{kind, 5, 2, 2, 3};
    const auto m = init_parameters(spec, 7);
    const auto j = model_checkpoint(*m, 7);
    const auto r = model_from_checkpoint(nlohmann::json::parse(j.dump()));
    CHECK(r->kind() == kind);
    CHECK(r->parameters() == m->parameters());
    CHECK(j.at("seed").get<std::uint64_t>() == 7);
  }
  auto bad = model_checkpoint(*init_parameters({AnsatzKind::rbm, 3, 1}, 1), 1);
  bad["parameters"].erase(0);
  CHECK_THROWS(model_from_checkpoint(bad));
}

TEST_CASE("input validation") {
  const auto m = make_model({AnsatzKind::rbm, 3, 1});
  const std::vector<Spin> wrong_size{1, 1};
  const std::vector<Spin> wrong_value{1, 0, 1};
  CHECK_THROWS(m->log_psi(wrong_size));
  CHECK_THROWS(m->log_psi(wrong_value));
  std::vector<double> p(m->n_params() + 1);
  CHECK_THROWS(make_model({AnsatzKind::rbm, 3, 1})->set_parameters(p));
}

TEST_CASE("zero-parameter autoregressive models are uniform") {
  for (auto kind : {AnsatzKind::ar, AnsatzKind::ar_split}) {
    const auto m = make_model({kind, 5, 1, 2, 4});
    for (std::uint64_t b = 0; b < 32; ++b) {
      CHECK(std::abs(m->log_psi(spins_of(b, 5)) - Complex(-2.5 * std::log(2.0), 0.0)) < 1e-12);
    }
  }
}
