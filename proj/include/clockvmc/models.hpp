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

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "clockvmc/spin_basis.hpp"

namespace clockvmc {

using Complex = std::complex<double>;

enum class AnsatzKind {
  rbm,       // complex RBM
  mp_rbm,    // real modulus RBM + real phase RBM
  ar,        // masked autoregressive net, complex parameters, joint complex outputs
  ar_split,  // masked autoregressive nets for modulus and phase, real parameters
};

std::string_view to_string(AnsatzKind kind);
AnsatzKind parse_ansatz(std::string_view name);  // throws std::invalid_argument
inline bool is_autoregressive(AnsatzKind kind) {
  return kind == AnsatzKind::ar || kind == AnsatzKind::ar_split;
}

struct ModelSpec {
  AnsatzKind kind = AnsatzKind::rbm;
  int n_spins = 1;
  int alpha = 1;     // RBM family: hidden units = alpha * n_spins
  int n_layers = 2;  // AR family: masked layers, the last one is the output layer
  int n_hidden = 8;  // AR family: hidden features per site

  void validate() const;
};

/// Variational wave function over +-1 spin configurations.
///
/// Parameters are exposed as a flat real vector (complex parameters occupy a
/// (re, im) pair of slots). log_derivatives returns, for each real slot p_k,
/// the complex derivative d log Psi / d p_k; for a holomorphic ansatz the
/// imaginary slot is i times the real-slot derivative.
class Model {
 public:
  explicit Model(ModelSpec spec) : spec_(spec) {}
  virtual ~Model() = default;

  const ModelSpec& spec() const { return spec_; }
  AnsatzKind kind() const { return spec_.kind; }
  int n_spins() const { return spec_.n_spins; }

  virtual std::size_t n_params() const = 0;

  // Returns real part -infinity for an exact zero amplitude.
  virtual Complex log_psi(std::span<const Spin> spins) const = 0;
  virtual void log_derivatives(std::span<const Spin> spins,
                               std::span<Complex> out) const = 0;

  virtual std::vector<double> parameters() const = 0;
  virtual void set_parameters(std::span<const double> params) = 0;

  virtual std::unique_ptr<Model> clone() const = 0;

  std::vector<Complex> log_derivatives(std::span<const Spin> spins) const {
    std::vector<Complex> out(n_params());
    log_derivatives(spins, out);
    return out;
  }

 protected:
  void check_spins(std::span<const Spin> spins) const;

 private:
  ModelSpec spec_;
};

// log(2 cosh z), evaluated in the |Re z|-shifted form so large |Re z| cannot overflow.
Complex log2cosh(Complex z);
double log2cosh(double x);

class RbmModel final : public Model {
 public:
  explicit RbmModel(const ModelSpec& spec);

  int n_hidden() const { return static_cast<int>(b_.size()); }
  std::size_t n_params() const override;
  Complex log_psi(std::span<const Spin> spins) const override;
  using Model::log_derivatives;
  void log_derivatives(std::span<const Spin> spins,
                       std::span<Complex> out) const override;
  std::vector<double> parameters() const override;
  void set_parameters(std::span<const double> params) override;
  std::unique_ptr<Model> clone() const override {
    return std::make_unique<RbmModel>(*this);
  }

  const Eigen::VectorXcd& visible_bias() const { return a_; }
  const Eigen::VectorXcd& hidden_bias() const { return b_; }
  const Eigen::MatrixXcd& weights() const { return w_; }

 private:
  Eigen::VectorXcd a_;
  Eigen::VectorXcd b_;
  Eigen::MatrixXcd w_;  // n_hidden x n_spins
};

// Real-parameter RBM; log of its (positive) amplitude.
struct RealRbm {
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  Eigen::MatrixXd w;

  RealRbm(int n_visible, int n_hidden);
  std::size_t n_params() const { return a.size() + b.size() + w.size(); }
  double log_value(const Eigen::VectorXd& sigma) const;
  // d log_value / d p, in flattening order a, b, w (row-major).
  void gradient(const Eigen::VectorXd& sigma, std::span<double> out) const;
  void read(std::span<const double> params);
  void write(std::span<double> params) const;
};

/// log Psi = log RBM_mod(sigma) + i log RBM_phase(sigma), both RBMs real.
class MpRbmModel final : public Model {
 public:
  explicit MpRbmModel(const ModelSpec& spec);

  std::size_t n_params() const override;
  Complex log_psi(std::span<const Spin> spins) const override;
  using Model::log_derivatives;
  void log_derivatives(std::span<const Spin> spins,
                       std::span<Complex> out) const override;
  std::vector<double> parameters() const override;
  void set_parameters(std::span<const double> params) override;
  std::unique_ptr<Model> clone() const override {
    return std::make_unique<MpRbmModel>(*this);
  }

 private:
  RealRbm modulus_;
  RealRbm phase_;
};

/// Stack of masked dense layers (MADE style). Site i of every layer only sees
/// sites j < i of the input; hidden layers use tanh. Units are site-major:
/// unit (site, feature) lives at site * features + feature.
template <class T>
class MaskedNetwork {
 public:
  using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

  struct Workspace {
    std::vector<Vec> inputs;  // input to each layer
    std::vector<Vec> outputs;  // post-activation output of each layer
  };

  MaskedNetwork(int n_sites, int n_layers, int features, int out_features);

  int n_sites() const { return n_sites_; }
  int out_features() const { return out_features_; }
  std::size_t n_entries() const;

  const Vec& forward(const Eigen::VectorXd& x, Workspace& ws) const;
  // Holomorphic backprop: d(sum_k seed_k out_k)/d(param) for every entry.
  void backward(const Workspace& ws, const Vec& seed, std::span<T> grad) const;

  void read(std::span<const T> params);
  void write(std::span<T> params) const;

  // Whether output unit `out` of layer `layer` reads input unit `in`.
  bool connected(int layer, Eigen::Index out, Eigen::Index in) const;

 private:
  struct Layer {
    Mat w;
    Vec b;
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask;
    bool activation;
  };

  int n_sites_;
  int out_features_;
  std::vector<Layer> layers_;
};

/// Autoregressive ansatz. Per site i the network emits two numbers that are
/// normalised into a conditional amplitude vector eta^i with
/// |eta_1|^2 + |eta_2|^2 = 1; Psi(sigma) = prod_i eta^i_{sigma_i}.
class ArModel final : public Model {
 public:
  explicit ArModel(const ModelSpec& spec);

  bool split() const { return kind() == AnsatzKind::ar_split; }

  std::size_t n_params() const override;
  Complex log_psi(std::span<const Spin> spins) const override;
  using Model::log_derivatives;
  void log_derivatives(std::span<const Spin> spins,
                       std::span<Complex> out) const override;
  std::vector<double> parameters() const override;
  void set_parameters(std::span<const double> params) override;
  std::unique_ptr<Model> clone() const override {
    return std::make_unique<ArModel>(*this);
  }

  // eta for site prefix.size() given the spins before it.
  std::array<Complex, 2> conditional(std::span<const Spin> prefix) const;
  // log eta^i_s for every site i and both values s (index 0 <-> +1), given a
  // full configuration; row i only depends on spins before i.
  Eigen::MatrixX2cd log_conditionals(std::span<const Spin> spins) const;

 private:
  Eigen::VectorXcd joint_raw_output(const Eigen::VectorXd& x,
                                    MaskedNetwork<Complex>::Workspace& ws) const;

  MaskedNetwork<Complex> joint_;
  MaskedNetwork<double> modulus_;
  MaskedNetwork<double> phase_;
};

std::unique_ptr<Model> make_model(const ModelSpec& spec);

/// Fresh model with every real parameter slot drawn from N(0, 0.01^2).
std::unique_ptr<Model> init_parameters(const ModelSpec& spec, std::uint64_t seed);

nlohmann::json model_checkpoint(const Model& model, std::uint64_t seed);
std::unique_ptr<Model> model_from_checkpoint(const nlohmann::json& checkpoint);
nlohmann::json spec_to_json(const ModelSpec& spec);
ModelSpec spec_from_json(AnsatzKind kind, const nlohmann::json& dims);

}  // namespace clockvmc
