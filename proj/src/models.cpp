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

#include "clockvmc/models.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace clockvmc {

namespace {

Eigen::VectorXd spins_vector(std::span<const Spin> spins) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(spins.size()));
  for (std::size_t i = 0; i < spins.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = spins[i];
  }
  return v;
}

void check_param_size(std::span<const double> params, std::size_t expected) {
  if (params.size() != expected) {
    throw std::invalid_argument("parameter vector has " +
                                std::to_string(params.size()) +
                                " entries, model expects " +
                                std::to_string(expected));
  }
}

// Reads complex values from interleaved (re, im) slots.
template <class Derived>
const double* read_complex(const double* p, Eigen::PlainObjectBase<Derived>& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = Complex(p[0], p[1]);
      p += 2;
    }
  }
  return p;
}

template <class Derived>
double* write_complex(double* p, const Eigen::PlainObjectBase<Derived>& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      p[0] = m(r, c).real();
      p[1] = m(r, c).imag();
      p += 2;
    }
  }
  return p;
}

}  // namespace

std::string_view to_string(AnsatzKind kind) {
  switch (kind) {
    case AnsatzKind::rbm:
      return "rbm";
    case AnsatzKind::mp_rbm:
      return "mp-rbm";
    case AnsatzKind::ar:
      return "ar";
    case AnsatzKind::ar_split:
      return "ar-split";
  }
  return "unknown";
}

AnsatzKind parse_ansatz(std::string_view name) {
  if (name == "rbm") return AnsatzKind::rbm;
  if (name == "mp-rbm") return AnsatzKind::mp_rbm;
  if (name == "ar") return AnsatzKind::ar;
  if (name == "ar-split") return AnsatzKind::ar_split;
  throw std::invalid_argument("unknown ansatz '" + std::string(name) +
                              "' (expected rbm, mp-rbm, ar or ar-split)");
}

void ModelSpec::validate() const {
  if (n_spins < 1) throw std::invalid_argument("model needs at least one spin");
  if (!is_autoregressive(kind) && alpha < 1) {
    throw std::invalid_argument("RBM hidden-unit ratio alpha must be >= 1");
  }
  if (is_autoregressive(kind) && (n_layers < 1 || n_hidden < 1)) {
    throw std::invalid_argument("AR network needs n_layers >= 1 and n_hidden >= 1");
  }
}

void Model::check_spins(std::span<const Spin> spins) const {
  if (static_cast<int>(spins.size()) != spec_.n_spins) {
    throw std::invalid_argument("configuration length does not match model");
  }
  for (Spin s : spins) {
    if (s != 1 && s != -1) throw std::invalid_argument("spin values must be +1 or -1");
  }
}

Complex log2cosh(Complex z) {
  if (z.real() < 0.0) z = -z;
  return z + std::log(1.0 + std::exp(-2.0 * z));
}

double log2cosh(double x) {
  x = std::abs(x);
  return x + std::log1p(std::exp(-2.0 * x));
}

// ---------------------------------------------------------------------------
// Complex RBM

RbmModel::RbmModel(const ModelSpec& spec) : Model(spec) {
  spec.validate();
  const int n = spec.n_spins;
  const int nh = spec.alpha * n;
  a_ = Eigen::VectorXcd::Zero(n);
  b_ = Eigen::VectorXcd::Zero(nh);
  w_ = Eigen::MatrixXcd::Zero(nh, n);
}

std::size_t RbmModel::n_params() const {
  return 2 * static_cast<std::size_t>(a_.size() + b_.size() + w_.size());
}

Complex RbmModel::log_psi(std::span<const Spin> spins) const {
  check_spins(spins);
  const Eigen::VectorXd sigma = spins_vector(spins);
  const Eigen::VectorXcd theta = b_ + w_ * sigma;
  Complex result(0.0, 0.0);
  for (Eigen::Index j = 0; j < sigma.size(); ++j) result += a_(j) * sigma(j);
  for (Eigen::Index l = 0; l < theta.size(); ++l) result += log2cosh(theta(l));
  return result;
}

void RbmModel::log_derivatives(std::span<const Spin> spins,
                               std::span<Complex> out) const {
  check_spins(spins);
  if (out.size() != n_params()) throw std::invalid_argument("derivative buffer size");
  const Eigen::VectorXd sigma = spins_vector(spins);
  const Eigen::VectorXcd theta = b_ + w_ * sigma;
  const Complex i(0.0, 1.0);
  std::size_t k = 0;
  auto put = [&](Complex d) {
    out[k++] = d;
    out[k++] = i * d;
  };
  for (Eigen::Index j = 0; j < sigma.size(); ++j) put(sigma(j));
  Eigen::VectorXcd t(theta.size());
  for (Eigen::Index l = 0; l < theta.size(); ++l) t(l) = std::tanh(theta(l));
  for (Eigen::Index l = 0; l < t.size(); ++l) put(t(l));
  for (Eigen::Index l = 0; l < w_.rows(); ++l) {
    for (Eigen::Index j = 0; j < w_.cols(); ++j) put(sigma(j) * t(l));
  }
}

std::vector<double> RbmModel::parameters() const {
  std::vector<double> p(n_params());
  double* it = p.data();
  it = write_complex(it, a_);
  it = write_complex(it, b_);
  write_complex(it, w_);
  return p;
}

void RbmModel::set_parameters(std::span<const double> params) {
  check_param_size(params, n_params());
  const double* it = params.data();
  it = read_complex(it, a_);
  it = read_complex(it, b_);
  read_complex(it, w_);
}

// ---------------------------------------------------------------------------
// Real RBM and modulus/phase RBM

RealRbm::RealRbm(int n_visible, int n_hidden)
    : a(Eigen::VectorXd::Zero(n_visible)),
      b(Eigen::VectorXd::Zero(n_hidden)),
      w(Eigen::MatrixXd::Zero(n_hidden, n_visible)) {}

double RealRbm::log_value(const Eigen::VectorXd& sigma) const {
  const Eigen::VectorXd theta = b + w * sigma;
  double result = a.dot(sigma);
  for (Eigen::Index l = 0; l < theta.size(); ++l) result += log2cosh(theta(l));
  return result;
}

void RealRbm::gradient(const Eigen::VectorXd& sigma, std::span<double> out) const {
  const Eigen::VectorXd theta = b + w * sigma;
  std::size_t k = 0;
  for (Eigen::Index j = 0; j < sigma.size(); ++j) out[k++] = sigma(j);
  const Eigen::VectorXd t = theta.array().tanh();
  for (Eigen::Index l = 0; l < t.size(); ++l) out[k++] = t(l);
  for (Eigen::Index l = 0; l < w.rows(); ++l) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) out[k++] = sigma(j) * t(l);
  }
}

void RealRbm::read(std::span<const double> params) {
  std::size_t k = 0;
  for (Eigen::Index j = 0; j < a.size(); ++j) a(j) = params[k++];
  for (Eigen::Index l = 0; l < b.size(); ++l) b(l) = params[k++];
  for (Eigen::Index l = 0; l < w.rows(); ++l) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) w(l, j) = params[k++];
  }
}

void RealRbm::write(std::span<double> params) const {
  std::size_t k = 0;
  for (Eigen::Index j = 0; j < a.size(); ++j) params[k++] = a(j);
  for (Eigen::Index l = 0; l < b.size(); ++l) params[k++] = b(l);
  for (Eigen::Index l = 0; l < w.rows(); ++l) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) params[k++] = w(l, j);
  }
}

MpRbmModel::MpRbmModel(const ModelSpec& spec)
    : Model(spec),
      modulus_(spec.n_spins, spec.alpha * spec.n_spins),
      phase_(spec.n_spins, spec.alpha * spec.n_spins) {
  spec.validate();
}

std::size_t MpRbmModel::n_params() const {
  return modulus_.n_params() + phase_.n_params();
}

Complex MpRbmModel::log_psi(std::span<const Spin> spins) const {
  check_spins(spins);
  const Eigen::VectorXd sigma = spins_vector(spins);
  return {modulus_.log_value(sigma), phase_.log_value(sigma)};
}

void MpRbmModel::log_derivatives(std::span<const Spin> spins,
                                 std::span<Complex> out) const {
  check_spins(spins);
  if (out.size() != n_params()) throw std::invalid_argument("derivative buffer size");
  const Eigen::VectorXd sigma = spins_vector(spins);
  std::vector<double> g(std::max(modulus_.n_params(), phase_.n_params()));
  modulus_.gradient(sigma, g);
  const std::size_t nm = modulus_.n_params();
  for (std::size_t k = 0; k < nm; ++k) out[k] = Complex(g[k], 0.0);
  phase_.gradient(sigma, g);
  for (std::size_t k = 0; k < phase_.n_params(); ++k) out[nm + k] = Complex(0.0, g[k]);
}

std::vector<double> MpRbmModel::parameters() const {
  std::vector<double> p(n_params());
  modulus_.write(std::span<double>(p).first(modulus_.n_params()));
  phase_.write(std::span<double>(p).subspan(modulus_.n_params()));
  return p;
}

void MpRbmModel::set_parameters(std::span<const double> params) {
  check_param_size(params, n_params());
  modulus_.read(params.first(modulus_.n_params()));
  phase_.read(params.subspan(modulus_.n_params()));
}

// ---------------------------------------------------------------------------
// Masked network

template <class T>
MaskedNetwork<T>::MaskedNetwork(int n_sites, int n_layers, int features,
                                int out_features)
    : n_sites_(n_sites), out_features_(out_features) {
  if (n_layers < 1) return;  // empty network, used for the unused variant
  int in_features = 1;
  for (int l = 0; l < n_layers; ++l) {
    const bool last = (l == n_layers - 1);
    const int of = last ? out_features : features;
    const Eigen::Index rows = static_cast<Eigen::Index>(n_sites) * of;
    const Eigen::Index cols = static_cast<Eigen::Index>(n_sites) * in_features;
    Layer layer;
    layer.w = Mat::Zero(rows, cols);
    layer.b = Vec::Zero(rows);
    layer.mask.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Eigen::Index out_site = r / of;
      for (Eigen::Index c = 0; c < cols; ++c) {
        const Eigen::Index in_site = c / in_features;
        layer.mask(r, c) = (l == 0) ? in_site < out_site : in_site <= out_site;
      }
    }
    layer.activation = !last;
    layers_.push_back(std::move(layer));
    in_features = of;
  }
}

template <class T>
bool MaskedNetwork<T>::connected(int layer, Eigen::Index out, Eigen::Index in) const {
  return layers_.at(layer).mask(out, in);
}

template <class T>
std::size_t MaskedNetwork<T>::n_entries() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) {
    n += static_cast<std::size_t>(layer.mask.count()) + layer.b.size();
  }
  return n;
}

template <class T>
const typename MaskedNetwork<T>::Vec& MaskedNetwork<T>::forward(
    const Eigen::VectorXd& x, Workspace& ws) const {
  ws.inputs.resize(layers_.size());
  ws.outputs.resize(layers_.size());
  Vec current = x.cast<T>();
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    ws.inputs[l] = current;
    Vec pre = layer.w * current + layer.b;
    if (layer.activation) {
      for (Eigen::Index k = 0; k < pre.size(); ++k) pre(k) = std::tanh(pre(k));
    }
    ws.outputs[l] = pre;
    current = std::move(pre);
  }
  return ws.outputs.back();
}

template <class T>
void MaskedNetwork<T>::backward(const Workspace& ws, const Vec& seed,
                                std::span<T> grad) const {
  // Parameter blocks are laid out layer by layer; compute offsets first.
  std::vector<std::size_t> offsets(layers_.size() + 1, 0);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    offsets[l + 1] = offsets[l] + static_cast<std::size_t>(layers_[l].mask.count()) +
                     layers_[l].b.size();
  }
  Vec delta = seed;  // d/d(output of layer l)
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const Layer& layer = layers_[li];
    if (layer.activation) {
      const Vec& y = ws.outputs[li];
      for (Eigen::Index k = 0; k < delta.size(); ++k) {
        delta(k) *= T(1) - y(k) * y(k);
      }
    }
    const Vec& in = ws.inputs[li];
    std::size_t k = offsets[li];
    for (Eigen::Index r = 0; r < layer.w.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.w.cols(); ++c) {
        if (layer.mask(r, c)) grad[k++] = delta(r) * in(c);
      }
    }
    for (Eigen::Index r = 0; r < layer.b.size(); ++r) grad[k++] = delta(r);
    if (li > 0) delta = layer.w.transpose() * delta;
  }
}

template <class T>
void MaskedNetwork<T>::read(std::span<const T> params) {
  std::size_t k = 0;
  for (auto& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.w.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.w.cols(); ++c) {
        layer.w(r, c) = layer.mask(r, c) ? params[k++] : T(0);
      }
    }
    for (Eigen::Index r = 0; r < layer.b.size(); ++r) layer.b(r) = params[k++];
  }
}

template <class T>
void MaskedNetwork<T>::write(std::span<T> params) const {
  std::size_t k = 0;
  for (const auto& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.w.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.w.cols(); ++c) {
        if (layer.mask(r, c)) params[k++] = layer.w(r, c);
      }
    }
    for (Eigen::Index r = 0; r < layer.b.size(); ++r) params[k++] = layer.b(r);
  }
}

template class MaskedNetwork<double>;
template class MaskedNetwork<Complex>;

// ---------------------------------------------------------------------------
// Autoregressive model

namespace {
int layers_if(bool enabled, int n_layers) { return enabled ? n_layers : 0; }
}  // namespace

ArModel::ArModel(const ModelSpec& spec)
    : Model(spec),
      joint_(spec.n_spins, layers_if(spec.kind == AnsatzKind::ar, spec.n_layers),
             spec.n_hidden, 2),
      modulus_(spec.n_spins,
               layers_if(spec.kind == AnsatzKind::ar_split, spec.n_layers),
               spec.n_hidden, 2),
      phase_(spec.n_spins,
             layers_if(spec.kind == AnsatzKind::ar_split, spec.n_layers),
             spec.n_hidden, 2) {
  spec.validate();
  if (!is_autoregressive(spec.kind)) {
    throw std::invalid_argument("ArModel requires an autoregressive ansatz kind");
  }
}

std::size_t ArModel::n_params() const {
  return split() ? modulus_.n_entries() + phase_.n_entries()
                 : 2 * joint_.n_entries();
}

// Unit offset on the raw outputs: zero parameters give the uniform state.
Eigen::VectorXcd ArModel::joint_raw_output(const Eigen::VectorXd& x,
                                           MaskedNetwork<Complex>::Workspace& ws) const {
  return joint_.forward(x, ws).array() + Complex(1.0, 0.0);
}

Eigen::MatrixX2cd ArModel::log_conditionals(std::span<const Spin> spins) const {
  check_spins(spins);
  const Eigen::VectorXd x = spins_vector(spins);
  const Eigen::Index n = x.size();
  Eigen::MatrixX2cd out(n, 2);
  if (split()) {
    MaskedNetwork<double>::Workspace wm, wp;
    const Eigen::VectorXd& a = modulus_.forward(x, wm);
    const Eigen::VectorXd& phi = phase_.forward(x, wp);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a1 = a(2 * i), a2 = a(2 * i + 1);
      const double m = std::max(a1, a2);
      const double log_norm =
          m + 0.5 * std::log(std::exp(2.0 * (a1 - m)) + std::exp(2.0 * (a2 - m)));
      out(i, 0) = Complex(a1 - log_norm, phi(2 * i));
      out(i, 1) = Complex(a2 - log_norm, phi(2 * i + 1));
    }
  } else {
    MaskedNetwork<Complex>::Workspace ws;
    const Eigen::VectorXcd z = joint_raw_output(x, ws);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double norm = std::norm(z(2 * i)) + std::norm(z(2 * i + 1));
      const double half_log_norm = 0.5 * std::log(norm);
      out(i, 0) = std::log(z(2 * i)) - half_log_norm;
      out(i, 1) = std::log(z(2 * i + 1)) - half_log_norm;
    }
  }
  return out;
}

Complex ArModel::log_psi(std::span<const Spin> spins) const {
  const Eigen::MatrixX2cd lc = log_conditionals(spins);
  Complex result(0.0, 0.0);
  for (std::size_t i = 0; i < spins.size(); ++i) {
    result += lc(static_cast<Eigen::Index>(i), spins[i] > 0 ? 0 : 1);
  }
  if (std::isnan(result.real())) {
    return {-std::numeric_limits<double>::infinity(), 0.0};
  }
  return result;
}

std::array<Complex, 2> ArModel::conditional(std::span<const Spin> prefix) const {
  if (static_cast<int>(prefix.size()) >= n_spins()) {
    throw std::invalid_argument("conditional prefix must be shorter than the chain");
  }
  std::vector<Spin> full(n_spins(), Spin{1});
  std::copy(prefix.begin(), prefix.end(), full.begin());
  const Eigen::MatrixX2cd lc = log_conditionals(full);
  const auto i = static_cast<Eigen::Index>(prefix.size());
  return {std::exp(lc(i, 0)), std::exp(lc(i, 1))};
}

void ArModel::log_derivatives(std::span<const Spin> spins,
                              std::span<Complex> out) const {
  check_spins(spins);
  if (out.size() != n_params()) throw std::invalid_argument("derivative buffer size");
  const Eigen::VectorXd x = spins_vector(spins);
  const Eigen::Index n = x.size();

  if (split()) {
    MaskedNetwork<double>::Workspace wm, wp;
    const Eigen::VectorXd a = modulus_.forward(x, wm);
    phase_.forward(x, wp);
    Eigen::VectorXd seed_mod(2 * n), seed_phase = Eigen::VectorXd::Zero(2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int s = spins[i] > 0 ? 0 : 1;
      const double a1 = a(2 * i), a2 = a(2 * i + 1);
      const double m = std::max(a1, a2);
      const double e1 = std::exp(2.0 * (a1 - m)), e2 = std::exp(2.0 * (a2 - m));
      // d/da_k [a_s - 1/2 log(e^{2 a_1} + e^{2 a_2})] = delta_ks - softmax_k(2a)
      seed_mod(2 * i) = (s == 0 ? 1.0 : 0.0) - e1 / (e1 + e2);
      seed_mod(2 * i + 1) = (s == 1 ? 1.0 : 0.0) - e2 / (e1 + e2);
      seed_phase(2 * i + s) = 1.0;
    }
    std::vector<double> gm(modulus_.n_entries()), gp(phase_.n_entries());
    modulus_.backward(wm, seed_mod, gm);
    phase_.backward(wp, seed_phase, gp);
    for (std::size_t k = 0; k < gm.size(); ++k) out[k] = Complex(gm[k], 0.0);
    for (std::size_t k = 0; k < gp.size(); ++k) out[gm.size() + k] = Complex(0.0, gp[k]);
    return;
  }

  // L = sum_i log z_{i,s} - 1/2 log(|z_{i,1}|^2 + |z_{i,2}|^2). With A = dL/dz and
  // B = dL/dzbar, a complex parameter c = x + iy has
  //   dL/dx = G1 + conj(G2),  dL/dy = i (G1 - conj(G2)),
  // where G1, G2 are holomorphic backprops seeded with A and conj(B).
  MaskedNetwork<Complex>::Workspace ws;
  const Eigen::VectorXcd z = joint_raw_output(x, ws);
  Eigen::VectorXcd seed_a(2 * n), seed_b(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int s = spins[i] > 0 ? 0 : 1;
    const double norm = std::norm(z(2 * i)) + std::norm(z(2 * i + 1));
    for (int k = 0; k < 2; ++k) {
      const Complex zk = z(2 * i + k);
      seed_a(2 * i + k) = -0.5 * std::conj(zk) / norm;
      seed_b(2 * i + k) = -0.5 * std::conj(zk) / norm;  // conj(B_k), B_k = -z_k / (2 norm)
    }
    seed_a(2 * i + s) += 1.0 / z(2 * i + s);
  }
  const std::size_t ne = joint_.n_entries();
  std::vector<Complex> g1(ne), g2(ne);
  joint_.backward(ws, seed_a, g1);
  joint_.backward(ws, seed_b, g2);
  const Complex im(0.0, 1.0);
  for (std::size_t k = 0; k < ne; ++k) {
    const Complex c2 = std::conj(g2[k]);
    out[2 * k] = g1[k] + c2;
    out[2 * k + 1] = im * (g1[k] - c2);
  }
}

std::vector<double> ArModel::parameters() const {
  std::vector<double> p(n_params());
  if (split()) {
    modulus_.write(std::span<double>(p).first(modulus_.n_entries()));
    phase_.write(std::span<double>(p).subspan(modulus_.n_entries()));
  } else {
    std::vector<Complex> c(joint_.n_entries());
    joint_.write(c);
    for (std::size_t k = 0; k < c.size(); ++k) {
      p[2 * k] = c[k].real();
      p[2 * k + 1] = c[k].imag();
    }
  }
  return p;
}

void ArModel::set_parameters(std::span<const double> params) {
  check_param_size(params, n_params());
  if (split()) {
    modulus_.read(params.first(modulus_.n_entries()));
    phase_.read(params.subspan(modulus_.n_entries()));
  } else {
    std::vector<Complex> c(joint_.n_entries());
    for (std::size_t k = 0; k < c.size(); ++k) {
      c[k] = Complex(params[2 * k], params[2 * k + 1]);
    }
    joint_.read(c);
  }
}

// ---------------------------------------------------------------------------

std::unique_ptr<Model> make_model(const ModelSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case AnsatzKind::rbm:
      return std::make_unique<RbmModel>(spec);
    case AnsatzKind::mp_rbm:
      return std::make_unique<MpRbmModel>(spec);
    case AnsatzKind::ar:
    case AnsatzKind::ar_split:
      return std::make_unique<ArModel>(spec);
  }
  throw std::invalid_argument("unknown ansatz kind");
}

std::unique_ptr<Model> init_parameters(const ModelSpec& spec, std::uint64_t seed) {
  auto model = make_model(spec);
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), 0x1417U};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 0.01);
  std::vector<double> p(model->n_params());
  for (double& v : p) v = normal(rng);
  model->set_parameters(p);
  return model;
}

nlohmann::json spec_to_json(const ModelSpec& spec) {
  nlohmann::json dims{{"n_spins", spec.n_spins}};
  if (is_autoregressive(spec.kind)) {
    dims["n_layers"] = spec.n_layers;
    dims["n_hidden"] = spec.n_hidden;
  } else {
    dims["alpha"] = spec.alpha;
  }
  return dims;
}

ModelSpec spec_from_json(AnsatzKind kind, const nlohmann::json& dims) {
  ModelSpec spec;
  spec.kind = kind;
  spec.n_spins = dims.at("n_spins").get<int>();
  if (is_autoregressive(kind)) {
    spec.n_layers = dims.at("n_layers").get<int>();
    spec.n_hidden = dims.at("n_hidden").get<int>();
  } else {
    spec.alpha = dims.at("alpha").get<int>();
  }
  spec.validate();
  return spec;
}

nlohmann::json model_checkpoint(const Model& model, std::uint64_t seed) {
  return nlohmann::json{{"format", "clockvmc-checkpoint"},
                        {"version", 1},
                        {"kind", std::string(to_string(model.kind()))},
                        {"dims", spec_to_json(model.spec())},
                        {"seed", seed},
                        {"parameters", model.parameters()}};
}

std::unique_ptr<Model> model_from_checkpoint(const nlohmann::json& checkpoint) {
  if (checkpoint.value("format", "") != "clockvmc-checkpoint") {
    throw std::invalid_argument("not a clockvmc checkpoint");
  }
  const AnsatzKind kind = parse_ansatz(checkpoint.at("kind").get<std::string>());
  auto model = make_model(spec_from_json(kind, checkpoint.at("dims")));
  const auto params = checkpoint.at("parameters").get<std::vector<double>>();
  model->set_parameters(params);
  return model;
}

}  // namespace clockvmc
