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

#include "clockvmc/exact_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "clockvmc/errors.hpp"

namespace clockvmc {

namespace {

constexpr double kMinGap = 1e-10;

std::vector<double> probabilities(const StateVector& state) {
  std::vector<double> p(static_cast<std::size_t>(state.amplitudes.size()));
  for (Eigen::Index i = 0; i < state.amplitudes.size(); ++i) {
    p[static_cast<std::size_t>(i)] = std::norm(state.amplitudes(i));
  }
  return p;
}

void check_state(const StateVector& state) {
  if (static_cast<BasisIndex>(state.amplitudes.size()) != state.layout.dimension()) {
    throw std::invalid_argument("state vector size does not match its layout");
  }
}

template <class T>
void write_le(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(std::begin(bytes), std::end(bytes));
  }
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T read_le(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  is.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (!is) throw std::runtime_error("state file truncated");
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(std::begin(bytes), std::end(bytes));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0 || !std::isfinite(n)) {
    throw std::domain_error("cannot normalise a zero or non-finite state");
  }
  return StateVector{layout, amplitudes / n};
}

GroundState ground_state(const ClockHamiltonian& h, BasisIndex cap) {
  const Eigen::MatrixXcd dense = fk_dense(h, cap);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense);
  if (solver.info() != Eigen::Success) {
    throw NumericError("clock Hamiltonian eigendecomposition failed");
  }
  GroundState gs;
  gs.energy = solver.eigenvalues()(0);
  gs.gap = dense.rows() > 1 ? solver.eigenvalues()(1) - gs.energy
                            : std::numeric_limits<double>::infinity();
  if (gs.gap < kMinGap) {
    throw NumericError("degenerate ground space (gap " + std::to_string(gs.gap) + ")");
  }
  Eigen::VectorXcd v = solver.eigenvectors().col(0);
  Eigen::Index k_max = 0;
  v.cwiseAbs().maxCoeff(&k_max);
  const Complex phase = std::conj(v(k_max)) / std::abs(v(k_max));
  v *= phase;
  v(k_max) = Complex(v(k_max).real(), 0.0);
  gs.state = StateVector{h.layout(), v.normalized()};
  return gs;
}

StateVector build_history_state(const ClockHamiltonian& h,
                                const Eigen::VectorXcd& initial) {
  const SpinLayout layout = h.layout();
  if (static_cast<BasisIndex>(initial.size()) != layout.phys_dimension()) {
    throw std::invalid_argument("initial state has wrong dimension");
  }
  StateVector state{layout, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.dimension()))};
  const double weight = 1.0 / std::sqrt(static_cast<double>(h.n_steps() + 1));
  Eigen::VectorXcd psi = initial.normalized();
  for (std::uint64_t t = 0; t <= h.n_steps(); ++t) {
    const BasisIndex word = h.clock_word(t);
    for (BasisIndex p = 0; p < layout.phys_dimension(); ++p) {
      state.amplitudes(static_cast<Eigen::Index>(join_index(p, word, layout))) =
          weight * psi(static_cast<Eigen::Index>(p));
    }
    if (t < h.n_steps()) psi = h.propagator().matrix() * psi;
  }
  return state;
}

StateVector build_history_state(const ClockHamiltonian& h) {
  Eigen::VectorXcd up = Eigen::VectorXcd::Zero(
      static_cast<Eigen::Index>(h.layout().phys_dimension()));
  up(0) = 1.0;
  return build_history_state(h, up);
}

Eigen::MatrixXcd reduced_density_matrix(const StateVector& state, int n_p) {
  check_state(state);
  if (n_p < 1 || n_p > state.layout.n_phys) {
    throw std::invalid_argument("n_p must lie in [1, n_phys]");
  }
  const StateVector s = state.normalized();
  const auto rest = static_cast<Eigen::Index>(1) << (state.layout.size() - n_p);
  const auto kept = static_cast<Eigen::Index>(1) << n_p;
  // Column a of `m` holds the amplitudes with the kept spins in state a.
  Eigen::Map<const Eigen::MatrixXcd> m(s.amplitudes.data(), rest, kept);
  return m.transpose() * m.conjugate();
}

double renyi2_per_spin(const StateVector& state, int n_p) {
  const Eigen::MatrixXcd rho = reduced_density_matrix(state, n_p);
  const double purity = rho.squaredNorm();
  return -std::log(purity) / static_cast<double>(state.layout.n_phys);
}

double gini(const StateVector& state) {
  check_state(state);
  std::vector<double> p = probabilities(state);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (total == 0.0) throw std::domain_error("gini of a zero state");
  std::sort(p.begin(), p.end());
  const double n = static_cast<double>(p.size());
  // sum_{i,j} |p_i - p_j| = 2 sum_i (2i - n - 1) p_(i), ascending, 1-based.
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += (2.0 * static_cast<double>(i + 1) - n - 1.0) * p[i];
  }
  return acc / (n * total);
}

double coverage_ratio(const StateVector& state, double mass) {
  check_state(state);
  if (!(mass > 0.0 && mass < 1.0)) throw std::invalid_argument("mass must lie in (0, 1)");
  std::vector<double> p = probabilities(state);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (total == 0.0) throw std::domain_error("coverage of a zero state");
  std::sort(p.begin(), p.end(), std::greater<>());
  double cumulative = 0.0;
  std::size_t r = 0;
  while (r < p.size()) {
    cumulative += p[r] / total;
    ++r;
    if (cumulative >= mass - 1e-12) break;
  }
  return static_cast<double>(r) / static_cast<double>(p.size());
}

double infidelity(const StateVector& a, const StateVector& b) {
  if (a.amplitudes.size() != b.amplitudes.size()) {
    throw std::invalid_argument("infidelity: state dimensions differ");
  }
  const double na = a.amplitudes.squaredNorm();
  const double nb = b.amplitudes.squaredNorm();
  if (na == 0.0 || nb == 0.0) throw std::domain_error("infidelity of a zero state");
  const double overlap = std::norm(a.amplitudes.dot(b.amplitudes));
  return std::clamp(1.0 - overlap / (na * nb), 0.0, 1.0);
}

StateVector model_state(const Model& model, SpinLayout layout, bool normalize) {
  if (model.n_spins() != layout.size()) {
    throw std::invalid_argument("model size does not match layout");
  }
  const auto dim = static_cast<Eigen::Index>(layout.dimension());
  std::vector<Complex> logs(static_cast<std::size_t>(dim));
  std::vector<Spin> spins(layout.size());
  double max_re = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < dim; ++i) {
    index_to_spins(static_cast<BasisIndex>(i), spins);
    logs[i] = model.log_psi(spins);
    max_re = std::max(max_re, logs[i].real());
  }
  if (!std::isfinite(max_re)) throw std::domain_error("model amplitudes vanish everywhere");
  StateVector state{layout, Eigen::VectorXcd(dim)};
  for (Eigen::Index i = 0; i < dim; ++i) {
    state.amplitudes(i) = std::isfinite(logs[i].real())
                              ? std::exp(logs[i] - Complex(max_re, 0.0))
                              : Complex(0.0, 0.0);
  }
  return normalize ? state.normalized() : state;
}

double exact_variational_energy(const Model& model, const ClockHamiltonian& h) {
  const StateVector psi = model_state(model, h.layout(), false);
  const Eigen::VectorXd p = psi.amplitudes.cwiseAbs2();
  const double total = p.sum();
  double energy = 0.0;
  for (Eigen::Index i = 0; i < psi.amplitudes.size(); ++i) {
    if (p(i) == 0.0) continue;
    Complex e_loc(0.0, 0.0);
    for (const auto& [j, v] : h.row(static_cast<BasisIndex>(i))) {
      e_loc += v * psi.amplitudes(static_cast<Eigen::Index>(j)) / psi.amplitudes(i);
    }
    energy += p(i) / total * e_loc.real();
  }
  return energy;
}

double rayleigh_quotient(const StateVector& state, const Eigen::MatrixXcd& dense) {
  const Complex num = state.amplitudes.dot(dense * state.amplitudes);
  return num.real() / state.amplitudes.squaredNorm();
}

double exact_time_magnetization(const StateVector& state, std::uint64_t t) {
  check_state(state);
  const SpinLayout& layout = state.layout;
  if (t >= layout.clock_dimension()) throw std::invalid_argument("time index out of range");
  const BasisIndex word = gray_encode(t, layout.n_clock);
  double weight = 0.0, acc = 0.0;
  for (BasisIndex p = 0; p < layout.phys_dimension(); ++p) {
    const double prob =
        std::norm(state.amplitudes(static_cast<Eigen::Index>(join_index(p, word, layout))));
    const int down = std::popcount(p);
    weight += prob;
    acc += prob * static_cast<double>(layout.n_phys - 2 * down) / layout.n_phys;
  }
  if (weight == 0.0) throw std::domain_error("state has no weight at clock time " + std::to_string(t));
  return acc / weight;
}

double exact_time_observable(const StateVector& state, const ClockHamiltonian& h,
                             const PhysicalOperator& op, std::uint64_t t) {
  check_state(state);
  if (t > h.n_steps()) throw std::invalid_argument("time index beyond the last step");
  const SpinLayout& layout = state.layout;
  const BasisIndex word = h.clock_word(t);
  const double total = state.amplitudes.squaredNorm();
  if (total == 0.0) throw std::domain_error("zero state");
  // sum_s P(s) sum_s' O(s,s') Psi(s')/Psi(s) = sum_s conj(Psi(s)) (O Psi)(s) / <Psi|Psi>
  Complex acc(0.0, 0.0);
  for (BasisIndex p = 0; p < layout.phys_dimension(); ++p) {
    const Complex psi_p = state.amplitudes(static_cast<Eigen::Index>(join_index(p, word, layout)));
    if (psi_p == Complex(0.0, 0.0)) continue;
    for (const auto& [q, v] : op.row(p)) {
      acc += std::conj(psi_p) * v *
             state.amplitudes(static_cast<Eigen::Index>(join_index(q, word, layout)));
    }
  }
  return static_cast<double>(h.n_steps() + 1) * acc.real() / total;
}

DiagnosticsReport diagnose_ground_state(const ClockHamiltonian& h, BasisIndex cap) {
  const GroundState gs = ground_state(h, cap);
  DiagnosticsReport report;
  report.n_phys = h.layout().n_phys;
  report.n_clock = h.layout().n_clock;
  for (int n_p = 1; n_p <= report.n_phys; ++n_p) {
    report.renyi2_per_spin.push_back(renyi2_per_spin(gs.state, n_p));
  }
  report.gini = gini(gs.state);
  report.coverage_ratio = coverage_ratio(gs.state, 0.99);
  report.ground_energy = gs.energy;
  return report;
}

void save_state(const StateVector& state, const std::filesystem::path& path) {
  check_state(state);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(state.layout.n_phys));
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(state.layout.n_clock));
  for (Eigen::Index i = 0; i < state.amplitudes.size(); ++i) {
    write_le<double>(os, state.amplitudes(i).real());
    write_le<double>(os, state.amplitudes(i).imag());
  }
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

StateVector load_state(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw MissingArtifact("state file not found: " + path.string());
  StateVector state;
  state.layout.n_phys = static_cast<int>(read_le<std::uint32_t>(is));
  state.layout.n_clock = static_cast<int>(read_le<std::uint32_t>(is));
  if (state.layout.size() > 30) throw std::runtime_error("state file header out of range");
  const auto dim = static_cast<Eigen::Index>(state.layout.dimension());
  state.amplitudes.resize(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double re = read_le<double>(is);
    const double im = read_le<double>(is);
    state.amplitudes(i) = Complex(re, im);
  }
  return state;
}

}  // namespace clockvmc
