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

#include "clockvmc/hamiltonian.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "clockvmc/errors.hpp"

namespace clockvmc {

namespace {

constexpr double kHopDropTolerance = 1e-14;

double tfim_diagonal(const TfimParams& params, BasisIndex phys_index) {
  // Adjacent bits equal <=> aligned bond.
  double diag = 0.0;
  for (int i = 0; i + 1 < params.n_phys; ++i) {
    const bool a = (phys_index >> i) & 1U;
    const bool b = (phys_index >> (i + 1)) & 1U;
    diag += (a == b) ? params.coupling : -params.coupling;
  }
  return diag;
}

}  // namespace

OperatorRow tfim_row(const TfimParams& params, BasisIndex phys_index) {
  OperatorRow row;
  row.reserve(params.n_phys + 1);
  row.push_back({phys_index, Complex(tfim_diagonal(params, phys_index), 0.0)});
  for (int i = 0; i < params.n_phys; ++i) {
    row.push_back({phys_index ^ (BasisIndex{1} << i), Complex(params.field, 0.0)});
  }
  return row;
}

OperatorRow tfim_row(const TfimParams& params, std::span<const Spin> physical) {
  if (static_cast<int>(physical.size()) != params.n_phys) {
    throw std::invalid_argument("tfim_row: configuration length mismatch");
  }
  return tfim_row(params, spins_to_index(physical));
}

Eigen::MatrixXd tfim_dense(const TfimParams& params) {
  const auto dim = static_cast<Eigen::Index>(BasisIndex{1} << params.n_phys);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index p = 0; p < dim; ++p) {
    for (const auto& [q, v] : tfim_row(params, static_cast<BasisIndex>(p))) {
      h(p, static_cast<Eigen::Index>(q)) += v.real();
    }
  }
  return h;
}

std::shared_ptr<const TfimSpectrum> TfimSpectrum::compute(const TfimParams& params) {
  if (params.n_phys < 1) {
    throw std::invalid_argument("TFIM needs at least one spin");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(tfim_dense(params));
  if (solver.info() != Eigen::Success) {
    throw NumericError("TFIM eigendecomposition failed");
  }
  auto out = std::make_shared<TfimSpectrum>();
  out->energies = solver.eigenvalues();
  out->vectors = solver.eigenvectors();
  return out;
}

Propagator::Propagator(const TfimParams& params, double dt)
    : Propagator(TfimSpectrum::compute(params), dt) {}

Propagator::Propagator(std::shared_ptr<const TfimSpectrum> spectrum, double dt)
    : spectrum_(std::move(spectrum)), dt_(dt) {
  if (!std::isfinite(dt)) {
    throw std::invalid_argument("propagator time step must be finite");
  }
  // V real: U = V cos(E dt) V^T - i V sin(E dt) V^T
  const Eigen::MatrixXd& v = spectrum_->vectors;
  const Eigen::ArrayXd phase = spectrum_->energies.array() * dt;
  const Eigen::MatrixXd re = v * phase.cos().matrix().asDiagonal() * v.transpose();
  const Eigen::MatrixXd im = v * (-phase.sin()).matrix().asDiagonal() * v.transpose();
  matrix_.resize(v.rows(), v.cols());
  matrix_.real() = re;
  matrix_.imag() = im;
}

ClockHamiltonian::ClockHamiltonian(TfimParams tfim, std::uint64_t n_steps,
                                   double total_time)
    : tfim_(tfim),
      n_steps_(n_steps),
      total_time_(total_time),
      layout_{tfim.n_phys, clock_spins_for(n_steps)},
      propagator_(tfim, n_steps == 0 ? 0.0 : total_time / static_cast<double>(n_steps)) {
  if (!std::isfinite(total_time)) {
    throw std::invalid_argument("total time must be finite");
  }
}

ClockHamiltonian::ClockHamiltonian(TfimParams tfim, std::uint64_t n_steps, double total_time,
                                   std::shared_ptr<const TfimSpectrum> spectrum)
    : tfim_(tfim),
      n_steps_(n_steps),
      total_time_(total_time),
      layout_{tfim.n_phys, clock_spins_for(n_steps)},
      propagator_(std::move(spectrum),
                  n_steps == 0 ? 0.0 : total_time / static_cast<double>(n_steps)) {
  if (!std::isfinite(total_time)) {
    throw std::invalid_argument("total time must be finite");
  }
}

ClockHamiltonian ClockHamiltonian::with_clock_spins(TfimParams tfim, int n_clock,
                                                    double total_time) {
  if (n_clock < 0 || n_clock > 30) {
    throw std::invalid_argument("clock spin count out of range");
  }
  return ClockHamiltonian(tfim, (std::uint64_t{1} << n_clock) - 1, total_time);
}

ClockHamiltonian ClockHamiltonian::with_total_time(double total_time) const {
  return ClockHamiltonian(tfim_, n_steps_, total_time, propagator_.spectrum());
}

BasisIndex ClockHamiltonian::clock_word(std::uint64_t t) const {
  return gray_encode(t, layout_.n_clock);
}

OperatorRow ClockHamiltonian::row(const SpinConfiguration& config) const {
  if (config.layout() != layout_) {
    throw std::invalid_argument("configuration layout does not match Hamiltonian");
  }
  return row(config_to_index(config));
}

OperatorRow ClockHamiltonian::row(BasisIndex index) const {
  const BasisIndex phys = phys_part(index, layout_);
  const ClockTime time = clock_time_of_index(index, layout_, n_steps_);

  OperatorRow row;
  double diag = 0.0;
  if (!time.unused) {
    const std::uint64_t t = time.value;
    if (n_steps_ > 0) {
      diag += (t == 0 || t == n_steps_) ? 0.5 : 1.0;
    }
    if (t == 0) {
      // 1/2 sum_i (1 - sz_i) counts down spins.
      diag += static_cast<double>(std::popcount(phys));
    }
  }
  row.push_back({index, Complex(diag, 0.0)});
  if (time.unused) {
    return row;
  }

  const std::uint64_t t = time.value;
  const BasisIndex phys_dim = layout_.phys_dimension();
  // <p,t| -1/2 U (x) |t><t-1| |q,t-1> = -U(p,q)/2
  if (t > 0) {
    const BasisIndex word = clock_word(t - 1);
    for (BasisIndex q = 0; q < phys_dim; ++q) {
      const Complex v = -0.5 * propagator_(phys, q);
      if (std::abs(v) >= kHopDropTolerance) {
        row.push_back({join_index(q, word, layout_), v});
      }
    }
  }
  // <p,t| -1/2 U^dagger (x) |t><t+1| |q,t+1> = -conj(U(q,p))/2
  if (t < n_steps_) {
    const BasisIndex word = clock_word(t + 1);
    for (BasisIndex q = 0; q < phys_dim; ++q) {
      const Complex v = -0.5 * std::conj(propagator_(q, phys));
      if (std::abs(v) >= kHopDropTolerance) {
        row.push_back({join_index(q, word, layout_), v});
      }
    }
  }
  return row;
}

Eigen::MatrixXcd fk_dense(const ClockHamiltonian& h, BasisIndex cap) {
  const BasisIndex dim = h.layout().dimension();
  if (dim > cap) {
    throw std::length_error("dense clock Hamiltonian of dimension " +
                            std::to_string(dim) + " exceeds cap " +
                            std::to_string(cap));
  }
  const auto n = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (const auto& [j, v] : h.row(static_cast<BasisIndex>(i))) {
      m(i, static_cast<Eigen::Index>(j)) += v;
    }
  }
  return m;
}

}  // namespace clockvmc

namespace clockvmc {

PhysicalOperator average_magnetization(int n_phys) {
  return {"magnetization", [n_phys](BasisIndex p) {
            const int down = std::popcount(p);
            const double m = static_cast<double>(n_phys - 2 * down) / n_phys;
            return OperatorRow{{p, Complex(m, 0.0)}};
          }};
}

PhysicalOperator identity_operator() {
  return {"identity", [](BasisIndex p) { return OperatorRow{{p, Complex(1.0, 0.0)}}; }};
}

}  // namespace clockvmc
