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
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "clockvmc/spin_basis.hpp"

namespace clockvmc {

using Complex = std::complex<double>;

inline constexpr BasisIndex kDefaultDenseCap = BasisIndex{1} << 14;

// H = J sum_i sz_i sz_{i+1} + h sum_i sx_i on an open chain.
struct TfimParams {
  int n_phys = 1;
  double coupling = 0.25;
  double field = 1.0;
};

struct RowEntry {
  BasisIndex index;  // connected basis state, in the spins_to_index convention
  Complex value;
};

// Nonzero entries <sigma|H|sigma'> of one row. The diagonal appears exactly once.
using OperatorRow = std::vector<RowEntry>;

OperatorRow tfim_row(const TfimParams& params, BasisIndex phys_index);
OperatorRow tfim_row(const TfimParams& params, std::span<const Spin> physical);

// Dense real-symmetric TFIM matrix over 2^n_phys states.
Eigen::MatrixXd tfim_dense(const TfimParams& params);

// Eigen-decomposition of the dense TFIM matrix, shared between propagators
// that differ only in the time step.
struct TfimSpectrum {
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;

  static std::shared_ptr<const TfimSpectrum> compute(const TfimParams& params);
};

/// exp(-i H dt) for the TFIM, from an eigendecomposition of the dense matrix.
class Propagator {
 public:
  Propagator(const TfimParams& params, double dt);
  Propagator(std::shared_ptr<const TfimSpectrum> spectrum, double dt);

  double dt() const { return dt_; }
  const std::shared_ptr<const TfimSpectrum>& spectrum() const { return spectrum_; }
  Eigen::Index dim() const { return matrix_.rows(); }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  Complex operator()(BasisIndex row, BasisIndex col) const {
    return matrix_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }

 private:
  std::shared_ptr<const TfimSpectrum> spectrum_;
  double dt_;
  Eigen::MatrixXcd matrix_;
};

/// Clock Hamiltonian whose zero-energy ground state is the history state
///
///   |Psi> = (N+1)^{-1/2} sum_t U(dt)^t |up...up> (x) |t>,   dt = T / N.
///
/// The clock |t> is stored on n_clock = ceil(log2(N+1)) spins in Gray code.
/// Terms:
///   - H0 (x) |0><0| with H0 = 1/2 sum_i (1 - sz_i), pinning the all-up start;
///   - 1/2 sum_{t<N} (|t><t| + |t+1><t+1|) on the clock;
///   - -1/2 sum_{t<N} (U (x) |t+1><t| + h.c.).
/// Clock words decoding to t > N carry no clock terms at all.
class ClockHamiltonian {
 public:
  ClockHamiltonian(TfimParams tfim, std::uint64_t n_steps, double total_time);

  // n_steps = 2^n_clock - 1, so every clock word is a valid time.
  static ClockHamiltonian with_clock_spins(TfimParams tfim, int n_clock,
                                           double total_time);

  // Same chain and clock, different total time (used by the adiabatic schedule).
  ClockHamiltonian with_total_time(double total_time) const;

  const TfimParams& tfim() const { return tfim_; }
  std::uint64_t n_steps() const { return n_steps_; }
  int n_clock() const { return layout_.n_clock; }
  double total_time() const { return total_time_; }
  double dt() const { return propagator_.dt(); }
  const SpinLayout& layout() const { return layout_; }
  const Propagator& propagator() const { return propagator_; }

  OperatorRow row(BasisIndex index) const;
  OperatorRow row(const SpinConfiguration& config) const;

  // Gray word on the clock spins for time t (t <= n_steps).
  BasisIndex clock_word(std::uint64_t t) const;

 private:
  ClockHamiltonian(TfimParams tfim, std::uint64_t n_steps, double total_time,
                   std::shared_ptr<const TfimSpectrum> spectrum);

  TfimParams tfim_;
  std::uint64_t n_steps_;
  double total_time_;
  SpinLayout layout_;
  Propagator propagator_;
};

// Dense matrix assembled from rows. Throws std::length_error above `cap`.
Eigen::MatrixXcd fk_dense(const ClockHamiltonian& h,
                          BasisIndex cap = kDefaultDenseCap);

}  // namespace clockvmc

#include <functional>
#include <string>

namespace clockvmc {

// Operator acting on the physical chain only, given by rows over physical indices.
struct PhysicalOperator {
  std::string name;
  std::function<OperatorRow(BasisIndex phys_index)> row;
};

// (1/N_S) sum_i sz_i
PhysicalOperator average_magnetization(int n_phys);
PhysicalOperator identity_operator();

}  // namespace clockvmc
