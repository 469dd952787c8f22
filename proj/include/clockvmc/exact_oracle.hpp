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

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "clockvmc/hamiltonian.hpp"
#include "clockvmc/models.hpp"
#include "clockvmc/spin_basis.hpp"

namespace clockvmc {

// Amplitudes over the full basis, indexed by spins_to_index.
struct StateVector {
  SpinLayout layout;
  Eigen::VectorXcd amplitudes;

  double norm() const { return amplitudes.norm(); }
  StateVector normalized() const;
};

struct GroundState {
  double energy = 0.0;
  double gap = 0.0;  // first excitation above the ground energy
  StateVector state;
};

/// Lowest eigenpair of the dense clock Hamiltonian. The largest-magnitude
/// amplitude is made real and positive. Throws NumericError if the ground
/// space is degenerate (gap below 1e-10).
GroundState ground_state(const ClockHamiltonian& h, BasisIndex cap = kDefaultDenseCap);

// (N+1)^{-1/2} sum_t U^t |initial> (x) |t>. `initial` has 2^n_phys entries.
StateVector build_history_state(const ClockHamiltonian& h,
                                const Eigen::VectorXcd& initial);
StateVector build_history_state(const ClockHamiltonian& h);  // all-up start

// rho over the first n_p physical spins.
Eigen::MatrixXcd reduced_density_matrix(const StateVector& state, int n_p);
// -ln Tr(rho_{n_p}^2) / n_phys
double renyi2_per_spin(const StateVector& state, int n_p);

// Gini coefficient of the basis probabilities; 0 uniform, 1 - 1/dim point mass.
double gini(const StateVector& state);

// Fraction of basis states (largest first) needed to reach `mass` probability.
double coverage_ratio(const StateVector& state, double mass = 0.99);

// 1 - |<a|b>|^2 / (<a|a><b|b>)
double infidelity(const StateVector& a, const StateVector& b);

// Model amplitudes over the whole basis, rescaled by exp(-max Re log Psi).
StateVector model_state(const Model& model, SpinLayout layout, bool normalize = true);

// sum_{s,s'} P(s) <s|H|s'> Psi(s')/Psi(s) by full enumeration.
double exact_variational_energy(const Model& model, const ClockHamiltonian& h);
double rayleigh_quotient(const StateVector& state, const Eigen::MatrixXcd& dense);

// Average physical sz after projecting on clock time t and renormalising.
double exact_time_magnetization(const StateVector& state, std::uint64_t t);

// (N+1) sum_s P(s) sum_s' <s|O (x) |t><t||s'> Psi(s')/Psi(s): the exact
// expectation of the sampled time-projected estimator.
double exact_time_observable(const StateVector& state, const ClockHamiltonian& h,
                             const PhysicalOperator& op, std::uint64_t t);

struct DiagnosticsReport {
  int n_phys = 0;
  int n_clock = 0;
  std::vector<double> renyi2_per_spin;  // index n_p - 1
  double gini = 0.0;
  double coverage_ratio = 0.0;
  double ground_energy = 0.0;
};

DiagnosticsReport diagnose_ground_state(const ClockHamiltonian& h,
                                        BasisIndex cap = kDefaultDenseCap);

// Header: n_phys, n_clock as uint32 LE; then (re, im) float64 LE pairs.
void save_state(const StateVector& state, const std::filesystem::path& path);
StateVector load_state(const std::filesystem::path& path);

}  // namespace clockvmc
