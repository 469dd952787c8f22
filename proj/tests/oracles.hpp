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

// Independent reference constructions used only by the tests. Nothing here
// calls into the row-based Hamiltonian or the eigendecomposition propagator.

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;

inline MatrixXcd pauli_x() {
  MatrixXcd m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

// Basis |0> = spin up (+1), |1> = spin down, so sz = diag(1, -1).
inline MatrixXcd pauli_z() {
  MatrixXcd m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// Operator acting as `op` on site `site` of an n-site chain, site 0 leftmost
// (most significant) in the Kronecker product.
inline MatrixXcd site_operator(const MatrixXcd& op, int site, int n) {
  MatrixXcd result = MatrixXcd::Identity(1, 1);
  for (int i = 0; i < n; ++i) {
    const MatrixXcd factor = (i == site) ? op : MatrixXcd::Identity(2, 2);
    result = Eigen::kroneckerProduct(result, factor).eval();
  }
  return result;
}

inline MatrixXcd tfim_kron(int n, double j, double h) {
  const auto dim = Eigen::Index{1} << n;
  MatrixXcd m = MatrixXcd::Zero(dim, dim);
  for (int i = 0; i + 1 < n; ++i) {
    m += j * site_operator(pauli_z(), i, n) * site_operator(pauli_z(), i + 1, n);
  }
  for (int i = 0; i < n; ++i) m += h * site_operator(pauli_x(), i, n);
  return m;
}

// exp(-i H dt) through Pade scaling-and-squaring.
inline MatrixXcd propagator_pade(int n, double j, double h, double dt) {
  const MatrixXcd a = Complex(0.0, -dt) * tfim_kron(n, j, h);
  return a.exp();
}

inline std::uint64_t gray(std::uint64_t t) { return t ^ (t >> 1); }

// Clock Hamiltonian assembled from Kronecker products with the clock register
// as the least significant factor.
inline MatrixXcd clock_hamiltonian_kron(int n_phys, int n_clock, double j, double h,
                                        double total_time) {
  const std::uint64_t n_steps = (std::uint64_t{1} << n_clock) - 1;
  const auto dp = Eigen::Index{1} << n_phys;
  const auto dc = Eigen::Index{1} << n_clock;
  const double dt = n_steps == 0 ? 0.0 : total_time / static_cast<double>(n_steps);
  const MatrixXcd u = propagator_pade(n_phys, j, h, dt);
  auto ket_bra = [&](std::uint64_t a, std::uint64_t b) {
    MatrixXcd m = MatrixXcd::Zero(dc, dc);
    m(static_cast<Eigen::Index>(gray(a)), static_cast<Eigen::Index>(gray(b))) = 1.0;
    return m;
  };
  MatrixXcd h0 = MatrixXcd::Zero(dp, dp);
  for (int i = 0; i < n_phys; ++i) {
    h0 += 0.5 * (MatrixXcd::Identity(dp, dp) - site_operator(pauli_z(), i, n_phys));
  }
  MatrixXcd total = Eigen::kroneckerProduct(h0, ket_bra(0, 0));
  const MatrixXcd id = MatrixXcd::Identity(dp, dp);
  for (std::uint64_t t = 0; t < n_steps; ++t) {
    total += 0.5 * Eigen::kroneckerProduct(id, ket_bra(t, t) + ket_bra(t + 1, t + 1));
    const MatrixXcd hop = Eigen::kroneckerProduct(u, ket_bra(t + 1, t));
    total -= 0.5 * (hop + hop.adjoint());
  }
  return total;
}

// psi(t) = U^t psi(0) by repeated multiplication with the Pade propagator.
inline std::vector<Eigen::VectorXcd> stepwise_evolution(int n_phys, double j, double h,
                                                        double dt, std::uint64_t steps) {
  const MatrixXcd u = propagator_pade(n_phys, j, h, dt);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(Eigen::Index{1} << n_phys);
  psi(0) = 1.0;
  std::vector<Eigen::VectorXcd> out{psi};
  for (std::uint64_t t = 0; t < steps; ++t) {
    psi = u * psi;
    out.push_back(psi);
  }
  return out;
}

}  // namespace oracle
