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

#include "clockvmc/spin_basis.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace clockvmc {

SpinConfiguration::SpinConfiguration(SpinLayout layout, std::vector<Spin> spins)
    : layout_(layout), spins_(std::move(spins)) {
  if (layout_.n_phys < 0 || layout_.n_clock < 0) {
    throw std::invalid_argument("spin layout with negative size");
  }
  if (static_cast<int>(spins_.size()) != layout_.size()) {
    throw std::invalid_argument("configuration length " +
                                std::to_string(spins_.size()) +
                                " does not match layout size " +
                                std::to_string(layout_.size()));
  }
  for (Spin s : spins_) {
    if (s != 1 && s != -1) {
      throw std::invalid_argument("spin values must be +1 or -1");
    }
  }
}

SpinConfiguration SpinConfiguration::all_up(SpinLayout layout) {
  return SpinConfiguration(layout, std::vector<Spin>(layout.size(), Spin{1}));
}

std::uint64_t gray_encode(std::uint64_t t, int n_bits) {
  if (n_bits < 0 || n_bits > 63 || t >= (std::uint64_t{1} << n_bits)) {
    throw std::domain_error("gray_encode: t=" + std::to_string(t) +
                            " out of range for " + std::to_string(n_bits) +
                            " bits");
  }
  return t ^ (t >> 1);
}

std::uint64_t gray_decode(std::uint64_t bits, int n_bits) {
  std::uint64_t t = 0;
  for (int shift = n_bits - 1; shift >= 0; --shift) {
    const std::uint64_t prev = (t & 1U);
    const std::uint64_t bit = (bits >> shift) & 1U;
    t = (t << 1) | (prev ^ bit);
  }
  return t;
}

BasisIndex spins_to_index(std::span<const Spin> spins) {
  BasisIndex index = 0;
  for (Spin s : spins) {
    index = (index << 1) | static_cast<BasisIndex>(s < 0);
  }
  return index;
}

void index_to_spins(BasisIndex index, std::span<Spin> out) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    out[n - 1 - i] = ((index >> i) & 1U) ? Spin{-1} : Spin{1};
  }
}

std::vector<Spin> index_to_spins(BasisIndex index, int n_spins) {
  std::vector<Spin> spins(n_spins);
  index_to_spins(index, spins);
  return spins;
}

BasisIndex config_to_index(const SpinConfiguration& config) {
  return spins_to_index(config.spins());
}

SpinConfiguration index_to_config(BasisIndex index, SpinLayout layout) {
  if (index >= layout.dimension()) {
    throw std::out_of_range("basis index out of range");
  }
  return SpinConfiguration(layout, index_to_spins(index, layout.size()));
}

ClockTime clock_time_of_index(BasisIndex index, const SpinLayout& layout,
                              std::uint64_t n_steps) {
  const std::uint64_t t = gray_decode(clock_part(index, layout), layout.n_clock);
  return ClockTime{t, t > n_steps};
}

ClockTime clock_time_of(const SpinConfiguration& config, std::uint64_t n_steps) {
  const std::uint64_t word = spins_to_index(config.clock());
  const std::uint64_t t = gray_decode(word, config.layout().n_clock);
  return ClockTime{t, t > n_steps};
}

int clock_spins_for(std::uint64_t n_steps) {
  // ceil(log2(n_steps + 1)); zero steps need no clock.
  return n_steps == 0 ? 0 : static_cast<int>(std::bit_width(n_steps));
}

}  // namespace clockvmc
