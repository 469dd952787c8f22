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
#include <span>
#include <vector>

namespace clockvmc {

using Spin = std::int8_t;
using BasisIndex = std::uint64_t;

// Physical spins occupy positions [0, n_phys), clock spins [n_phys, n_phys + n_clock).
struct SpinLayout {
  int n_phys = 0;
  int n_clock = 0;

  int size() const { return n_phys + n_clock; }
  BasisIndex dimension() const { return BasisIndex{1} << size(); }
  BasisIndex phys_dimension() const { return BasisIndex{1} << n_phys; }
  BasisIndex clock_dimension() const { return BasisIndex{1} << n_clock; }

  bool operator==(const SpinLayout&) const = default;
};

/// A basis state of the enlarged (physical + clock) chain. Every entry is +1 or -1.
class SpinConfiguration {
 public:
  SpinConfiguration(SpinLayout layout, std::vector<Spin> spins);

  static SpinConfiguration all_up(SpinLayout layout);

  const SpinLayout& layout() const { return layout_; }
  std::span<const Spin> spins() const { return spins_; }
  std::span<const Spin> physical() const {
    return std::span<const Spin>(spins_).first(layout_.n_phys);
  }
  std::span<const Spin> clock() const {
    return std::span<const Spin>(spins_).subspan(layout_.n_phys);
  }
  Spin operator[](std::size_t i) const { return spins_[i]; }
  std::size_t size() const { return spins_.size(); }

  void flip(std::size_t i) { spins_[i] = static_cast<Spin>(-spins_[i]); }

  bool operator==(const SpinConfiguration&) const = default;

 private:
  SpinLayout layout_;
  std::vector<Spin> spins_;
};

// Reflected-binary code. Throws std::domain_error unless t < 2^n_bits.
std::uint64_t gray_encode(std::uint64_t t, int n_bits);
std::uint64_t gray_decode(std::uint64_t bits, int n_bits);

// Basis ordering: spin +1 is bit 0, -1 is bit 1; position 0 is the most
// significant bit. The physical block therefore forms the high bits of the
// index and the clock word the low n_clock bits.
BasisIndex spins_to_index(std::span<const Spin> spins);
void index_to_spins(BasisIndex index, std::span<Spin> out);
std::vector<Spin> index_to_spins(BasisIndex index, int n_spins);

BasisIndex config_to_index(const SpinConfiguration& config);
SpinConfiguration index_to_config(BasisIndex index, SpinLayout layout);

inline BasisIndex phys_part(BasisIndex index, const SpinLayout& layout) {
  return index >> layout.n_clock;
}
inline BasisIndex clock_part(BasisIndex index, const SpinLayout& layout) {
  return index & (layout.clock_dimension() - 1);
}
inline BasisIndex join_index(BasisIndex phys, BasisIndex clock_word,
                             const SpinLayout& layout) {
  return (phys << layout.n_clock) | clock_word;
}

struct ClockTime {
  std::uint64_t value = 0;
  // Decoded time lies beyond the last step n_steps (only when n_steps + 1 < 2^n_clock).
  bool unused = false;
};

ClockTime clock_time_of(const SpinConfiguration& config, std::uint64_t n_steps);
ClockTime clock_time_of_index(BasisIndex index, const SpinLayout& layout,
                              std::uint64_t n_steps);

// Number of clock spins needed for n_steps + 1 clock states: ceil(log2(n_steps + 1)).
int clock_spins_for(std::uint64_t n_steps);

}  // namespace clockvmc
