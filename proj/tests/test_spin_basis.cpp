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

#include <bit>
#include <stdexcept>

#include "clockvmc/spin_basis.hpp"

using namespace clockvmc;

TEST_CASE("gray_encode table and range") {
  CHECK(gray_encode(0, 2) == 0b00);
  CHECK(gray_encode(1, 2) == 0b01);
  CHECK(gray_encode(2, 2) == 0b11);
  CHECK(gray_encode(3, 2) == 0b10);
  CHECK_THROWS_AS(gray_encode(4, 2), std::domain_error);
  CHECK_THROWS_AS(gray_encode(1, 0), std::domain_error);
  CHECK(gray_encode(0, 0) == 0);
}

TEST_CASE("consecutive gray codes differ in one bit") {
  for (int bits = 1; bits <= 10; ++bits) {
    for (std::uint64_t t = 0; t + 1 < (1ULL << bits); ++t) {
      CHECK(std::popcount(gray_encode(t, bits) ^ gray_encode(t + 1, bits)) == 1);
    }
  }
}

TEST_CASE("gray_decode inverts encode") {
  CHECK(gray_decode(0b00, 2) == 0);
  CHECK(gray_decode(0b10, 2) == 3);
  for (int bits = 0; bits <= 12; ++bits) {
    for (std::uint64_t t = 0; t < (1ULL << bits); ++t) {
      REQUIRE(gray_decode(gray_encode(t, bits), bits) == t);
    }
  }
}

TEST_CASE("index convention") {
  const SpinLayout layout{5, 4};
  CHECK(config_to_index(SpinConfiguration::all_up(layout)) == 0);
  CHECK(config_to_index(SpinConfiguration(layout, std::vector<Spin>(9, Spin{-1}))) == 511);
  // position 0 is the most significant bit
  auto c = SpinConfiguration::all_up(layout);
  c.flip(0);
  CHECK(config_to_index(c) == 256);
}

TEST_CASE("config/index round trip is exhaustive identity") {
  for (int n = 1; n <= 12; ++n) {
    const SpinLayout layout{n - n / 3, n / 3};
    for (BasisIndex i = 0; i < layout.dimension(); ++i) {
      REQUIRE(config_to_index(index_to_config(i, layout)) == i);
    }
  }
}

TEST_CASE("configuration validation") {
  CHECK_THROWS_AS(SpinConfiguration(SpinLayout{2, 1}, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(SpinConfiguration(SpinLayout{2, 0}, {1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(index_to_config(8, SpinLayout{2, 1}), std::out_of_range);
}

TEST_CASE("clock_time_of") {
  SpinConfiguration c(SpinLayout{3, 2}, {1, -1, 1, 1, 1});
  CHECK(clock_time_of(c, 3).value == 0);
  SpinConfiguration d(SpinLayout{3, 2}, {-1, -1, 1, 1, -1});
  CHECK(clock_time_of(d, 3).value == 1);
  SpinConfiguration e(SpinLayout{1, 4}, {1, -1, 1, 1, 1});
  CHECK(clock_time_of(e, 15).value == 15);
  CHECK_FALSE(clock_time_of(e, 15).unused);
  // 1000 decodes past N = 9
  const auto unused = clock_time_of(e, 9);
  CHECK(unused.unused);
  CHECK(unused.value == 15);
}

TEST_CASE("clock spin count") {
  CHECK(clock_spins_for(0) == 0);
  CHECK(clock_spins_for(1) == 1);
  CHECK(clock_spins_for(2) == 2);
  CHECK(clock_spins_for(3) == 2);
  CHECK(clock_spins_for(4) == 3);
  CHECK(clock_spins_for(15) == 4);
  CHECK(clock_spins_for(16) == 5);
}
