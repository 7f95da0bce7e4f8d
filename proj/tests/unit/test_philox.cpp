// Copyright 2026 The sbmlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>

#include "sbmlab/philox.hpp"

namespace {

using sbm::PhiloxCounter;

TEST(Philox, KnownAnswerZero) {
  const PhiloxCounter out = sbm::philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerPi) {
  const PhiloxCounter out = sbm::philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                               {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, KnownAnswerOnes) {
  const PhiloxCounter out = sbm::philox4x32_10(
      {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, UniformStaysInUnitInterval) {
  EXPECT_GT(sbm::unit_interval(0, 0), 0.0);
  EXPECT_LE(sbm::unit_interval(0xffffffffu, 0xffffffffu), 1.0);
  EXPECT_GT(sbm::unit_interval32(0), 0.0);
  EXPECT_LE(sbm::unit_interval32(0xffffffffu), 1.0);
}

TEST(CounterEngine, StreamsAreReproducibleAndDistinct) {
  sbm::CounterEngine a(42, 3, 0), b(42, 3, 0), c(42, 4, 0), d(42, 3, 1);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u32();
    EXPECT_EQ(x, b.next_u32());
    (void)c;
    (void)d;
  }
  sbm::CounterEngine e(42, 3, 0);
  int same_c = 0, same_d = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = e.next_u32();
    same_c += x == c.next_u32();
    same_d += x == d.next_u32();
  }
  EXPECT_LT(same_c, 3);
  EXPECT_LT(same_d, 3);
}

TEST(CounterEngine, NormalMoments) {
  sbm::CounterEngine rng(7, 0, 0);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 3.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 3.0 * std::sqrt(2.0 / n));
}

TEST(CounterEngine, ExponentialMean) {
  sbm::CounterEngine rng(9, 1, 1);
  const int n = 200000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += rng.exponential(4.0);
  EXPECT_NEAR(s / n, 0.25, 3.0 * 0.25 / std::sqrt(n));
}

}  // namespace
