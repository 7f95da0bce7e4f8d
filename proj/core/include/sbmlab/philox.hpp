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

#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A draw is a
// pure function of (key, counter), so any replica, step or cell can be
// regenerated independently of execution order.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace sbm {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

namespace detail {

inline void mulhilo32(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                      std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace detail

inline PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    detail::mulhilo32(kM0, ctr[0], hi0, lo0);
    detail::mulhilo32(kM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

// Uniform double in (0, 1] built from 53 random bits.
inline double unit_interval(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits =
      ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

// Uniform double in (0, 1] from 32 random bits; for coin flips only.
inline double unit_interval32(std::uint32_t w) noexcept {
  return (static_cast<double>(w) + 1.0) * 0x1.0p-32;
}

// Two independent standard normals from one Philox block.
inline std::pair<double, double> box_muller(const PhiloxCounter& block) noexcept {
  const double u1 = unit_interval(block[0], block[1]);
  const double u2 = unit_interval(block[2], block[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

inline PhiloxKey key_from_seed(std::uint64_t seed) noexcept {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

// Sequential draws from one (seed, replica, domain) stream. Word 0-1 of the
// counter hold a 64-bit block index, word 2 the replica, word 3 the domain
// tag, so streams with distinct (replica, domain) never share a counter.
class CounterEngine {
 public:
  CounterEngine(std::uint64_t seed, std::uint32_t replica, std::uint32_t domain) noexcept
      : key_(key_from_seed(seed)), replica_(replica), domain_(domain) {}

  std::uint32_t next_u32() noexcept {
    if (used_ == 4) refill();
    return block_[used_++];
  }

  // Uniform in (0, 1].
  double uniform() noexcept {
    const std::uint32_t hi = next_u32();
    const std::uint32_t lo = next_u32();
    return unit_interval(hi, lo);
  }

  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

  bool coin() noexcept { return (next_u32() & 1u) != 0u; }

  std::uint64_t blocks_used() const noexcept { return block_index_; }

 private:
  void refill() noexcept {
    block_ = philox4x32_10({static_cast<std::uint32_t>(block_index_),
                            static_cast<std::uint32_t>(block_index_ >> 32), replica_, domain_},
                           key_);
    ++block_index_;
    used_ = 0;
  }

  PhiloxKey key_;
  std::uint32_t replica_;
  std::uint32_t domain_;
  std::uint64_t block_index_ = 0;
  PhiloxCounter block_{};
  int used_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sbm
