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

// Independent reference values for the deterministic tests.

#pragma once

#include <cmath>
#include <functional>
#include <numbers>

#include "sbmlab/heat.hpp"

namespace oracle {

// Composite Simpson rule on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels % 2 != 0) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// int_0^t < (P_{s+r} f^(N)) (P_{s+r} g^(N)) > ds on the line, f = 1_[0,x], g = 1_[0,y],
// as a frequency integral. Re(f^ conj g^) is written through the indicator
// identity |1_[0,w]^(z)|^2 = 2 (1 - cos(w z)) / z^2.
inline double indicator_pair(double x, double y, double t, double r, double n) {
  auto spectral = [&](double z) {
    if (z == 0.0) return x * y;
    const double fx = sbm::indicator_fourier_sq(x, 0.0, z);
    const double fy = sbm::indicator_fourier_sq(y, 0.0, z);
    const double fd = sbm::indicator_fourier_sq(x - y, 0.0, z);
    return 0.5 * (fx + fy - fd);
  };
  auto weight = [&](double z) {
    const double u = z * z / (n * n);
    if (u == 0.0) return t;
    return std::exp(-r * u) * (-std::expm1(-t * u)) / u;
  };
  auto integrand = [&](double z) { return spectral(z) * weight(z); };
  // Integrand oscillates with period 2 pi / max(x, y); resolve it finely and
  // cut off far beyond the N-scale, where the weight is ~ N^2 / z^2 and the
  // spectral factor averages to 1.
  const double cut = 400.0 * std::max(n, 1.0) + 2000.0;
  const int panels = static_cast<int>(cut / 0.01);
  double body = simpson(integrand, 0.0, cut, panels);
  double tail = r == 0.0 ? n * n / (3.0 * cut * cut * cut) : 0.0;
  return (body + tail) / std::numbers::pi;
}

// Normal CDF based closed form of P_s 1_[a,b] on the line.
inline double heat_indicator(double s, double a, double b, double y) {
  if (s == 0.0) return (y >= a && y < b) ? 1.0 : 0.0;
  const double q = std::sqrt(2.0 * s);
  return 0.5 * (std::erf((b - y) / q) - std::erf((a - y) / q));
}

}  // namespace oracle
