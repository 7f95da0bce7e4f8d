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

#include <cstddef>
#include <span>
#include <vector>

#include "sbmlab/heat.hpp"

namespace sbm {

struct DuhamelOptions {
  // Time step of the march; 0 selects dx^2 / 4 of the function's torus.
  // The heat flow is applied exactly in Fourier space, so any step is
  // stable; the step only controls the quadrature of the quadratic sink.
  double time_step = 0.0;
  // Number of stored time slices, evenly spaced on the step grid and
  // always including s = 0 and s = t.
  std::size_t snapshots = 2;
  // Fixed-point tolerance of the implicit trapezoid corrector, relative to
  // 1 + sup |P_dt V|.
  double corrector_tolerance = 1e-14;
  int max_corrector_iterations = 60;
  // The solve throws if the a posteriori residual of the integral
  // equation exceeds residual_limit * (1 + ||f||_inf).
  double residual_limit = 1e-8;
};

struct DuhamelDiagnostics {
  std::size_t steps = 0;
  double step = 0.0;
  int max_picard_iterations = 0;
  long total_picard_iterations = 0;
  std::size_t clamp_events = 0;
  // sup_x |V_t - (P_t f - 1/2 int_0^t P_{t-s} V_s^2 ds)|, trapezoid rule in s.
  double residual = 0.0;
};

// Solution of the log-Laplace equation dV/dt = V''/2 - V^2/2, V_0 = f.
class VSolution {
 public:
  const Torus& space() const noexcept { return space_; }
  double horizon() const noexcept { return horizon_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<SampledFunction>& fields() const noexcept { return fields_; }
  const SampledFunction& final() const noexcept { return fields_.back(); }
  const DuhamelDiagnostics& diagnostics() const noexcept { return diagnostics_; }

  // <lambda, V_s> and <lambda, V_s^2> at every step s = i * step.
  const std::vector<double>& mass_history() const noexcept { return mass_; }
  const std::vector<double>& square_mass_history() const noexcept { return square_mass_; }
  // int_0^t int V_s(y)^2 dy ds (trapezoid rule on the step grid).
  double square_integral() const noexcept { return square_integral_; }

 private:
  friend VSolution solve_log_laplace(const SampledFunction&, double, const DuhamelOptions&);
  explicit VSolution(const Torus& space) : space_(space) {}

  Torus space_;
  double horizon_ = 0.0;
  std::vector<double> times_;
  std::vector<SampledFunction> fields_;
  std::vector<double> mass_;
  std::vector<double> square_mass_;
  double square_integral_ = 0.0;
  DuhamelDiagnostics diagnostics_;
};

// Marches the mild form V_t = P_t f - 1/2 int_0^t P_{t-s} V_s^2 ds with the
// predictor V* = P V - (dt/2) P(V^2) followed by trapezoid corrector passes
// V <- P V - (dt/4)(P(V^2) + V*^2), iterated to the fixed point. A value is
// clamped at 0 when the sink overshoots a nonnegative heat-flow value. Throws InvalidArgument for inadmissible f, NumericalError on
// divergence or when the residual contract fails.
VSolution solve_log_laplace(const SampledFunction& f, double t, const DuhamelOptions& options = {});

// |<lambda, V_t f> - (<lambda, f> - 1/2 int_0^t int V_s^2)|.
double inner_identity_residual(const VSolution& solution);
double inner_identity_residual(const SampledFunction& f, double t,
                               const DuhamelOptions& options = {});

// Largest violation of 0 <= V_s <= P_s f over the stored slices (0 when the
// comparison holds exactly).
double comparison_violation(const VSolution& solution, const SampledFunction& f);

// Data of a multi-time Laplace transform: times t_1 > ... > t_m > 0 and
// unit-scale admissible functions f_k (weights folded in), evaluated at
// scale N on the N-scale torus `target`.
struct FddSpec {
  std::vector<double> times;
  std::vector<SampledFunction> functions;
  double n_scale = 1.0;
  Torus target;

  void validate() const;
};

struct ExponentReport {
  // 1/2 sum_k I_k, I_k = int_0^{t_k - t_{k+1}} int V_s(F_k)^2, t_{m+1} = 0.
  double exponent = 0.0;
  std::vector<double> segment_integrals;
  std::vector<double> sup_norms;       // ||F_k||_inf
  std::vector<double> masses;          // <lambda, F_k>
  std::vector<double> scaled_masses;   // <lambda, f_k^(N)>
  double final_mass = 0.0;             // <lambda, V_{t_m}(F_m)>
  double max_residual = 0.0;
};

// Builds F_1 = f_1^(N), F_k = f_k^(N) + V_{t_{k-1}-t_k}(F_{k-1}) and returns
// the centred log-Laplace exponent.
ExponentReport iterated_exponent(const FddSpec& spec, const DuhamelOptions& options = {});

// 1/2 sum_j t_j (<f_j, f_j> + 2 sum_{i<j} <f_j, f_i>), the log-Laplace
// exponent of the Gaussian limit. Times must be non-increasing; equal
// times are allowed and merge bilinearly.
double gaussian_limit_exponent(std::span<const double> times,
                               std::span<const SampledFunction> functions);

struct DefectBounds {
  struct Segment {
    double duration = 0.0;
    // (dt^2/2) ||F_k||^2 <lambda,F_k> and its N^{-1/2} majorant.
    double quadratic_from_ledger = 0.0;
    double quadratic = 0.0;
    // (dt^3/8) ||F_k||^3 <lambda,F_k> and its N^{-1} majorant.
    double cubic_from_ledger = 0.0;
    double cubic = 0.0;
  };
  std::vector<Segment> segments;
  double exponent = 0.0;
  double limit = 0.0;
  double observed_defect = 0.0;
  // 1/2 sum_k (quadratic + cubic): what the majorants allow on the exponent.
  double bound = 0.0;
  double factor = 10.0;
  bool consistent = false;
};

DefectBounds limit_defect_bounds(const FddSpec& spec, const DuhamelOptions& options = {});

}  // namespace sbm
