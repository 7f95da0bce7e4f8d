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

#include "sbmlab/duhamel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sbmlab/error.hpp"

namespace sbm {

namespace {

double sup_abs(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

double cell_sum(std::span<const double> v, double dx) {
  double s = 0.0;
  for (double x : v) s += x;
  return s * dx;
}

double cell_square_sum(std::span<const double> v, double dx) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s * dx;
}

}  // namespace

VSolution solve_log_laplace(const SampledFunction& f, double t, const DuhamelOptions& options) {
  if (!f.admissible()) throw InvalidArgument("log-Laplace solve needs a nonnegative bounded f");
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("horizon must be finite and >= 0");
  if (options.snapshots < 2) throw InvalidArgument("at least two snapshots (s = 0 and s = t)");

  const Torus& space = f.space();
  const std::size_t n = space.cells;
  const double dx = space.dx;

  VSolution sol(space);
  sol.horizon_ = t;

  double step_request = options.time_step > 0.0 ? options.time_step : 0.25 * dx * dx;
  const std::size_t steps =
      t == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(t / step_request * (1.0 - 1e-12)));
  const double dt = steps == 0 ? 0.0 : t / static_cast<double>(steps);
  sol.diagnostics_.steps = steps;
  sol.diagnostics_.step = dt;

  const std::size_t slices = std::min(options.snapshots, steps + 1);
  std::vector<std::size_t> store_at;
  for (std::size_t i = 0; i < slices; ++i) {
    store_at.push_back(slices == 1 ? 0 : (i * steps + (slices - 1) / 2) / (slices - 1));
  }
  store_at.back() = steps;
  std::size_t next_store = 0;
  auto store = [&](std::size_t step_index, std::vector<double> values) {
    while (next_store < store_at.size() && store_at[next_store] == step_index) {
      sol.times_.push_back(static_cast<double>(step_index) * dt);
      sol.fields_.emplace_back(space, values);
      ++next_store;
    }
  };

  std::vector<double> v(f.values().begin(), f.values().end());
  sol.mass_.push_back(f.mass());
  sol.square_mass_.push_back(cell_square_sum(v, dx));
  store(0, v);
  if (steps == 0) return sol;

  const auto plan = fourier_transform(n);
  const std::size_t m = plan->spectrum_size();
  const auto xi = lattice_frequencies(space);
  std::vector<double> decay(m);
  for (std::size_t k = 0; k < m; ++k) decay[k] = std::exp(-0.5 * dt * xi[k] * xi[k]);

  std::vector<Complex> v_hat(m), sq_hat(m), p_v_hat(m), p_sq_hat(m), q_hat(m, Complex{});
  std::vector<double> p_v(n), p_sq(n), w(n), w_next(n), sq(n);

  plan->forward(v, v_hat);
  for (std::size_t j = 0; j < n; ++j) sq[j] = v[j] * v[j];
  plan->forward(sq, sq_hat);

  const double tol = options.corrector_tolerance;
  double square_integral = 0.0;
  for (std::size_t step = 1; step <= steps; ++step) {
    for (std::size_t k = 0; k < m; ++k) {
      p_v_hat[k] = v_hat[k] * decay[k];
      p_sq_hat[k] = sq_hat[k] * decay[k];
    }
    plan->inverse(p_v_hat, p_v);
    plan->inverse(p_sq_hat, p_sq);

    // The clamp only undoes an overshooting sink. Where the heat flow itself
    // is negative (ringing of discontinuous data in the first few steps)
    // the value is left alone so the discrete integral equation stays exact.
    for (std::size_t j = 0; j < n; ++j) {
      const double pred = p_v[j] - 0.5 * dt * p_sq[j];
      w[j] = (pred < 0.0 && p_v[j] >= 0.0) ? 0.0 : pred;
    }

    const double scale = 1.0 + sup_abs(p_v);
    double previous_delta = 0.0;
    int growth = 0;
    int iterations = 0;
    for (;;) {
      ++iterations;
      double delta = 0.0;
      std::size_t clamps = 0;
      for (std::size_t j = 0; j < n; ++j) {
        double next = p_v[j] - 0.25 * dt * (p_sq[j] + w[j] * w[j]);
        if (next < 0.0 && p_v[j] >= 0.0) {
          next = 0.0;
          ++clamps;
        }
        delta = std::max(delta, std::abs(next - w[j]));
        w_next[j] = next;
      }
      w.swap(w_next);
      if (!std::isfinite(delta)) {
        std::ostringstream msg;
        msg << "log-Laplace corrector produced non-finite values at step " << step;
        throw NumericalError(msg.str());
      }
      if (delta <= tol * scale) {
        sol.diagnostics_.clamp_events += clamps;
        break;
      }
      growth = (iterations > 1 && delta > previous_delta) ? growth + 1 : 0;
      if (growth >= 3 || iterations >= options.max_corrector_iterations) {
        std::ostringstream msg;
        msg << "log-Laplace corrector diverged at step " << step << " (s = " << step * dt
            << "): update " << delta << " after " << iterations << " passes, sup P V = "
            << scale - 1.0;
        throw NumericalError(msg.str());
      }
      previous_delta = delta;
    }
    sol.diagnostics_.max_picard_iterations = std::max(sol.diagnostics_.max_picard_iterations, iterations);
    sol.diagnostics_.total_picard_iterations += iterations;

    v.swap(w);
    for (std::size_t j = 0; j < n; ++j) sq[j] = v[j] * v[j];
    plan->forward(v, v_hat);
    plan->forward(sq, sq_hat);
    // Q_n = P_dt Q_{n-1} + (dt/2)(P_dt V_{n-1}^2 + V_n^2)
    for (std::size_t k = 0; k < m; ++k) {
      q_hat[k] = q_hat[k] * decay[k] + 0.5 * dt * (p_sq_hat[k] + sq_hat[k]);
    }

    sol.mass_.push_back(cell_sum(v, dx));
    sol.square_mass_.push_back(cell_square_sum(v, dx));
    square_integral += 0.5 * dt * (sol.square_mass_[step - 1] + sol.square_mass_[step]);
    store(step, v);
  }
  sol.square_integral_ = square_integral;

  // Residual of the integral equation: P_t f - Q_t / 2 against V_t.
  std::vector<Complex> rhs_hat(f.fourier());
  apply_heat_multiplier(rhs_hat, xi, t);
  for (std::size_t k = 0; k < m; ++k) rhs_hat[k] = rhs_hat[k] / dx - 0.5 * q_hat[k];
  std::vector<double> rhs(n);
  plan->inverse(rhs_hat, rhs);
  double residual = 0.0;
  for (std::size_t j = 0; j < n; ++j) residual = std::max(residual, std::abs(v[j] - rhs[j]));
  sol.diagnostics_.residual = residual;

  const double limit = options.residual_limit * (1.0 + f.sup_norm());
  if (!(residual <= limit)) {
    std::ostringstream msg;
    msg << "log-Laplace residual " << residual << " exceeds " << limit << " after " << steps
        << " steps of " << dt;
    throw NumericalError(msg.str());
  }
  return sol;
}

double inner_identity_residual(const VSolution& solution) {
  const double initial = solution.mass_history().front();
  const double final_mass = solution.final().mass();
  return std::abs(final_mass - (initial - 0.5 * solution.square_integral()));
}

double inner_identity_residual(const SampledFunction& f, double t, const DuhamelOptions& options) {
  return inner_identity_residual(solve_log_laplace(f, t, options));
}

double comparison_violation(const VSolution& solution, const SampledFunction& f) {
  double worst = 0.0;
  for (std::size_t i = 0; i < solution.fields().size(); ++i) {
    const auto& v = solution.fields()[i];
    const auto bound = apply_semigroup(f, solution.times()[i]);
    for (std::size_t j = 0; j < v.space().cells; ++j) {
      worst = std::max(worst, -v[j]);
      worst = std::max(worst, v[j] - bound[j]);
    }
  }
  return worst;
}

void FddSpec::validate() const {
  if (times.empty()) throw InvalidArgument("FDD spec needs at least one time");
  if (times.size() != functions.size()) throw InvalidArgument("one function per time required");
  if (!(n_scale > 0.0)) throw InvalidArgument("scale N must be positive");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] > 0.0)) throw InvalidArgument("FDD times must be positive");
    if (k > 0 && !(times[k] < times[k - 1])) {
      throw InvalidArgument("FDD times must be strictly decreasing: t_1 > t_2 > ... > t_m");
    }
    if (!functions[k].admissible()) throw InvalidArgument("FDD functions must be admissible");
  }
}

ExponentReport iterated_exponent(const FddSpec& spec, const DuhamelOptions& options) {
  spec.validate();
  const std::size_t m = spec.times.size();
  ExponentReport report;

  std::vector<double> carry;  // V_{t_{k-1}-t_k}(F_{k-1}) on the target torus
  double total = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    SampledFunction scaled = scale_function(spec.functions[k], spec.n_scale, spec.target);
    report.scaled_masses.push_back(scaled.mass());
    std::vector<double> fk(scaled.values().begin(), scaled.values().end());
    if (!carry.empty()) {
      for (std::size_t j = 0; j < fk.size(); ++j) fk[j] += carry[j];
    }
    SampledFunction big_f(spec.target, std::move(fk));
    report.sup_norms.push_back(big_f.sup_norm());
    report.masses.push_back(big_f.mass());

    const double duration = spec.times[k] - (k + 1 < m ? spec.times[k + 1] : 0.0);
    const VSolution sol = solve_log_laplace(big_f, duration, options);
    report.max_residual = std::max(report.max_residual, sol.diagnostics().residual);
    report.segment_integrals.push_back(sol.square_integral());
    total += sol.square_integral();
    carry.assign(sol.final().values().begin(), sol.final().values().end());
    for (double& c : carry) c = std::max(c, 0.0);  // roundoff below 0
    if (k + 1 == m) report.final_mass = sol.final().mass();
  }
  report.exponent = 0.5 * total;
  return report;
}

double gaussian_limit_exponent(std::span<const double> times,
                               std::span<const SampledFunction> functions) {
  if (times.size() != functions.size()) throw InvalidArgument("one function per time required");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (times[k] > times[k - 1]) throw InvalidArgument("times must be non-increasing");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    double bracket = functions[j].inner(functions[j]);
    for (std::size_t i = 0; i < j; ++i) bracket += 2.0 * functions[j].inner(functions[i]);
    total += times[j] * bracket;
  }
  return 0.5 * total;
}

DefectBounds limit_defect_bounds(const FddSpec& spec, const DuhamelOptions& options) {
  const ExponentReport report = iterated_exponent(spec, options);
  DefectBounds out;
  out.exponent = report.exponent;
  out.limit = gaussian_limit_exponent(spec.times, spec.functions);
  out.observed_defect = std::abs(out.exponent - out.limit);

  const std::size_t m = spec.times.size();
  const double root_n = std::sqrt(spec.n_scale);
  double mass_sum = 0.0, sup_sum = 0.0, allowed = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    mass_sum += spec.functions[k].mass();
    sup_sum += spec.functions[k].sup_norm();
    DefectBounds::Segment seg;
    seg.duration = spec.times[k] - (k + 1 < m ? spec.times[k + 1] : 0.0);
    const double d2 = seg.duration * seg.duration;
    const double d3 = d2 * seg.duration;
    const double fs = report.sup_norms[k];
    seg.quadratic_from_ledger = 0.5 * d2 * fs * fs * report.masses[k];
    seg.quadratic = 0.5 * d2 * mass_sum * sup_sum * sup_sum / root_n;
    seg.cubic_from_ledger = 0.125 * d3 * fs * fs * fs * report.masses[k];
    seg.cubic = 0.125 * d3 * mass_sum * sup_sum * sup_sum * sup_sum / spec.n_scale;
    allowed += seg.quadratic + seg.cubic;
    out.segments.push_back(seg);
  }
  out.bound = 0.5 * allowed;
  out.consistent = out.observed_defect <= out.factor * out.bound;
  return out;
}

}  // namespace sbm
