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

#include "sbmlab/checks.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

#include "sbmlab/duhamel.hpp"
#include "sbmlab/error.hpp"
#include "sbmlab/heat.hpp"
#include "sbmlab/parallel.hpp"
#include "sbmlab/philox.hpp"
#include "sbmlab/stats.hpp"

namespace sbm {

namespace {

constexpr double kNone = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) { return format_number(v); }

CheckResult begin(const std::string& name) {
  CheckResult r;
  r.name = name;
  if (const CheckInfo* info = find_check(name)) r.anchor = info->anchor;
  r.passed = true;
  return r;
}

CheckRow make_row(std::string test, std::vector<std::string> params, double estimate, double se,
                  double finite, double limit, bool passed) {
  return {std::move(test), std::move(params), estimate, se, finite, limit, passed};
}

CheckRow estimate_row(std::string test, std::vector<std::string> params, const McEstimate& e,
                      double limit, bool passed) {
  return make_row(std::move(test), std::move(params), e.mean, e.se, e.target, limit, passed);
}

std::vector<std::string> backends_of(const ExperimentConfig& cfg) {
  if (cfg.backend == "both") return {"fd", "particles"};
  return {cfg.backend};
}

std::vector<double> head(const std::vector<double>& v, std::size_t count) {
  return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min(count, v.size()))};
}

Torus check_torus(RunContext& ctx, const std::string& check) {
  return build_torus(ctx.param_number(check, "length"), ctx.param_number(check, "dx"));
}

// Smallest dx multiple >= 2 extent + 12 sqrt(t).
double auto_period(double extent, double t, double dx) {
  const double raw = 2.0 * extent + 12.0 * std::sqrt(t);
  return std::ceil(raw / dx - 1e-9) * dx;
}

// ---------------------------------------------------------------- deterministic

CheckResult run_plancherel_lemma(RunContext& ctx) {
  const std::string name = "plancherel_lemma";
  CheckResult res = begin(name);
  res.param_columns = {"n"};
  const double t = ctx.param_number(name, "t");
  const double x = ctx.param_number(name, "x");
  const Torus unit = check_torus(ctx, name);
  const auto f = SampledFunction::indicator(unit, 0.0, x);
  const double limit = t * f.inner(f);
  double previous = -std::numeric_limits<double>::infinity();
  for (double n : ctx.param_list(name, "n")) {
    const double v = plancherel_pair_integral(f, f, t, 0.0, 0.0, n);
    bool ok = v > previous;
    if (n >= 10.0) ok = ok && std::abs(v - limit) <= limit / n;
    previous = v;
    res.add(make_row("lemma_sequence", {num(n)}, v, kNone, v, limit, ok));
    res.metric("value_n" + num(n), v);
  }
  return res;
}

CheckResult run_heat_semigroup(RunContext& ctx) {
  const std::string name = "heat_semigroup";
  CheckResult res = begin(name);
  res.param_columns = {"case"};
  const Torus space = check_torus(ctx, name);
  const double s = ctx.param_number(name, "s");
  const double t = ctx.param_number(name, "t");
  const std::size_t count = ctx.param_count(name, "count");
  double worst_law = 0.0, worst_mass = 0.0, worst_trip = 0.0, worst_const = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const auto f = random_admissible(space, ctx.seed(), static_cast<std::uint32_t>(i));
    const auto two_step = apply_semigroup(apply_semigroup(f, s), t);
    const auto one_step = apply_semigroup(f, s + t);
    for (std::size_t j = 0; j < space.cells; ++j) {
      worst_law = std::max(worst_law, std::abs(two_step[j] - one_step[j]));
    }
    worst_mass = std::max(worst_mass, std::abs(one_step.mass() - f.mass()) / f.mass());
    const auto back = SampledFunction::from_fourier(space, f.fourier());
    for (std::size_t j = 0; j < space.cells; ++j) {
      worst_trip = std::max(worst_trip, std::abs(back[j] - f[j]) / f.sup_norm());
    }
  }
  const auto one = apply_semigroup(SampledFunction::constant(space, 1.0), t);
  for (std::size_t j = 0; j < space.cells; ++j) worst_const = std::max(worst_const, std::abs(one[j] - 1.0));
  // Riemann sums of p_t over the lattice for t = dx^2 and t = s.
  double kernel_mass = 0.0, kernel_err = -1.0;
  for (double tk : {space.dx * space.dx, s}) {
    double sum = 0.0;
    for (std::size_t j = 0; j < space.cells; ++j) {
      sum += heat_kernel(tk, space.node(j) - 0.5 * space.length) * space.dx;
    }
    if (std::abs(sum - 1.0) > kernel_err) {
      kernel_err = std::abs(sum - 1.0);
      kernel_mass = sum;
    }
  }
  res.add(make_row("semigroup_law_sup", {"P_t P_s = P_{s+t}"}, worst_law, kNone, 0.0, 0.0,
                   worst_law <= 1e-10));
  res.add(make_row("mass_conservation_rel", {"<1, P_t f> = <1, f>"}, worst_mass, kNone, 0.0, 0.0,
                   worst_mass <= 1e-10));
  res.add(make_row("fourier_round_trip_rel", {"f -> f^ -> f"}, worst_trip, kNone, 0.0, 0.0,
                   worst_trip <= 1e-12));
  res.add(make_row("constants_preserved", {"P_t 1 = 1"}, worst_const, kNone, 0.0, 0.0,
                   worst_const <= 1e-12));
  res.add(make_row("kernel_normalisation", {"sum p_t dx"}, kernel_mass, kNone, 1.0, 1.0,
                   std::abs(kernel_mass - 1.0) <= 1e-8));
  return res;
}

CheckResult run_log_laplace_constant(RunContext& ctx) {
  const std::string name = "log_laplace_constant";
  CheckResult res = begin(name);
  res.param_columns = {"c", "t"};
  const Torus space = check_torus(ctx, name);
  const double t = ctx.param_number(name, "t");
  const double tol = ctx.param_number(name, "tolerance");
  for (double c : ctx.param_list(name, "c")) {
    const auto sol = solve_log_laplace(SampledFunction::constant(space, c), t);
    const double exact = c / (1.0 + c * t / 2.0);
    double err = 0.0;
    for (std::size_t j = 0; j < space.cells; ++j) err = std::max(err, std::abs(sol.final()[j] - exact));
    res.add(make_row("closed_form_sup_error", {num(c), num(t)}, sol.final()[0], err, exact, exact,
                     err <= tol));
    res.metric("sup_error_c" + num(c), err);
  }
  return res;
}

CheckResult run_inner_identity(RunContext& ctx) {
  const std::string name = "inner_identity";
  CheckResult res = begin(name);
  res.param_columns = {"function", "t"};
  const Torus space = check_torus(ctx, name);
  const double t = ctx.param_number(name, "t");
  const double tol = ctx.param_number(name, "tolerance");
  const std::size_t count = ctx.param_count(name, "count");
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const auto f = random_admissible(space, ctx.seed(), static_cast<std::uint32_t>(1000 + i));
    const auto sol = solve_log_laplace(f, t);
    const double r = inner_identity_residual(sol);
    worst = std::max(worst, r / f.mass());
    const double rhs = f.mass() - 0.5 * sol.square_integral();
    res.add(make_row("mass_balance", {num(static_cast<double>(i)), num(t)}, sol.final().mass(), r,
                     rhs, kNone, r <= tol * f.mass()));
  }
  res.metric("worst_relative_residual", worst);
  return res;
}

CheckResult run_comparison_bounds(RunContext& ctx) {
  const std::string name = "comparison_bounds";
  CheckResult res = begin(name);
  res.param_columns = {"function", "t"};
  const Torus space = check_torus(ctx, name);
  const double t = ctx.param_number(name, "t");
  const std::size_t count = ctx.param_count(name, "count");
  for (std::size_t i = 0; i < count; ++i) {
    const auto f = random_admissible(space, ctx.seed(), static_cast<std::uint32_t>(2000 + i));
    const auto h = random_admissible(space, ctx.seed(), static_cast<std::uint32_t>(3000 + i));
    const auto g = f + h;
    const auto vf = solve_log_laplace(f, t);
    const auto vg = solve_log_laplace(g, t);
    const double bound = comparison_violation(vf, f);
    double monotone = 0.0;
    for (std::size_t j = 0; j < space.cells; ++j) {
      monotone = std::max(monotone, vf.final()[j] - vg.final()[j]);
    }
    const double tol = 1e-12 * (1.0 + g.sup_norm());
    res.add(make_row("bounds_0_le_V_le_Ptf", {num(static_cast<double>(i)), num(t)}, bound, kNone,
                     0.0, 0.0, bound <= tol));
    res.add(make_row("monotone_f_le_g", {num(static_cast<double>(i)), num(t)}, monotone, kNone, 0.0,
                     0.0, monotone <= tol));
  }
  return res;
}

CheckResult run_gaussian_exponent(RunContext& ctx) {
  const std::string name = "gaussian_exponent";
  CheckResult res = begin(name);
  res.param_columns = {"case"};
  const Torus unit = check_torus(ctx, name);
  const auto one = SampledFunction::indicator(unit, 0.0, 1.0);
  const auto half = SampledFunction::indicator(unit, 0.0, 0.5);
  const auto far = SampledFunction::indicator(unit, 2.0, 2.5);

  {
    const std::vector<double> times{0.7};
    const std::vector<SampledFunction> fs{half};
    const double v = gaussian_limit_exponent(times, fs);
    res.add(make_row("single_term", {"t=0.7 x=0.5"}, v, kNone, 0.5 * 0.7 * 0.5, 0.5 * 0.7 * 0.5,
                     std::abs(v - 0.175) <= 1e-12));
  }
  {
    const std::vector<double> times{1.0, 0.5};
    const std::vector<SampledFunction> fs{one, one};
    const double v = gaussian_limit_exponent(times, fs);
    res.add(make_row("two_times", {"t=(1,0.5)"}, v, kNone, 1.25, 1.25, std::abs(v - 1.25) <= 1e-12));
  }
  {
    const std::vector<double> times{1.0, 0.5};
    const std::vector<SampledFunction> fs{half, far};
    const double v = gaussian_limit_exponent(times, fs);
    const double want = 0.5 * (1.0 * 0.5 + 0.5 * 0.5);
    res.add(make_row("orthogonal_supports", {"cross terms vanish"}, v, kNone, want, want,
                     std::abs(v - want) <= 1e-12));
  }
  {
    const std::vector<double> split_t{1.0, 0.5, 0.5};
    const std::vector<SampledFunction> split_f{one, half, far};
    const std::vector<double> merged_t{1.0, 0.5};
    const std::vector<SampledFunction> merged_f{one, half + far};
    const double a = gaussian_limit_exponent(split_t, split_f);
    const double b = gaussian_limit_exponent(merged_t, merged_f);
    res.add(make_row("merge_equal_times", {"(t,f1),(t,f2) = (t,f1+f2)"}, a, kNone, b, b,
                     std::abs(a - b) <= 1e-12));
  }
  return res;
}

struct FddDefectRun {
  double n;
  DefectBounds bounds;
};

std::vector<FddDefectRun> defect_runs(RunContext& ctx, const std::string& name) {
  const auto times = ctx.param_list(name, "times");
  const auto xs = ctx.param_list(name, "xs");
  const auto thetas = ctx.param_list(name, "thetas");
  if (times.size() != xs.size() || times.size() != thetas.size()) {
    throw InvalidArgument(name + ": times, xs and thetas must have equal length");
  }
  const double dx = ctx.param_number(name, "dx");
  const double x_max = *std::max_element(xs.begin(), xs.end());
  std::vector<FddDefectRun> out;
  for (double n : ctx.param_list(name, "n")) {
    FddSpec spec;
    spec.n_scale = n;
    spec.target = build_torus(auto_period(x_max * n, times.front(), dx), dx);
    const Torus unit = spec.target.scaled(1.0 / n);
    spec.times = times;
    for (std::size_t k = 0; k < times.size(); ++k) {
      spec.functions.push_back(SampledFunction::indicator(unit, 0.0, xs[k]).scaled(thetas[k]));
    }
    out.push_back({n, limit_defect_bounds(spec)});
  }
  return out;
}

CheckResult run_exponent_convergence(RunContext& ctx) {
  const std::string name = "exponent_convergence";
  CheckResult res = begin(name);
  res.param_columns = {"n"};
  const auto runs = defect_runs(ctx, name);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& b = runs[i].bounds;
    bool ok = b.observed_defect < previous;
    if (i + 1 == runs.size()) ok = ok && b.consistent;
    previous = b.observed_defect;
    res.add(make_row("iterated_exponent", {num(runs[i].n)}, b.exponent, kNone, b.exponent, b.limit,
                     ok));
    res.metric("defect_n" + num(runs[i].n), b.observed_defect);
    res.metric("majorant_n" + num(runs[i].n), b.bound);
  }
  return res;
}

CheckResult run_limit_defect(RunContext& ctx) {
  const std::string name = "limit_defect";
  CheckResult res = begin(name);
  res.param_columns = {"n", "quantity"};
  const auto runs = defect_runs(ctx, name);
  const double shrink = ctx.param_number(name, "shrink");
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& b = runs[i].bounds;
    res.add(make_row("defect_within_10x_majorant", {num(runs[i].n), "defect"}, b.observed_defect,
                     kNone, b.factor * b.bound, 0.0, b.consistent));
    if (i > 0 && std::abs(runs[i].n / runs[i - 1].n - 2.0) < 1e-12) {
      const double ratio = runs[i - 1].bounds.observed_defect / b.observed_defect;
      res.add(make_row("defect_shrink_on_doubling", {num(runs[i].n), "ratio"}, ratio, kNone, shrink,
                       std::sqrt(2.0), ratio >= shrink));
    }
  }
  return res;
}

// ---------------------------------------------------------------- Monte Carlo

CheckResult run_moment_first(RunContext& ctx) {
  const std::string name = "moment_first";
  CheckResult res = begin(name);
  res.param_columns = {"backend", "t"};
  const double t = ctx.param_number(name, "t");
  for (const auto& backend : backends_of(ctx.config())) {
    const std::size_t count = ctx.param_count(name, "replicas");
    const auto& ens = ctx.moments(backend, count);
    const auto f = SampledFunction::indicator(ens.lattice.space(), 0.0, 1.0);
    const auto functional = estimate_mean(ens.functional_at(t, count), f.mass());
    res.add(estimate_row("mean_functional", {backend, num(t)}, functional, f.mass(),
                         functional.passed()));
    const auto density = estimate_mean(ens.density_at(t, count), 1.0);
    res.add(estimate_row("mean_density_cell0", {backend, num(t)}, density, 1.0, density.passed()));

    // Martingale proxy: the mean stays constant in time.
    const auto times = ctx.param_list(name, "martingale_times");
    std::vector<McEstimate> path;
    for (double s : times) path.push_back(estimate_mean(ens.functional_at(s, count), f.mass()));
    for (std::size_t i = 0; i < times.size(); ++i) {
      for (std::size_t j = i + 1; j < times.size(); ++j) {
        const double gap = std::abs(path[i].mean - path[j].mean);
        const double se = std::hypot(path[i].se, path[j].se);
        res.add(make_row("martingale_" + num(times[i]) + "_vs_" + num(times[j]),
                         {backend, num(times[j])}, path[i].mean - path[j].mean, se, 0.0, 0.0,
                         gap <= 3.0 * se));
      }
    }
    res.metric("mean_" + backend, functional.mean);
    res.metric("se_" + backend, functional.se);
  }
  return res;
}

CheckResult run_moment_second(RunContext& ctx) {
  const std::string name = "moment_second";
  CheckResult res = begin(name);
  res.param_columns = {"backend", "t"};
  const double t = ctx.param_number(name, "t");
  const double slack = ctx.param_number(name, "slack");
  for (const auto& backend : backends_of(ctx.config())) {
    const std::size_t count = ctx.param_count(name, "replicas");
    const auto& ens = ctx.moments(backend, count);
    const auto f = SampledFunction::indicator(ens.lattice.space(), 0.0, 1.0);
    const double target = second_moment_target(f, t);
    auto sq = ens.functional_at(t, count);
    for (double& v : sq) v *= v;
    const auto e = estimate_mean(sq, target, slack * target);
    res.add(estimate_row("second_moment", {backend, num(t)}, e, f.inner(f) * t + f.mass() * f.mass(),
                         e.passed()));
    res.metric("second_moment_" + backend, e.mean);
    res.metric("target", target);
  }
  return res;
}

CheckResult run_backend_agreement(RunContext& ctx) {
  const std::string name = "backend_agreement";
  CheckResult res = begin(name);
  res.param_columns = {"t", "mass_resolution"};
  const double t = ctx.param_number(name, "t");
  const std::size_t count = ctx.param_count(name, "replicas");
  const auto& fd = ctx.moments("fd", count);
  const auto& pa = ctx.moments("particles", count);
  const auto f = SampledFunction::indicator(fd.lattice.space(), 0.0, 1.0);
  const auto a = estimate_mean(fd.functional_at(t, count), f.mass());
  const auto b = estimate_mean(pa.functional_at(t, count), f.mass());
  const double se = std::hypot(a.se, b.se);
  const std::string m = num(ctx.config().mass_resolution);
  res.add(make_row("fd_minus_particles", {num(t), m}, a.mean - b.mean, se, 0.0, 0.0,
                   std::abs(a.mean - b.mean) <= 3.0 * se));
  res.add(estimate_row("particle_mean_functional", {num(t), m}, b, f.mass(), b.passed()));
  const auto mass = estimate_mean(head(pa.total_mass, count), pa.lattice.length());
  res.add(estimate_row("particle_total_mass", {num(pa.lattice.observation_times().back()), m}, mass,
                       pa.lattice.length(), mass.passed()));
  res.metric("fd_mean", a.mean);
  res.metric("particle_mean", b.mean);
  return res;
}

CheckResult run_laplace_functional(RunContext& ctx) {
  const std::string name = "laplace_functional";
  CheckResult res = begin(name);
  res.param_columns = {"backend", "t", "theta"};
  const double slack = ctx.param_number(name, "slack");
  for (const auto& backend : backends_of(ctx.config())) {
    const std::size_t count = ctx.param_count(name, "replicas");
    const auto& ens = ctx.moments(backend, count);
    const auto f = SampledFunction::indicator(ens.lattice.space(), 0.0, 1.0);
    for (double t : ctx.param_list(name, "times")) {
      const auto x = ens.functional_at(t, count);
      for (double theta : ctx.param_list(name, "thetas")) {
        const double target = std::exp(-solve_log_laplace(f.scaled(theta), t).final().mass());
        std::vector<double> e(x.size());
        for (std::size_t r = 0; r < x.size(); ++r) e[r] = std::exp(-theta * x[r]);
        const auto est = estimate_mean(e, target, slack * target);
        res.add(estimate_row("laplace_transform", {backend, num(t), num(theta)}, est, target,
                             est.passed()));
      }
    }
  }
  return res;
}

std::vector<double> sheet_scales(RunContext& ctx) { return ctx.config().n_values; }

CheckResult run_covariance_sheet(RunContext& ctx) {
  const std::string name = "covariance_sheet";
  CheckResult res = begin(name);
  res.param_columns = {"n", "t", "x", "s", "y"};
  const auto times = ctx.param_list(name, "times");
  const auto xs = ctx.param_list(name, "xs");
  const double tol = ctx.param_number(name, "limit_tolerance");
  for (double n : sheet_scales(ctx)) {
    const auto& samples = ctx.sheets(n);
    const SheetOracle oracle(ctx.sheet_lattice(n).space(), n);
    const auto rep = covariance_check(samples, times, xs, oracle, tol);
    double worst_z = 0.0, worst_gap = 0.0;
    for (const auto& e : rep.entries) {
      res.add(estimate_row("covariance", {num(n), num(e.t), num(e.x), num(e.s), num(e.y)},
                           e.estimate, e.limit, e.passed));
      worst_z = std::max(worst_z, e.estimate.deviation() / e.estimate.se);
      worst_gap = std::max(worst_gap, std::abs(e.estimate.mean - e.limit));
    }
    res.metric("pairs_n" + num(n), static_cast<double>(rep.entries.size()));
    res.metric("se_failures_n" + num(n), static_cast<double>(rep.se_failures));
    res.metric("limit_failures_n" + num(n), static_cast<double>(rep.limit_failures));
    res.metric("max_z_n" + num(n), worst_z);
    res.metric("max_limit_gap_n" + num(n), worst_gap);
  }
  return res;
}

CheckResult run_marginal_normality(RunContext& ctx) {
  const std::string name = "marginal_normality";
  CheckResult res = begin(name);
  res.param_columns = {"n", "t", "x", "quantity"};
  for (double n : sheet_scales(ctx)) {
    const auto& samples = ctx.sheets(n);
    const SheetOracle oracle(ctx.sheet_lattice(n).space(), n);
    for (double t : ctx.param_list(name, "times")) {
      for (double x : ctx.param_list(name, "xs")) {
        const auto rep = normality_check(samples, t, x, oracle);
        if (rep.degenerate) {
          res.notes.push_back("point (" + num(t) + ", " + num(x) + "): " + rep.note);
          res.add(make_row("ks_statistic", {num(n), num(t), num(x), "degenerate, skipped"}, 0.0,
                           kNone, kNone, kNone, true));
          continue;
        }
        res.add(make_row("ks_statistic", {num(n), num(t), num(x), "D_R vs 1.63/sqrt(R)"},
                         rep.statistic, kNone, rep.critical, rep.critical, rep.passed));
        res.add(make_row("ks_p_value", {num(n), num(t), num(x), "asymptotic"}, rep.p_value, kNone,
                         0.01, 0.01, rep.p_value >= 0.01));
        res.metric("ks_n" + num(n) + "_t" + num(t) + "_x" + num(x), rep.statistic);
      }
    }
  }
  return res;
}

CheckResult run_fdd_laplace(RunContext& ctx) {
  const std::string name = "fdd_laplace";
  CheckResult res = begin(name);
  res.param_columns = {"n", "points"};
  const auto times = ctx.param_list(name, "times");
  const auto xs = ctx.param_list(name, "xs");
  const auto thetas = ctx.param_list(name, "thetas");
  if (times.size() != xs.size() || times.size() != thetas.size()) {
    throw InvalidArgument(name + ": times, xs and thetas must have equal length");
  }
  std::vector<FddPoint> points;
  std::string label;
  for (std::size_t k = 0; k < times.size(); ++k) {
    points.push_back({times[k], xs[k], thetas[k]});
    label += (k ? " " : "") + num(thetas[k]) + "*V(" + num(times[k]) + ";" + num(xs[k]) + ")";
  }
  for (double n : sheet_scales(ctx)) {
    const auto& samples = ctx.sheets(n);
    const auto targets = fdd_targets(points, n, ctx.sheet_lattice(n).space());
    const auto rep = fdd_laplace_check(samples, points, targets);
    res.add(estimate_row("laplace_transform", {num(n), label}, rep.estimate, rep.limit_target,
                         rep.passed));
    res.metric("finite_exponent_n" + num(n), targets.finite_exponent);
    res.metric("limit_exponent", targets.limit_exponent);
    res.metric("limit_gap_n" + num(n), rep.limit_gap);
  }
  return res;
}

CheckResult run_sheet_centering(RunContext& ctx) {
  const std::string name = "sheet_centering";
  CheckResult res = begin(name);
  res.param_columns = {"n", "t", "x"};
  for (double n : sheet_scales(ctx)) {
    const auto& samples = ctx.sheets(n);
    const SheetGrid& grid = samples.front().grid();
    for (double t : ctx.param_list(name, "times")) {
      for (double x : ctx.param_list(name, "xs")) {
        const std::size_t k = grid.time_index(t);
        const std::size_t l = grid.x_index(x);
        std::vector<double> v(samples.size());
        for (std::size_t r = 0; r < samples.size(); ++r) v[r] = samples[r](k, l);
        const auto e = estimate_mean(v, 0.0);
        const bool degenerate = t == 0.0 || x == 0.0;
        const bool ok = degenerate ? std::all_of(v.begin(), v.end(), [](double a) { return a == 0.0; })
                                   : e.passed();
        res.add(estimate_row("mean_zero", {num(n), num(t), num(x)}, e, 0.0, ok));
      }
    }
  }
  return res;
}

CheckResult run_holder_increments(RunContext& ctx) {
  const std::string name = "holder_increments";
  CheckResult res = begin(name);
  res.param_columns = {"n", "k", "direction"};
  HolderOptions opts;
  opts.margin = ctx.param_number(name, "margin");
  for (double n : sheet_scales(ctx)) {
    const auto& samples = ctx.sheets(n);
    for (double k : ctx.param_list(name, "orders")) {
      const auto rep = holder_check(samples, static_cast<int>(k), opts);
      res.add(make_row("loglog_slope", {num(n), num(k), "space"}, rep.spatial.slope, kNone,
                       rep.spatial.target, k / 2.0, rep.spatial.passed));
      res.add(make_row("loglog_slope", {num(n), num(k), "time"}, rep.temporal.slope, kNone,
                       rep.temporal.target, k / 2.0, rep.temporal.passed));
      res.metric("space_slope_n" + num(n) + "_k" + num(k), rep.spatial.slope);
      res.metric("time_slope_n" + num(n) + "_k" + num(k), rep.temporal.slope);
    }
  }
  return res;
}

CheckResult run_holder_rectangle(RunContext& ctx) {
  const std::string name = "holder_rectangle";
  CheckResult res = begin(name);
  res.param_columns = {"n", "k"};
  HolderOptions opts;
  opts.rectangle_floor = ctx.param_number(name, "floor");
  for (double n : sheet_scales(ctx)) {
    const auto& samples = ctx.sheets(n);
    const auto rep = holder_check(samples, 4, opts);
    res.add(make_row("rectangle_slope_lower_bound", {num(n), "4"}, rep.rectangle.slope, kNone,
                     opts.rectangle_floor, 1.25, rep.rectangle.passed));
    res.metric("rectangle_slope_n" + num(n), rep.rectangle.slope);
    for (std::size_t i = 0; i < rep.rectangle.lags.size(); ++i) {
      res.metric("rectangle_moment_area" + num(rep.rectangle.lags[i]), rep.rectangle.moments[i]);
    }
  }
  return res;
}

CheckResult run_moment_bound(RunContext& ctx) {
  const std::string name = "moment_bound";
  CheckResult res = begin(name);
  res.param_columns = {"dx", "quantity"};
  const double t = ctx.param_number(name, "t");
  const std::size_t count = ctx.param_count(name, "replicas");
  const double spread = ctx.param_number(name, "spread");
  std::vector<double> averages, clamps;
  for (double dx : ctx.param_list(name, "dxs")) {
    const double length = auto_period(1.0, t, dx);
    const Lattice lattice = build_lattice(length, dx, t, {t});
    std::vector<std::vector<double>> fourth(count);
    std::vector<double> clamp(count);
    parallel_for(
        0, count,
        [&](std::size_t r) {
          const auto path =
              simulate_fd(lattice, {ctx.seed(), static_cast<std::uint32_t>(r)}, FdOptions{});
          const auto u = path.field(0);
          fourth[r].resize(u.size());
          for (std::size_t j = 0; j < u.size(); ++j) fourth[r][j] = std::pow(u[j], 4);
          clamp[r] = path.clamp_fraction();
        },
        ctx.options().workers);
    double worst = 0.0, mean_all = 0.0, clamp_mean = 0.0;
    for (std::size_t j = 0; j < lattice.cells(); ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < count; ++r) s += fourth[r][j];
      s /= static_cast<double>(count);
      worst = std::max(worst, s);
      mean_all += s;
    }
    mean_all /= static_cast<double>(lattice.cells());
    for (double c : clamp) clamp_mean += c;
    clamp_mean /= static_cast<double>(count);
    averages.push_back(mean_all);
    clamps.push_back(clamp_mean);
    res.add(make_row("max_cell_fourth_moment", {num(dx), "max_j E u^4"}, worst, kNone, kNone, kNone,
                     std::isfinite(worst)));
    res.add(make_row("mean_cell_fourth_moment", {num(dx), "avg_j E u^4"}, mean_all, kNone, kNone,
                     kNone, std::isfinite(mean_all)));
    res.add(make_row("clamp_fraction", {num(dx), "clamped / updates"}, clamp_mean, kNone, kNone,
                     kNone, true));
  }
  const auto [lo, hi] = std::minmax_element(averages.begin(), averages.end());
  const double rel = (*hi - *lo) / *lo;
  res.add(make_row("fourth_moment_stability", {"all", "(max - min) / min"}, rel, kNone, spread,
                   kNone, rel <= spread));
  bool falling = true;
  for (std::size_t i = 1; i < clamps.size(); ++i) falling = falling && clamps[i] < clamps[i - 1];
  res.add(make_row("clamp_fraction_falls", {"all", "monotone in dx"}, clamps.back(), kNone, kNone,
                   kNone, falling));
  return res;
}

CheckResult run_statistical_calibration(RunContext& ctx) {
  const std::string name = "statistical_calibration";
  CheckResult res = begin(name);
  res.param_columns = {"test", "alpha"};
  const std::size_t trials = ctx.param_count(name, "trials");
  const std::size_t reps = ctx.param_count(name, "replicas");
  const SheetGrid grid = SheetGrid::uniform(16);
  const std::vector<double> sub{0.25, 0.5, 0.75, 1.0};
  const SheetOracle limit;
  std::size_t ks_reject = 0, cov_reject = 0, cov_total = 0, mean_reject = 0, mean_total = 0;
  std::size_t holder_fail = 0, rect_fail = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::vector<SheetSample> samples;
    samples.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      samples.push_back(synthetic_sheet(
          grid, {ctx.seed(), static_cast<std::uint32_t>(trial * reps + r)}));
    }
    if (!normality_check(samples, 1.0, 1.0, limit).passed) ++ks_reject;
    const auto cov = covariance_check(samples, sub, sub, limit);
    cov_reject += cov.se_failures;
    cov_total += cov.entries.size();
    for (double t : sub) {
      for (double x : sub) {
        std::vector<double> v(reps);
        for (std::size_t r = 0; r < reps; ++r) v[r] = samples[r].at(t, x);
        mean_reject += estimate_mean(v, 0.0).passed() ? 0 : 1;
        ++mean_total;
      }
    }
    for (int k : {2, 4}) {
      const auto h = holder_check(samples, k);
      if (!h.spatial.passed || !h.temporal.passed) ++holder_fail;
      if (k == 4 && !h.rectangle.passed) ++rect_fail;
    }
  }
  const double nt = static_cast<double>(trials);
  // Rejection rates against alpha + 3 binomial SEs over the trial count (the
  // per-point tests inside one trial are correlated, so trials is the honest
  // sample size).
  auto allowed = [&](double alpha) { return alpha + 3.0 * std::sqrt(alpha * (1.0 - alpha) / nt); };
  const double gauss3 = 2.0 * (1.0 - normal_cdf(3.0));
  const auto rate = [](std::size_t a, std::size_t b) {
    return static_cast<double>(a) / static_cast<double>(b);
  };
  res.add(make_row("ks_rejection_rate", {"ks_normal", "0.01"}, rate(ks_reject, trials), kNone,
                   allowed(0.01), 0.01, rate(ks_reject, trials) <= allowed(0.01)));
  res.add(make_row("covariance_rejection_rate", {"covariance_3se", num(gauss3)},
                   rate(cov_reject, cov_total), kNone, allowed(gauss3), gauss3,
                   rate(cov_reject, cov_total) <= allowed(gauss3)));
  res.add(make_row("mean_rejection_rate", {"mean_3se", num(gauss3)}, rate(mean_reject, mean_total),
                   kNone, allowed(gauss3), gauss3, rate(mean_reject, mean_total) <= allowed(gauss3)));
  res.add(make_row("holder_failure_rate", {"holder_margin", "0.01"},
                   rate(holder_fail, 2 * trials), kNone, allowed(0.01), 0.01,
                   rate(holder_fail, 2 * trials) <= allowed(0.01)));
  res.add(make_row("rectangle_failure_rate", {"rectangle_floor", "0.01"}, rate(rect_fail, trials),
                   kNone, allowed(0.01), 0.01, rate(rect_fail, trials) <= allowed(0.01)));
  return res;
}

CheckResult run_reproducibility(RunContext& ctx) {
  const std::string name = "reproducibility";
  CheckResult res = begin(name);
  res.param_columns = {"artifact"};
  const Lattice lattice = build_lattice(4.0, 0.1, 0.1, {0.05, 0.1});
  const std::uint64_t seed = ctx.seed();
  auto same_paths = [](const DensityPath& a, const DensityPath& b) {
    for (std::size_t i = 0; i < a.time_count(); ++i) {
      const auto x = a.field(i);
      const auto y = b.field(i);
      if (!std::equal(x.begin(), x.end(), y.begin(), y.end())) return false;
    }
    return true;
  };
  // Replicas computed in opposite orders and on different worker counts.
  std::vector<std::optional<DensityPath>> forward(4), backward(4);
  parallel_for(0, 4, [&](std::size_t r) {
    forward[r] = simulate_fd(lattice, {seed, static_cast<std::uint32_t>(r)});
  }, 1);
  parallel_for(0, 4, [&](std::size_t i) {
    const std::size_t r = 3 - i;
    backward[r] = simulate_fd(lattice, {seed, static_cast<std::uint32_t>(r)});
  }, 3);
  bool fd_ok = true;
  for (std::size_t r = 0; r < 4; ++r) fd_ok = fd_ok && same_paths(*forward[r], *backward[r]);
  res.add(make_row("fd_paths_bit_identical", {"DensityPath"}, fd_ok ? 1.0 : 0.0, kNone, 1.0, 1.0,
                   fd_ok));

  const auto p1 = simulate_particles(10.0, lattice, 0.1, {seed, 2});
  const auto p2 = simulate_particles(10.0, lattice, 0.1, {seed, 2});
  bool part_ok = p1.size() == p2.size();
  for (std::size_t i = 0; part_ok && i < p1.size(); ++i) part_ok = p1[i].positions == p2[i].positions;
  res.add(make_row("particle_snapshots_identical", {"ParticleEnsemble"}, part_ok ? 1.0 : 0.0, kNone,
                   1.0, 1.0, part_ok));

  const auto b1 = white_noise_block(lattice, {seed, 7}, 11);
  const auto b2 = white_noise_block(lattice, {seed, 7}, 11);
  const auto other = white_noise_block(lattice, {seed, 8}, 11);
  const bool noise_ok = b1 == b2 && b1 != other;
  res.add(make_row("noise_block_identical", {"white_noise_block"}, noise_ok ? 1.0 : 0.0, kNone, 1.0,
                   1.0, noise_ok));
  return res;
}

std::vector<CheckInfo> make_registry() {
  std::vector<CheckInfo> r;
  auto add = [&](std::string name, std::string anchor, std::string summary, bool stochastic,
                 std::vector<CheckParam> params, CheckResult (*fn)(RunContext&)) {
    r.push_back({std::move(name), std::move(anchor), std::move(summary), stochastic,
                 std::move(params), fn});
  };
  add("plancherel_lemma", "Lemma 2.1", "Plancherel integral increases to t<f,g>, error <= 1/N",
      false, {{"n", "1, 10, 100, 1000"}, {"t", "1"}, {"x", "1"}, {"length", "16"}, {"dx", "1e-4"}},
      run_plancherel_lemma);
  add("heat_semigroup", "§2", "semigroup law, mass conservation, Fourier round trip", false,
      {{"length", "8"}, {"dx", "0.05"}, {"s", "0.3"}, {"t", "0.7"}, {"count", "5"}},
      run_heat_semigroup);
  add("log_laplace_constant", "Eq. (2.2)", "constant data against c/(1+ct/2)", false,
      {{"c", "2"}, {"t", "1"}, {"length", "8"}, {"dx", "0.05"}, {"tolerance", "1e-6"}},
      run_log_laplace_constant);
  add("inner_identity", "Eq. (2.9)", "<1,V_t f> = <1,f> - 1/2 int int V^2 on random f", false,
      {{"count", "20"}, {"t", "1"}, {"length", "16"}, {"dx", "0.05"}, {"tolerance", "1e-6"}},
      run_inner_identity);
  add("comparison_bounds", "Eq. (2.3)", "0 <= V_t f <= P_t f and f <= g => V_t f <= V_t g", false,
      {{"count", "5"}, {"t", "1"}, {"length", "16"}, {"dx", "0.05"}}, run_comparison_bounds);
  add("gaussian_exponent", "§3", "closed-form Gaussian exponent cases and merge invariance", false,
      {{"length", "4"}, {"dx", "1e-3"}}, run_gaussian_exponent);
  add("exponent_convergence", "Eq. (3.4)", "iterated exponent approaches the Gaussian exponent",
      false,
      {{"n", "16, 64, 256"}, {"times", "1, 0.5"}, {"xs", "1, 1"}, {"thetas", "1, 1"}, {"dx", "0.05"}},
      run_exponent_convergence);
  add("limit_defect", "Eqs. (3.10)–(3.11)", "exponent defect within 10x the explicit majorants",
      false,
      {{"n", "16, 32, 64"},
       {"times", "1, 0.5"},
       {"xs", "1, 1"},
       {"thetas", "1, 1"},
       {"dx", "0.05"},
       {"shrink", "1.3"}},
      run_limit_defect);
  add("moment_first", "Eq. (2.7)", "E<X_t,f> = <1,f>, E u = 1, mean constant in t", true,
      {{"t", "1"}, {"replicas", "0"}, {"martingale_times", "0.25, 0.5, 1"}}, run_moment_first);
  add("moment_second", "Eq. (2.8)", "E<X_t,f>^2 against the quadrature target", true,
      {{"t", "1"}, {"replicas", "0"}, {"slack", "0.02"}}, run_moment_second);
  add("backend_agreement", "Eq. (2.7)", "finite-difference and particle means agree", true,
      {{"t", "1"}, {"replicas", "0"}}, run_backend_agreement);
  add("laplace_functional", "Eq. (2.1)", "E exp(-<X_t,f>) = exp(-<1,V_t f>)", true,
      {{"times", "1"}, {"thetas", "0.5, 1, 2"}, {"replicas", "0"}, {"slack", "0.02"}},
      run_laplace_functional);
  add("covariance_sheet", "Theorem 1.1", "Cov V_N against finite-N and (t^s)(x^y) targets", true,
      {{"times", "0.25, 0.5, 0.75, 1"}, {"xs", "0.25, 0.5, 0.75, 1"}, {"limit_tolerance", "0.05"}},
      run_covariance_sheet);
  add("marginal_normality", "Theorem 1.1", "KS test of V_N(t,x) against its Gaussian law", true,
      {{"times", "1"}, {"xs", "1"}}, run_marginal_normality);
  add("fdd_laplace", "Proposition 3.1", "multi-point Laplace transform of V_N", true,
      {{"times", "1, 0.5"}, {"xs", "1, 1"}, {"thetas", "1, 1"}}, run_fdd_laplace);
  add("sheet_centering", "Eq. (4.8)", "V_N has mean zero on the grid", true,
      {{"times", "0, 0.25, 0.5, 0.75, 1"}, {"xs", "0, 0.25, 0.5, 0.75, 1"}}, run_sheet_centering);
  add("holder_increments", "Proposition 4.4", "spatial and temporal moment slopes near k/2", true,
      {{"orders", "2, 4"}, {"margin", "0.3"}}, run_holder_increments);
  add("holder_rectangle", "Proposition 4.3", "rectangle increment slope, lower bound only", true,
      {{"floor", "0.95"}}, run_holder_rectangle);
  add("moment_bound", "Eq. (4.5)", "E u^4 finite and stable over resolutions, clamp rate falls",
      false,
      {{"t", "1"}, {"dxs", "0.1, 0.05, 0.025"}, {"replicas", "200"}, {"spread", "0.25"}},
      run_moment_bound);
  add("statistical_calibration", "§5", "each statistical test on its own synthetic null", false,
      {{"trials", "100"}, {"replicas", "1000"}}, run_statistical_calibration);
  add("reproducibility", "Eq. (1.1)", "bit-identical replicas under any schedule", false, {},
      run_reproducibility);
  return r;
}

}  // namespace

SampledFunction random_admissible(const Torus& space, std::uint64_t seed, std::uint32_t index) {
  CounterEngine rng(seed, index, static_cast<std::uint32_t>(StreamDomain::kFunctions));
  const int bumps = 1 + static_cast<int>(rng.next_u32() % 4u);
  struct Bump {
    double centre, width, height;
  };
  std::vector<Bump> list;
  for (int b = 0; b < bumps; ++b) {
    list.push_back({rng.uniform() * space.length, 0.1 + 0.9 * rng.uniform(), 0.2 + 2.8 * rng.uniform()});
  }
  const double a = rng.uniform() * 0.5 * space.length;
  const double box = 0.5 * rng.uniform();
  const double box_h = rng.uniform();
  auto f = SampledFunction::evaluate(space, [&](double x) {
    double v = 0.0;
    for (const auto& b : list) {
      double d = std::abs(x - b.centre);
      d = std::min(d, space.length - d);
      v += b.height * std::exp(-0.5 * d * d / (b.width * b.width));
    }
    return v;
  });
  return f + SampledFunction::indicator(space, a, a + box + space.dx).scaled(box_h);
}

std::vector<double> MomentEnsemble::functional_at(double t, std::size_t count) const {
  const std::ptrdiff_t i = lattice.observation_index(t);
  if (i < 0) throw InvalidArgument("time " + format_number(t) + " is not observed by the ensemble");
  count = std::min(count == 0 ? replicas() : count, replicas());
  std::vector<double> out(count);
  for (std::size_t r = 0; r < count; ++r) out[r] = functional[r][static_cast<std::size_t>(i)];
  return out;
}

std::vector<double> MomentEnsemble::density_at(double t, std::size_t count) const {
  const std::ptrdiff_t i = lattice.observation_index(t);
  if (i < 0) throw InvalidArgument("time " + format_number(t) + " is not observed by the ensemble");
  count = std::min(count == 0 ? replicas() : count, replicas());
  std::vector<double> out(count);
  for (std::size_t r = 0; r < count; ++r) out[r] = density[r][static_cast<std::size_t>(i)];
  return out;
}

std::string format_csv(const CheckResult& result) {
  auto cell = [](double v) { return std::isnan(v) ? std::string() : format_number(v); };
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  std::ostringstream out;
  out << "test_name";
  for (const auto& p : result.param_columns) out << "," << quote(p);
  out << ",estimate,se,target_finite_N,target_limit,verdict\n";
  for (const auto& row : result.rows) {
    out << quote(row.test);
    for (std::size_t i = 0; i < result.param_columns.size(); ++i) {
      out << "," << (i < row.params.size() ? quote(row.params[i]) : std::string());
    }
    out << "," << cell(row.estimate) << "," << cell(row.se) << "," << cell(row.target_finite) << ","
        << cell(row.target_limit) << "," << (row.passed ? "pass" : "fail") << "\n";
  }
  return out.str();
}

RunContext::RunContext(ExperimentConfig config, RunOptions options)
    : config_(std::move(config)), options_(options) {
  validate_config(config_);
}

double RunContext::period_for(double extent) const {
  if (config_.length) return *config_.length;
  return auto_period(extent, config_.t_max, config_.dx);
}

std::string RunContext::param(const std::string& check, const std::string& key) const {
  if (auto it = config_.parameters.find(check); it != config_.parameters.end()) {
    if (auto kv = it->second.find(key); kv != it->second.end()) return kv->second;
  }
  const CheckInfo* info = find_check(check);
  if (info != nullptr) {
    for (const auto& p : info->params) {
      if (p.key == key) return p.default_value;
    }
  }
  throw InvalidArgument("check " + check + " has no parameter '" + key + "'");
}

double RunContext::param_number(const std::string& check, const std::string& key) const {
  const auto v = parse_number_list(param(check, key));
  if (v.size() != 1) throw InvalidArgument(check + "." + key + " must be a single number");
  return v.front();
}

std::vector<double> RunContext::param_list(const std::string& check, const std::string& key) const {
  auto v = parse_number_list(param(check, key));
  if (v.empty()) throw InvalidArgument(check + "." + key + " must not be empty");
  return v;
}

std::size_t RunContext::param_count(const std::string& check, const std::string& key) const {
  const double v = param_number(check, key);
  if (!(v >= 0.0) || v != std::floor(v)) {
    throw InvalidArgument(check + "." + key + " must be a nonnegative integer");
  }
  if (v == 0.0 && key == "replicas") return config_.replicas;
  return static_cast<std::size_t>(v);
}

DensityPath RunContext::simulate(const std::string& backend, const Lattice& lattice,
                                 std::uint32_t replica, const std::string& tag) const {
  const NoiseStream stream{seed(), replica};
  std::optional<DensityPath> path;
  if (backend == "fd") {
    path = simulate_fd(lattice, stream);
  } else {
    const auto snaps =
        simulate_particles(config_.mass_resolution, lattice, lattice.t_max(), stream);
    std::vector<std::vector<double>> fields;
    for (const auto& s : snaps) fields.push_back(density_histogram(s, lattice.space()));
    path.emplace(lattice, std::move(fields), "particles", replica, seed());
  }
  if (options_.dump_fields) dump(*path, tag);
  return std::move(*path);
}

void RunContext::dump(const DensityPath& path, const std::string& tag) const {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(config_.output_dir()) / "fields";
  fs::create_directories(dir);
  char file[96];
  std::snprintf(file, sizeof file, "%s_r%06u.csv", tag.c_str(), path.replica());
  std::ofstream out(dir / file, std::ios::binary);
  out << "t,x,u\n";
  const Torus& space = path.lattice().space();
  for (std::size_t i = 0; i < path.time_count(); ++i) {
    const auto u = path.field(i);
    const std::string t = format_number(path.times()[i]);
    for (std::size_t j = 0; j < u.size(); ++j) {
      out << t << "," << format_number(space.node(j)) << "," << format_number(u[j]) << "\n";
    }
  }
}

const MomentEnsemble& RunContext::moments(const std::string& backend, std::size_t count) {
  if (backend != "fd" && backend != "particles") throw InvalidArgument("unknown backend " + backend);
  if (count == 0) count = config_.replicas;
  auto& slot = moments_[backend];
  if (!slot) {
    std::set<double> times{0.25 * config_.t_max, 0.5 * config_.t_max, 0.75 * config_.t_max,
                           config_.t_max};
    for (double t : config_.grid_times) {
      if (t > 0.0) times.insert(t);
    }
    const Lattice lattice = build_lattice(period_for(1.0), config_.dx, config_.t_max,
                                          std::vector<double>(times.begin(), times.end()));
    slot = std::make_unique<MomentEnsemble>(MomentEnsemble{backend, lattice, {}, {}, {}, {}});
  }
  MomentEnsemble& ens = *slot;
  const std::size_t have = ens.replicas();
  if (have >= count) return ens;
  ens.functional.resize(count);
  ens.density.resize(count);
  ens.total_mass.resize(count);
  ens.clamp_fraction.resize(count);
  const auto f = SampledFunction::indicator(ens.lattice.space(), 0.0, 1.0);
  const std::string tag = "moments_" + backend;
  parallel_for(
      have, count,
      [&](std::size_t r) {
        const auto path = simulate(backend, ens.lattice, static_cast<std::uint32_t>(r), tag);
        std::vector<double> fx(path.time_count()), u0(path.time_count());
        for (std::size_t i = 0; i < path.time_count(); ++i) {
          fx[i] = functional(path, i, f);
          u0[i] = path.field(i)[0];
        }
        const auto last = path.field(path.time_count() - 1);
        double mass = 0.0;
        for (double v : last) mass += v;
        ens.functional[r] = std::move(fx);
        ens.density[r] = std::move(u0);
        ens.total_mass[r] = mass * ens.lattice.dx();
        ens.clamp_fraction[r] = path.clamp_fraction();
      },
      options_.workers);
  return ens;
}

const Lattice& RunContext::sheet_lattice(double n_scale) {
  auto& slot = sheet_lattices_[n_scale];
  if (!slot) {
    if (config_.grid_times.empty()) throw InvalidArgument("sheet checks need a [grid] section");
    std::vector<double> obs;
    for (double t : config_.grid_times) {
      if (t > 0.0) obs.push_back(t);
    }
    if (obs.empty()) throw InvalidArgument("sheet grid needs a positive time");
    slot = std::make_unique<Lattice>(build_lattice(period_for(config_.grid_xs.back() * n_scale),
                                                   config_.dx, obs.back(), obs));
  }
  return *slot;
}

const std::vector<SheetSample>& RunContext::sheets(double n_scale) {
  if (auto it = sheets_.find(n_scale); it != sheets_.end()) return it->second;
  const Lattice& lattice = sheet_lattice(n_scale);
  const SheetGrid grid{config_.grid_times, config_.grid_xs};
  const std::string backend = config_.backend == "particles" ? "particles" : "fd";
  const std::string tag = "sheet_n" + format_number(n_scale);
  const std::size_t count = config_.replicas;
  std::vector<std::optional<SheetSample>> slots(count);
  parallel_for(
      0, count,
      [&](std::size_t r) {
        slots[r] = compute_sheet(simulate(backend, lattice, static_cast<std::uint32_t>(r), tag),
                                 n_scale, grid);
      },
      options_.workers);
  std::vector<SheetSample> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return sheets_.emplace(n_scale, std::move(out)).first->second;
}

const std::vector<CheckInfo>& check_registry() {
  static const std::vector<CheckInfo> registry = make_registry();
  return registry;
}

const CheckInfo* find_check(std::string_view name) {
  for (const auto& c : check_registry()) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string format_check_list() {
  std::ostringstream out;
  for (const auto& c : check_registry()) {
    const std::string head = c.name + " → " + c.anchor;
    std::size_t width = 0;  // columns, not bytes
    for (unsigned char ch : head) width += (ch & 0xC0u) != 0x80u;
    out << head << std::string(width < 46 ? 46 - width : 1, ' ') << c.summary << "\n";
  }
  return out.str();
}

CheckResult run_check(const CheckInfo& info, RunContext& context) {
  CheckResult res = info.run(context);
  if (res.rows.empty()) res.passed = false;
  return res;
}

}  // namespace sbm
