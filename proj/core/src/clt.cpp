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

#include "sbmlab/clt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sbmlab/duhamel.hpp"
#include "sbmlab/error.hpp"
#include "sbmlab/philox.hpp"

namespace sbm {

namespace {

constexpr double kGridMatch = 1e-9;

std::size_t find_index(const std::vector<double>& axis, double v, const char* what) {
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (std::abs(axis[i] - v) <= kGridMatch) return i;
  }
  std::ostringstream msg;
  msg << what << " " << v << " is not on the sheet grid";
  throw InvalidArgument(msg.str());
}

void check_axis(const std::vector<double>& axis, const char* what) {
  if (axis.empty()) throw InvalidArgument(std::string("sheet grid needs ") + what);
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (!(axis[i] >= 0.0) || !std::isfinite(axis[i])) {
      throw InvalidArgument(std::string("sheet grid ") + what + " must be finite and >= 0");
    }
    if (i > 0 && !(axis[i] > axis[i - 1])) {
      throw InvalidArgument(std::string("sheet grid ") + what + " must be strictly increasing");
    }
  }
}

void check_samples(std::span<const SheetSample> samples) {
  if (samples.empty()) throw InvalidArgument("no sheet samples");
  const SheetGrid& g = samples.front().grid();
  for (const auto& s : samples) {
    if (s.grid().times != g.times || s.grid().xs != g.xs) {
      throw InvalidArgument("sheet samples on different grids");
    }
  }
}

double prefix_excess(std::span<const double> u, const Torus& space, double b) {
  const double cells_to_b = b / space.dx;
  auto whole = static_cast<std::size_t>(std::floor(cells_to_b));
  whole = std::min(whole, space.cells);
  double s = 0.0;
  for (std::size_t j = 0; j < whole; ++j) s += u[j] - 1.0;
  s *= space.dx;
  if (whole < space.cells) {
    const double part = b - static_cast<double>(whole) * space.dx;
    if (part > 0.0) s += (u[whole] - 1.0) * part;
  }
  return s;
}

}  // namespace

SheetGrid SheetGrid::uniform(std::size_t intervals) {
  if (intervals == 0) throw InvalidArgument("uniform sheet grid needs >= 1 interval");
  SheetGrid g;
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double v = static_cast<double>(i) / static_cast<double>(intervals);
    g.times.push_back(v);
    g.xs.push_back(v);
  }
  return g;
}

void SheetGrid::validate() const {
  check_axis(times, "times");
  check_axis(xs, "x values");
}

std::size_t SheetGrid::time_index(double t) const { return find_index(times, t, "time"); }
std::size_t SheetGrid::x_index(double x) const { return find_index(xs, x, "x"); }

SheetSample::SheetSample(SheetGrid grid, double n_scale, std::uint32_t replica,
                         std::vector<double> values)
    : grid_(std::move(grid)), n_scale_(n_scale), replica_(replica), values_(std::move(values)) {
  grid_.validate();
  if (values_.size() != grid_.size()) throw InvalidArgument("sheet values do not match the grid");
}

double excess_mass(std::span<const double> u, const Torus& space, double a, double b) {
  if (u.size() != space.cells) throw InvalidArgument("density does not match the torus");
  if (!(a >= 0.0) || !(b >= a) || b > space.length * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "window [" << a << ", " << b << "] does not fit in the period " << space.length;
    throw InvalidArgument(msg.str());
  }
  return prefix_excess(u, space, b) - prefix_excess(u, space, a);
}

SheetSample compute_sheet(const DensityPath& path, double n_scale, const SheetGrid& grid) {
  grid.validate();
  if (!(n_scale > 0.0)) throw InvalidArgument("scale N must be positive");
  const Lattice& lattice = path.lattice();
  if (grid.xs.back() * n_scale > lattice.length() * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "sheet window [0, " << grid.xs.back() * n_scale << "] exceeds the lattice period "
        << lattice.length();
    throw InvalidArgument(msg.str());
  }
  const double amplitude = 1.0 / std::sqrt(n_scale);
  std::vector<double> values(grid.size(), 0.0);
  const std::size_t nx = grid.xs.size();
  for (std::size_t k = 0; k < grid.times.size(); ++k) {
    const double t = grid.times[k];
    if (t == 0.0) continue;  // u(0, .) = 1
    const std::ptrdiff_t idx = lattice.observation_index(t);
    if (idx < 0) {
      std::ostringstream msg;
      msg << "sheet time " << t << " is not an observation time of the path";
      throw InvalidArgument(msg.str());
    }
    const auto u = path.field(static_cast<std::size_t>(idx));
    // Running prefix sums over increasing x.
    double prev_b = 0.0, acc = 0.0;
    for (std::size_t l = 0; l < nx; ++l) {
      const double b = grid.xs[l] * n_scale;
      acc += excess_mass(u, lattice.space(), prev_b, b);
      prev_b = b;
      values[k * nx + l] = amplitude * acc;
    }
  }
  return SheetSample(grid, n_scale, path.replica(), std::move(values));
}

double sheet_increment(const DensityPath& path, std::size_t time_index, double n_scale,
                       double x_lo, double x_hi) {
  if (!(n_scale > 0.0)) throw InvalidArgument("scale N must be positive");
  return excess_mass(path.field(time_index), path.lattice().space(), x_lo * n_scale,
                     x_hi * n_scale) /
         std::sqrt(n_scale);
}

SheetSample synthetic_sheet(const SheetGrid& grid, const NoiseStream& stream) {
  grid.validate();
  const std::size_t nt = grid.times.size();
  const std::size_t nx = grid.xs.size();
  CounterEngine rng(stream.master_seed, stream.replica,
                    static_cast<std::uint32_t>(StreamDomain::kSynthetic));
  std::vector<double> values(nt * nx, 0.0);
  for (std::size_t k = 0; k < nt; ++k) {
    const double dt = grid.times[k] - (k > 0 ? grid.times[k - 1] : 0.0);
    double row = 0.0;  // running sum of this time slab along x
    for (std::size_t l = 0; l < nx; ++l) {
      const double dx = grid.xs[l] - (l > 0 ? grid.xs[l - 1] : 0.0);
      const double cell = std::sqrt(dt * dx) * rng.normal();
      row += cell;
      values[k * nx + l] = row + (k > 0 ? values[(k - 1) * nx + l] : 0.0);
    }
  }
  return SheetSample(grid, std::numeric_limits<double>::infinity(), stream.replica,
                     std::move(values));
}

SheetOracle::SheetOracle(const Torus& simulation_space, double n_scale)
    : unit_space_(simulation_space.scaled(1.0 / n_scale)), n_scale_(n_scale) {
  if (!(n_scale > 0.0)) throw InvalidArgument("scale N must be positive");
}

double SheetOracle::limit(double t, double x, double s, double y) noexcept {
  return std::min(t, s) * std::min(x, y);
}

double SheetOracle::covariance(double t, double x, double s, double y) const {
  if (!unit_space_) return limit(t, x, s, y);
  const double a = std::min(t, s);
  if (a <= 0.0 || x <= 0.0 || y <= 0.0) return 0.0;
  const auto f = SampledFunction::indicator(*unit_space_, 0.0, x);
  const auto g = SampledFunction::indicator(*unit_space_, 0.0, y);
  return plancherel_pair_integral(f, g, a, t - a, s - a, n_scale_);
}

CovarianceReport covariance_check(std::span<const SheetSample> samples,
                                  std::span<const double> times, std::span<const double> xs,
                                  const SheetOracle& oracle, double limit_tolerance,
                                  double sigmas) {
  check_samples(samples);
  if (samples.size() < 2) throw InvalidArgument("covariance check needs >= 2 replicas");
  const SheetGrid& grid = samples.front().grid();
  struct Point {
    double t, x;
    std::size_t k, l;
  };
  std::vector<Point> points;
  for (double t : times) {
    for (double x : xs) points.push_back({t, x, grid.time_index(t), grid.x_index(x)});
  }
  std::vector<std::vector<double>> columns(points.size(), std::vector<double>(samples.size()));
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (std::size_t r = 0; r < samples.size(); ++r) {
      columns[p][r] = samples[r](points[p].k, points[p].l);
    }
  }

  CovarianceReport report;
  report.limit_tolerance = limit_tolerance;
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (std::size_t q = p; q < points.size(); ++q) {
      CovarianceEntry e;
      e.t = points[p].t;
      e.x = points[p].x;
      e.s = points[q].t;
      e.y = points[q].x;
      const double target = oracle.covariance(e.t, e.x, e.s, e.y);
      e.estimate = estimate_covariance(columns[p], columns[q], target, 0.0, sigmas);
      e.limit = SheetOracle::limit(e.t, e.x, e.s, e.y);
      e.within_limit =
          limit_tolerance <= 0.0 || std::abs(e.estimate.mean - e.limit) <= limit_tolerance;
      const bool se_ok = e.estimate.passed();
      if (!se_ok) ++report.se_failures;
      if (!e.within_limit) ++report.limit_failures;
      e.passed = se_ok && e.within_limit;
      report.entries.push_back(e);
    }
  }
  report.passed = report.se_failures == 0 && report.limit_failures == 0;
  return report;
}

NormalityReport normality_check(std::span<const double> values, double reference_variance) {
  NormalityReport rep;
  rep.reference_variance = reference_variance;
  rep.mean = estimate_mean(values, 0.0);
  const bool all_zero = std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
  if (!(reference_variance > 0.0) || all_zero) {
    rep.degenerate = true;
    rep.note = "degenerate, skipped";
    rep.passed = true;
    return rep;
  }
  std::vector<double> z(values.begin(), values.end());
  const double scale = 1.0 / std::sqrt(reference_variance);
  for (double& v : z) v *= scale;
  rep.statistic = ks_statistic_normal(std::move(z));
  rep.critical = 1.63 / std::sqrt(static_cast<double>(values.size()));
  rep.p_value = kolmogorov_pvalue(rep.statistic, values.size());
  rep.passed = rep.statistic <= rep.critical;
  return rep;
}

NormalityReport normality_check(std::span<const SheetSample> samples, double t, double x,
                                const SheetOracle& oracle) {
  check_samples(samples);
  const std::size_t k = samples.front().grid().time_index(t);
  const std::size_t l = samples.front().grid().x_index(x);
  std::vector<double> values(samples.size());
  for (std::size_t r = 0; r < samples.size(); ++r) values[r] = samples[r](k, l);
  NormalityReport rep = normality_check(values, oracle.covariance(t, x, t, x));
  rep.t = t;
  rep.x = x;
  return rep;
}

FddTargets fdd_targets(std::span<const FddPoint> points, double n_scale, const Torus& target) {
  if (points.empty()) throw InvalidArgument("FDD check needs at least one point");
  const Torus unit = target.scaled(1.0 / n_scale);
  FddSpec spec;
  spec.n_scale = n_scale;
  spec.target = target;
  for (const auto& p : points) {
    if (!(p.theta >= 0.0)) throw InvalidArgument("FDD weights theta must be >= 0");
    spec.times.push_back(p.t);
    spec.functions.push_back(SampledFunction::indicator(unit, 0.0, p.x).scaled(p.theta));
  }
  FddTargets out;
  out.finite_exponent = iterated_exponent(spec).exponent;
  out.limit_exponent = gaussian_limit_exponent(spec.times, spec.functions);
  return out;
}

FddReport fdd_laplace_check(std::span<const SheetSample> samples, std::span<const FddPoint> points,
                            const FddTargets& targets, double sigmas) {
  check_samples(samples);
  const SheetGrid& grid = samples.front().grid();
  std::vector<std::pair<std::size_t, std::size_t>> where;
  for (const auto& p : points) where.emplace_back(grid.time_index(p.t), grid.x_index(p.x));
  std::vector<double> values(samples.size());
  for (std::size_t r = 0; r < samples.size(); ++r) {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      s += points[i].theta * samples[r](where[i].first, where[i].second);
    }
    values[r] = std::exp(-s);
  }
  FddReport rep;
  rep.points.assign(points.begin(), points.end());
  rep.estimate = estimate_mean(values, std::exp(targets.finite_exponent), 0.0, sigmas);
  rep.limit_target = std::exp(targets.limit_exponent);
  rep.limit_gap = std::abs(rep.estimate.mean - rep.limit_target);
  rep.passed = rep.estimate.passed();
  return rep;
}

namespace {

double uniform_spacing(const std::vector<double>& axis, const char* what) {
  if (axis.size() < 2 || axis.front() != 0.0) {
    throw InvalidArgument(std::string("Hölder check needs a uniform ") + what + " axis from 0");
  }
  const double h = axis[1];
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (std::abs(axis[i] - static_cast<double>(i) * h) > 1e-9) {
      throw InvalidArgument(std::string("Hölder check needs a uniform ") + what + " axis from 0");
    }
  }
  return h;
}

void fit_ladder(HolderLadder& ladder) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < ladder.lags.size(); ++i) {
    if (!(ladder.moments[i] > 0.0)) throw NumericalError("Hölder check: zero increment moment");
    lx.push_back(std::log(ladder.lags[i]));
    ly.push_back(std::log(ladder.moments[i]));
  }
  ladder.slope = least_squares(lx, ly).slope;
}

}  // namespace

HolderReport holder_check(std::span<const SheetSample> samples, int order,
                          const HolderOptions& options) {
  if (order != 2 && order != 4) throw InvalidArgument("Hölder moment order must be 2 or 4");
  check_samples(samples);
  const SheetGrid& grid = samples.front().grid();
  const double ht = uniform_spacing(grid.times, "time");
  const double hx = uniform_spacing(grid.xs, "x");
  const std::size_t nt = grid.times.size();
  const std::size_t nx = grid.xs.size();
  std::vector<std::size_t> lags;
  for (std::size_t l : options.lag_steps) {
    if (l > 0 && l < nt && l < nx) lags.push_back(l);
  }
  if (lags.size() < 4) throw InvalidArgument("Hölder check needs at least 4 usable lags");

  const auto power = [order](double v) {
    const double a = v * v;
    return order == 2 ? a : a * a;
  };
  const double k = static_cast<double>(order);

  HolderReport rep;
  rep.order = order;
  rep.spatial.target = k / 2.0;
  rep.temporal.target = k / 2.0;
  rep.rectangle.target = options.rectangle_floor;
  const std::size_t t_row = nt - 1;
  const std::size_t x_col = nx - 1;
  for (std::size_t lag : lags) {
    double sx = 0.0, st = 0.0, sr = 0.0;
    std::size_t cx = 0, ct = 0, cr = 0;
    for (const auto& s : samples) {
      for (std::size_t l = 0; l + lag < nx; ++l, ++cx) sx += power(s(t_row, l + lag) - s(t_row, l));
      for (std::size_t j = 0; j + lag < nt; ++j, ++ct) st += power(s(j + lag, x_col) - s(j, x_col));
      for (std::size_t j = 0; j + lag < nt; ++j) {
        for (std::size_t l = 0; l + lag < nx; ++l, ++cr) {
          sr += power(s(j + lag, l + lag) - s(j + lag, l) - s(j, l + lag) + s(j, l));
        }
      }
    }
    const double lag_x = static_cast<double>(lag) * hx;
    const double lag_t = static_cast<double>(lag) * ht;
    rep.spatial.lags.push_back(lag_x);
    rep.spatial.moments.push_back(sx / static_cast<double>(cx));
    rep.temporal.lags.push_back(lag_t);
    rep.temporal.moments.push_back(st / static_cast<double>(ct));
    rep.rectangle.lags.push_back(lag_x * lag_t);
    rep.rectangle.moments.push_back(sr / static_cast<double>(cr));
  }
  fit_ladder(rep.spatial);
  fit_ladder(rep.temporal);
  fit_ladder(rep.rectangle);
  rep.spatial.passed = std::abs(rep.spatial.slope - rep.spatial.target) <= options.margin;
  rep.temporal.passed = std::abs(rep.temporal.slope - rep.temporal.target) <= options.margin;
  rep.rectangle.passed = rep.rectangle.slope >= options.rectangle_floor;
  rep.rectangle_asserted = order == 4;
  rep.passed = rep.spatial.passed && rep.temporal.passed &&
               (!rep.rectangle_asserted || rep.rectangle.passed);
  return rep;
}

}  // namespace sbm
