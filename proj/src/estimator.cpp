#include "gasdiff/estimator.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "gasdiff/error.hpp"

namespace gasdiff {

FitProblem::FitProblem(std::vector<ScalarField> targets, double frame_interval_nd,
                       ScalarField initial, int steps_per_frame)
    : targets_(std::move(targets)),
      frame_interval_(frame_interval_nd),
      initial_(std::move(initial)),
      steps_per_frame_(steps_per_frame) {
  if (targets_.empty()) throw InputError("fit needs at least one target frame");
  if (!(frame_interval_ > 0.0)) throw UsageError("frame interval must be positive");
  if (steps_per_frame_ < 1) throw UsageError("steps per frame must be >= 1");
  if (initial_.grid().dim() != 2) throw UsageError("fitting works on 2D grids");
  for (const auto& t : targets_)
    if (!(t.grid() == initial_.grid())) throw InputError("target frames and initial field use different grids");
}

FitProblem FitProblem::from_binned(const BinnedSeries& binned, const UnitScale& scale,
                                   InitialCondition init, int steps_per_frame) {
  scale.validate();
  const auto& fr = binned.frames;
  if (fr.empty()) throw InputError("binned series has no frames");
  double interval_fs = 1.0;
  if (fr.size() > 1) {
    interval_fs = fr[1].time_fs - fr[0].time_fs;
    if (!(interval_fs > 0.0)) throw InputError("binned frame times must increase");
    for (std::size_t n = 1; n < fr.size(); ++n) {
      const double d = fr[n].time_fs - fr[n - 1].time_fs;
      if (std::abs(d - interval_fs) > 1e-9 * interval_fs)
        throw InputError(fmt::format("binned frames are not evenly spaced (frame {})", n));
    }
  }
  std::vector<ScalarField> targets;
  targets.reserve(fr.size());
  for (const auto& f : fr) targets.push_back(f.u);
  ScalarField initial = init == InitialCondition::Patch ? make_patch_initial(binned.grid) : fr.front().u;
  const double interval_nd = fr.size() > 1 ? scale.fs_to_nd_time(interval_fs) : 1.0;
  FitProblem p(std::move(targets), interval_nd, std::move(initial), steps_per_frame);
  p.binned_.emplace(binned, scale);
  return p;
}

FieldSeries FitProblem::solve_model(double diffusion) const {
  if (!(diffusion > 0.0) || !std::isfinite(diffusion))
    throw NumericalError(fmt::format("model needs D > 0, got {}", diffusion));
  SolverConfig cfg{initial_.grid(), frame_interval_ / steps_per_frame_, diffusion,
                   Scheme::CrankNicolson,
                   static_cast<long>(targets_.size() - 1) * steps_per_frame_};
  auto series = solve(initial_, cfg, steps_per_frame_);
  if (binned_) align_series(binned_->first, series, binned_->second);
  else if (series.frames.size() != targets_.size())
    throw InputError(fmt::format("cannot align {} targets with {} FD frames", targets_.size(),
                                 series.frames.size()));
  return series;
}

std::vector<double> FitProblem::model(double diffusion) const {
  const auto series = solve_model(diffusion);
  std::vector<double> out;
  out.reserve(residual_size());
  for (const auto& f : series.frames) out.insert(out.end(), f.values().begin(), f.values().end());
  return out;
}

std::vector<double> FitProblem::residuals(double diffusion) const {
  auto r = model(diffusion);
  std::size_t i = 0;
  for (const auto& t : targets_)
    for (double v : t.values()) {
      r[i] = v - r[i];
      ++i;
    }
  return r;
}

double FitProblem::cost_of(std::span<const double> r) const {
  return std::inner_product(r.begin(), r.end(), r.begin(), 0.0) / static_cast<double>(grid().size());
}

double FitProblem::cost(double diffusion) const { return cost_of(residuals(diffusion)); }

std::vector<double> FitProblem::jacobian(double diffusion, double rel_step) const {
  const double step = rel_step * diffusion;
  if (!(step > 0.0) || diffusion - step == diffusion || !(diffusion - step > 0.0))
    throw NumericalError(fmt::format("Jacobian step underflows at D = {}", diffusion));
  std::vector<double> up, down;
  std::exception_ptr error;
#pragma omp parallel sections
  {
#pragma omp section
    {
      try {
        up = model(diffusion + step);
      } catch (...) {
#pragma omp critical(gasdiff_jacobian)
        error = std::current_exception();
      }
    }
#pragma omp section
    {
      try {
        down = model(diffusion - step);
      } catch (...) {
#pragma omp critical(gasdiff_jacobian)
        error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
  // Use the representable spacing so the quotient matches the evaluated points.
  const double width = (diffusion + step) - (diffusion - step);
  for (std::size_t i = 0; i < up.size(); ++i) up[i] = (up[i] - down[i]) / width;
  return up;
}

void FitConfig::validate() const {
  if (!(d0 > 0.0)) throw UsageError("initial D must be positive");
  if (!(lambda0 >= 0.0)) throw UsageError("initial damping must be non-negative");
  if (!(lambda_up > 1.0) || !(lambda_down < 1.0) || !(lambda_down > 0.0))
    throw UsageError("damping multipliers need up > 1 and 0 < down < 1");
  if (max_iter < 1) throw UsageError("max_iter must be >= 1");
  if (!(jacobian_rel_step > 0.0)) throw UsageError("Jacobian step must be positive");
}

double confidence_interval_95(std::span<const double> jacobian, std::span<const double> residuals) {
  if (jacobian.size() != residuals.size()) throw InputError("Jacobian and residuals differ in length");
  if (residuals.size() < 2) throw NumericalError("confidence interval needs at least two residuals");
  const double jtj = std::inner_product(jacobian.begin(), jacobian.end(), jacobian.begin(), 0.0);
  if (!(jtj > 1e-300)) throw NumericalError("J^T J vanishes; the interval is undefined");
  const double rss = std::inner_product(residuals.begin(), residuals.end(), residuals.begin(), 0.0);
  const double s2 = rss / static_cast<double>(residuals.size() - 1);
  return 1.96 * std::sqrt(s2 / jtj);
}

FitResult lm_fit(const FitProblem& problem, const FitConfig& cfg, const UnitScale& scale) {
  cfg.validate();
  FitResult out;
  double d = cfg.d0;
  auto r = problem.residuals(d);
  double cost = problem.cost_of(r);
  if (!std::isfinite(cost)) throw NumericalError("initial cost is not finite");
  out.cost_trace.push_back(cost);
  out.d_trace.push_back(d);

  double lambda = cfg.lambda0;
  bool accepted_any = false;
  auto jac = problem.jacobian(d, cfg.jacobian_rel_step);
  for (int it = 1; it <= cfg.max_iter; ++it) {
    out.iterations = it;
    const double jtj = std::inner_product(jac.begin(), jac.end(), jac.begin(), 0.0);
    const double jtr = std::inner_product(jac.begin(), jac.end(), r.begin(), 0.0);
    const double denom = jtj + lambda;
    if (!(denom > 0.0)) {
      // Flat response with zero damping: nothing more to learn from this point.
      out.converged = true;
      break;
    }
    const double delta = jtr / denom;
    if (std::abs(delta) <= cfg.tol_step * d) {
      out.converged = true;
      break;
    }
    const double trial = d + delta;
    if (!(trial > 0.0)) {
      lambda *= cfg.lambda_up;
      continue;
    }
    auto r_trial = problem.residuals(trial);
    const double c_trial = problem.cost_of(r_trial);
    if (!std::isfinite(c_trial)) throw NumericalError(fmt::format("cost is not finite at D = {}", trial));
    if (c_trial < cost) {
      const double drop = cost - c_trial;
      d = trial;
      r = std::move(r_trial);
      cost = c_trial;
      accepted_any = true;
      out.cost_trace.push_back(cost);
      out.d_trace.push_back(d);
      lambda *= cfg.lambda_down;
      if (drop < cfg.tol_cost || std::abs(delta) < cfg.tol_step * d) {
        out.converged = true;
        break;
      }
      jac = problem.jacobian(d, cfg.jacobian_rel_step);
    } else {
      lambda *= cfg.lambda_up;
    }
  }
  if (!accepted_any && !out.converged)
    throw NumericalError(fmt::format("no step lowered the cost in {} iterations", cfg.max_iter));

  out.d_opt_nd = d;
  out.final_cost = cost;
  jac = problem.jacobian(d, cfg.jacobian_rel_step);
  out.ci95_nd = confidence_interval_95(jac, r);
  out.d_opt_cm2_s = nd_to_physical_D(d, scale);
  out.ci95_cm2_s = nd_to_physical_D(out.ci95_nd, scale);
  return out;
}

std::vector<std::pair<double, double>> cost_curve(const FitProblem& problem,
                                                  std::span<const double> d_grid) {
  std::vector<std::pair<double, double>> out(d_grid.size());
  const auto n = static_cast<long>(d_grid.size());
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = {d_grid[i], problem.cost(d_grid[i])};
    } catch (...) {
#pragma omp critical(gasdiff_cost_curve)
      error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace gasdiff
