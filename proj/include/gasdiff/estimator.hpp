#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gasdiff/binning.hpp"
#include "gasdiff/core.hpp"
#include "gasdiff/fdsolver.hpp"

namespace gasdiff {

enum class InitialCondition { Patch, Frame0 };

/// Target frames U^n and the Crank-Nicolson model u^n(D) they are fitted
/// against. Frame n of the model is taken after n * steps_per_frame steps
/// of size frame_interval / steps_per_frame.
class FitProblem {
 public:
  FitProblem(std::vector<ScalarField> targets, double frame_interval_nd, ScalarField initial,
             int steps_per_frame = 1);

  /// Uses the binned frame times (must be evenly spaced) converted through
  /// `scale`; the model is re-aligned against the binned times on every solve.
  static FitProblem from_binned(const BinnedSeries& binned, const UnitScale& scale,
                                InitialCondition init = InitialCondition::Patch,
                                int steps_per_frame = 1);

  std::size_t frame_count() const noexcept { return targets_.size(); }
  const GridSpec& grid() const noexcept { return initial_.grid(); }
  double frame_interval() const noexcept { return frame_interval_; }
  std::size_t residual_size() const noexcept { return targets_.size() * grid().size(); }

  FieldSeries solve_model(double diffusion) const;
  /// u^n_j(D) flattened frame-major, the order of residuals().
  std::vector<double> model(double diffusion) const;
  /// U^n_j - u^n_j(D).
  std::vector<double> residuals(double diffusion) const;
  /// (1/N^2) sum_n sum_j (U - u)^2; no division by the frame count.
  double cost(double diffusion) const;
  double cost_of(std::span<const double> residuals) const;
  /// du/dD by central differences with step rel_step * D; the two solves
  /// run concurrently.
  std::vector<double> jacobian(double diffusion, double rel_step = 1e-6) const;

 private:
  std::vector<ScalarField> targets_;
  double frame_interval_;
  ScalarField initial_;
  int steps_per_frame_;
  std::optional<std::pair<BinnedSeries, UnitScale>> binned_;
};

struct FitConfig {
  double d0 = 1.0;
  double lambda0 = 1e-3;
  double lambda_up = 10.0;
  double lambda_down = 0.1;
  int max_iter = 100;
  double tol_step = 1e-8;   // relative |dD| / D
  double tol_cost = 1e-12;  // absolute cost change
  double jacobian_rel_step = 1e-6;

  void validate() const;
};

struct FitResult {
  double d_opt_nd = 0.0;
  double d_opt_cm2_s = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
  double ci95_nd = 0.0;
  double ci95_cm2_s = 0.0;
  bool converged = false;
  std::vector<double> cost_trace;  // cost at D0, then after every accepted step
  std::vector<double> d_trace;
};

/// Scalar Levenberg-Marquardt: dD = J^T r / (J^T J + lambda); a step is
/// accepted when it lowers the cost (lambda *= lambda_down), otherwise
/// rejected (lambda *= lambda_up). Steps to D <= 0 are rejected.
FitResult lm_fit(const FitProblem& problem, const FitConfig& cfg, const UnitScale& scale = {});

/// 1.96 sqrt(s^2 / J^T J), s^2 = sum r^2 / (n - 1): asymptotic normal
/// interval for a single least-squares parameter.
double confidence_interval_95(std::span<const double> jacobian, std::span<const double> residuals);

/// (D, cost(D)) at every grid value.
std::vector<std::pair<double, double>> cost_curve(const FitProblem& problem,
                                                  std::span<const double> d_grid);

}  // namespace gasdiff
