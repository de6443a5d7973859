#pragma once

#include <complex>
#include <span>
#include <string_view>
#include <vector>

#include "gasdiff/core.hpp"
#include "gasdiff/fft.hpp"

namespace gasdiff {

enum class Scheme { ForwardEuler, CrankNicolson };

Scheme parse_scheme(std::string_view name);  // "fe" | "cn"
const char* to_string(Scheme scheme);

struct SolverConfig {
  GridSpec grid;
  double k = 0.0;          // time step, nondimensional
  double diffusion = 0.0;  // nondimensional D
  Scheme scheme = Scheme::CrankNicolson;
  long n_max = 0;

  void validate() const;
};

/// Frames u^0, u^s, u^2s, ... of one solve.
struct FieldSeries {
  SolverConfig config;
  int sample_stride = 1;
  std::vector<ScalarField> frames;

  double frame_time(std::size_t i) const {
    return static_cast<double>(i) * sample_stride * config.k;
  }
};

/// lambda_m = -(4/h^2) sum_i sin^2(pi m_i / N)
double laplacian_eigenvalue(std::span<const int> m, const GridSpec& grid);

/// Periodic central-difference Laplacian (OpenMP over rows).
ScalarField apply_discrete_laplacian(const ScalarField& f);
/// Single-threaded reference of apply_discrete_laplacian.
ScalarField apply_discrete_laplacian_serial(const ScalarField& f);

/// Per-mode multiplier of one time step: 1 + kD lambda (FE) or
/// (1 + kD lambda/2) / (1 - kD lambda/2) (CN).
double amplification_factor(Scheme scheme, std::span<const int> m, double k, double diffusion,
                            const GridSpec& grid);

/// Largest stable forward Euler step, h^2 / (2 d D).
double critical_time_step(const GridSpec& grid, double diffusion);

/// Applies a fixed scheme by multiplying discrete Fourier coefficients with
/// a precomputed amplification table.
class SpectralStepper {
 public:
  explicit SpectralStepper(const SolverConfig& config);

  ScalarField step(const ScalarField& f) const;
  /// n steps at once: one transform pair, coefficients scaled by rho^n.
  ScalarField advance(const ScalarField& f, long n) const;
  std::span<const double> amplification() const noexcept { return rho_; }

 private:
  SolverConfig config_;
  FftPlan fft_;
  std::vector<double> rho_;
};

/// One time step through the spectral route.
ScalarField step(const ScalarField& f, const SolverConfig& config);

/// One forward Euler step through the stencil, u + kD lap(u).
ScalarField step_stencil(const ScalarField& f, const SolverConfig& config);

/// Repeated steps with every `sample_stride`-th level kept. Throws
/// InstabilityError when any value is NaN or exceeds 1e6 in magnitude.
FieldSeries solve(const ScalarField& u0, const SolverConfig& config, int sample_stride = 1);

/// 1 on cells whose centre lies in [1/4,3/4)^d, 0 elsewhere.
ScalarField make_patch_initial(const GridSpec& grid);

}  // namespace gasdiff
