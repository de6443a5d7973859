#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "gasdiff/core.hpp"

namespace gasdiff {

/// Truncation order per axis used when none is given.
inline constexpr int kDefaultTruncation = 64;

/// exp(-4 pi^2 |m|^2 D t) for a wavenumber vector m.
double mode_decay_factor(std::span<const int> m, double diffusion, double t);

/// Integral over [1/4, 3/4] of exp(-2 pi i m x) dx.
std::complex<double> patch_coefficient_1d(int m);

/// Fourier coefficient of the indicator of [1/4,3/4]^2 at wavenumber m.
std::complex<double> patch_fourier_coefficient(std::array<int, 2> m);

struct FourierMode {
  std::array<int, 2> m{};
  std::complex<double> coeff0;
};

/// Truncated Fourier series solution of the periodic diffusion equation for
/// an arbitrary list of initial coefficients. Evaluation is O(#modes).
class FourierSeries {
 public:
  FourierSeries(int dim, std::vector<FourierMode> modes);

  /// Real part of sum_m c_m exp(-4 pi^2 |m|^2 D t) exp(2 pi i m.x).
  double evaluate(std::span<const double> x, double t, double diffusion) const;
  /// Parseval energy sum_m |c_m(t)|^2 of the truncated series.
  double energy(double t, double diffusion) const;

  int dim() const noexcept { return dim_; }
  const std::vector<FourierMode>& modes() const noexcept { return modes_; }

 private:
  int dim_;
  std::vector<FourierMode> modes_;
};

/// All modes |m_i| <= order of the square-patch indicator.
FourierSeries patch_series(int dim, int order = kDefaultTruncation);

/// Patch solution at x, using the product structure of the patch
/// coefficients (one 1D series per axis).
double exact_solution(std::span<const double> x, double t, double diffusion,
                      int order = kDefaultTruncation);

/// exact_solution sampled at the cell centres of `grid`.
ScalarField exact_solution_on_grid(const GridSpec& grid, double t, double diffusion,
                                   int order = kDefaultTruncation);

}  // namespace gasdiff
