#include "gasdiff/analytic.hpp"

#include <cmath>
#include <numbers>

#include "gasdiff/error.hpp"

namespace gasdiff {

using std::numbers::pi;

double mode_decay_factor(std::span<const int> m, double diffusion, double t) {
  double m2 = 0.0;
  for (int mi : m) m2 += static_cast<double>(mi) * mi;
  return std::exp(-4.0 * pi * pi * m2 * diffusion * t);
}

std::complex<double> patch_coefficient_1d(int m) {
  if (m == 0) return {0.5, 0.0};
  // exp(-i pi m) sin(pi m / 2) / (pi m); the phase is +-1 and sin vanishes
  // for even m, so the coefficient is real.
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  const double s = (m % 2 == 0) ? 0.0 : ((((m % 4) + 4) % 4 == 1) ? 1.0 : -1.0);
  return {sign * s / (pi * m), 0.0};
}

std::complex<double> patch_fourier_coefficient(std::array<int, 2> m) {
  return patch_coefficient_1d(m[0]) * patch_coefficient_1d(m[1]);
}

FourierSeries::FourierSeries(int dim, std::vector<FourierMode> modes)
    : dim_(dim), modes_(std::move(modes)) {
  if (dim != 1 && dim != 2) throw UsageError("Fourier series dimension must be 1 or 2");
}

double FourierSeries::evaluate(std::span<const double> x, double t, double diffusion) const {
  double sum = 0.0;
  for (const auto& mode : modes_) {
    double phase = mode.m[0] * x[0];
    if (dim_ == 2) phase += mode.m[1] * x[1];
    const auto basis = std::polar(1.0, 2.0 * pi * phase);
    const std::span<const int> m(mode.m.data(), static_cast<std::size_t>(dim_));
    sum += (mode.coeff0 * basis).real() * mode_decay_factor(m, diffusion, t);
  }
  return sum;
}

double FourierSeries::energy(double t, double diffusion) const {
  double e = 0.0;
  for (const auto& mode : modes_) {
    const std::span<const int> m(mode.m.data(), static_cast<std::size_t>(dim_));
    const double f = mode_decay_factor(m, diffusion, t);
    e += std::norm(mode.coeff0) * f * f;
  }
  return e;
}

FourierSeries patch_series(int dim, int order) {
  if (order < 1) throw UsageError("truncation order must be >= 1");
  std::vector<FourierMode> modes;
  const int m2_lo = dim == 2 ? -order : 0;
  const int m2_hi = dim == 2 ? order : 0;
  for (int m1 = -order; m1 <= order; ++m1) {
    for (int m2 = m2_lo; m2 <= m2_hi; ++m2) {
      const auto c = dim == 2 ? patch_fourier_coefficient({m1, m2}) : patch_coefficient_1d(m1);
      if (c != std::complex<double>{}) modes.push_back({{m1, m2}, c});
    }
  }
  return FourierSeries(dim, std::move(modes));
}

namespace {

// Symmetric 1D partial sum of the [1/4,3/4] indicator series.
double patch_axis(double x, double t, double diffusion, int order) {
  double sum = 0.5;
  for (int m = 1; m <= order; ++m) {
    const double c = patch_coefficient_1d(m).real();
    if (c == 0.0) continue;
    const int mm[1] = {m};
    sum += 2.0 * c * std::cos(2.0 * pi * m * x) * mode_decay_factor(mm, diffusion, t);
  }
  return sum;
}

}  // namespace

double exact_solution(std::span<const double> x, double t, double diffusion, int order) {
  if (order < 1) throw UsageError("truncation order must be >= 1");
  double u = 1.0;
  for (double xi : x) u *= patch_axis(xi, t, diffusion, order);
  return u;
}

ScalarField exact_solution_on_grid(const GridSpec& grid, double t, double diffusion, int order) {
  std::vector<double> axis(static_cast<std::size_t>(grid.n()));
  for (int j = 0; j < grid.n(); ++j) {
    const double x = grid.cell_center(j);
    axis[j] = exact_solution(std::span<const double>(&x, 1), t, diffusion, order);
  }
  ScalarField f(grid);
  if (grid.dim() == 1) {
    for (int j = 0; j < grid.n(); ++j) f.at(j) = axis[j];
  } else {
    for (int j1 = 0; j1 < grid.n(); ++j1)
      for (int j2 = 0; j2 < grid.n(); ++j2) f.at(j1, j2) = axis[j1] * axis[j2];
  }
  return f;
}

}  // namespace gasdiff
