#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "gasdiff/analytic.hpp"

using namespace gasdiff;
using std::numbers::pi;

namespace {

// Midpoint-rule quadrature of the patch integral along one axis.
std::complex<double> quadrature_1d(int m, int samples = 200000) {
  std::complex<double> sum = 0.0;
  const double dx = 0.5 / samples;
  for (int s = 0; s < samples; ++s) {
    const double x = 0.25 + (s + 0.5) * dx;
    sum += std::exp(std::complex<double>(0.0, -2.0 * pi * m * x));
  }
  return sum * dx;
}

}  // namespace

TEST_CASE("patch Fourier coefficients") {
  CHECK(std::abs(patch_fourier_coefficient({0, 0}) - 0.25) < 1e-15);
  const auto c10 = patch_fourier_coefficient({1, 0});
  CHECK(c10.real() == doctest::Approx(-0.15915494309189535).epsilon(1e-14));
  CHECK(std::abs(c10.imag()) < 1e-15);
  CHECK(std::abs(patch_fourier_coefficient({2, 0})) < 1e-15);
}

TEST_CASE("1D coefficients agree with quadrature") {
  for (int m : {-5, -2, -1, 0, 1, 2, 3, 7}) {
    CAPTURE(m);
    CHECK(std::abs(patch_coefficient_1d(m) - quadrature_1d(m)) < 1e-9);
  }
}

TEST_CASE("mode decay factor") {
  const std::array<int, 2> zero{0, 0}, unit{1, 0}, two{1, 1};
  CHECK(mode_decay_factor(zero, 5.0, 3.0) == 1.0);
  CHECK(mode_decay_factor(unit, 1.0, 1.0 / (4 * pi * pi)) == doctest::Approx(std::exp(-1.0)));
  CHECK(mode_decay_factor(two, 1.0, 100.0) < 1e-300);
}

TEST_CASE("exact solution limits") {
  const std::array<double, 2> centre{0.5, 0.5}, corner{0.05, 0.9};
  CHECK(exact_solution(centre, 1e3, 1.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(exact_solution(corner, 1e3, 1.0) == doctest::Approx(0.25).epsilon(1e-12));
  // Partial sums approach the indicator away from the patch edges.
  const double m16 = exact_solution(centre, 0.0, 1.0, 16);
  const double m256 = exact_solution(centre, 0.0, 1.0, 256);
  CHECK(std::abs(m256 - 1.0) < std::abs(m16 - 1.0));
  CHECK(m256 == doctest::Approx(1.0).epsilon(0.01));
  CHECK(std::abs(exact_solution(corner, 0.0, 1.0, 256)) < 0.01);
}

TEST_CASE("mass of the exact solution stays at the patch area") {
  const GridSpec grid(2, 64);
  for (double t : {0.0, 0.01, 0.1, 1.0}) {
    const auto f = exact_solution_on_grid(grid, t, 3.18e-3);
    CHECK(field_mass(f) == doctest::Approx(0.25).epsilon(1e-3));
  }
}

TEST_CASE("general series matches the separable evaluation") {
  const auto series = patch_series(2, 8);
  const std::array<double, 2> x{0.3, 0.61};
  CHECK(series.evaluate(x, 0.02, 0.1) == doctest::Approx(exact_solution(x, 0.02, 0.1, 8)).epsilon(1e-12));
  CHECK(series.energy(1e4, 1.0) == doctest::Approx(0.0625));
}
