#include "gasdiff/fdsolver.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "gasdiff/error.hpp"

namespace gasdiff {

Scheme parse_scheme(std::string_view name) {
  if (name == "fe") return Scheme::ForwardEuler;
  if (name == "cn") return Scheme::CrankNicolson;
  throw UsageError(fmt::format("unknown scheme '{}', expected fe or cn", name));
}

const char* to_string(Scheme scheme) {
  return scheme == Scheme::ForwardEuler ? "fe" : "cn";
}

void SolverConfig::validate() const {
  if (!(k > 0.0)) throw UsageError(fmt::format("time step must be positive, got {}", k));
  if (!(diffusion > 0.0)) throw UsageError(fmt::format("D must be positive, got {}", diffusion));
  if (n_max < 0) throw UsageError("step count must be non-negative");
}

double laplacian_eigenvalue(std::span<const int> m, const GridSpec& grid) {
  const double n = grid.n();
  double s = 0.0;
  for (int mi : m) {
    const double sn = std::sin(std::numbers::pi * mi / n);
    s += sn * sn;
  }
  return -4.0 * n * n * s;
}

namespace {

template <bool Parallel>
ScalarField laplacian_impl(const ScalarField& f) {
  const auto& g = f.grid();
  const int n = g.n();
  const double inv_h2 = static_cast<double>(n) * n;
  ScalarField out(g);
  if (g.dim() == 1) {
    for (int j = 0; j < n; ++j) {
      const int jm = j == 0 ? n - 1 : j - 1;
      const int jp = j == n - 1 ? 0 : j + 1;
      out.at(j) = inv_h2 * (f.at(jp) - 2.0 * f.at(j) + f.at(jm));
    }
    return out;
  }
  const double* u = f.values().data();
  double* o = out.values().data();
#pragma omp parallel for schedule(static) if (Parallel)
  for (int j1 = 0; j1 < n; ++j1) {
    const int up = j1 == n - 1 ? 0 : j1 + 1;
    const int dn = j1 == 0 ? n - 1 : j1 - 1;
    const double* row = u + static_cast<std::size_t>(j1) * n;
    const double* row_up = u + static_cast<std::size_t>(up) * n;
    const double* row_dn = u + static_cast<std::size_t>(dn) * n;
    double* orow = o + static_cast<std::size_t>(j1) * n;
    for (int j2 = 0; j2 < n; ++j2) {
      const int l = j2 == 0 ? n - 1 : j2 - 1;
      const int r = j2 == n - 1 ? 0 : j2 + 1;
      orow[j2] = inv_h2 * (row_up[j2] + row_dn[j2] + row[l] + row[r] - 4.0 * row[j2]);
    }
  }
  return out;
}

}  // namespace

ScalarField apply_discrete_laplacian(const ScalarField& f) { return laplacian_impl<true>(f); }

ScalarField apply_discrete_laplacian_serial(const ScalarField& f) {
  return laplacian_impl<false>(f);
}

double amplification_factor(Scheme scheme, std::span<const int> m, double k, double diffusion,
                            const GridSpec& grid) {
  const double z = k * diffusion * laplacian_eigenvalue(m, grid);
  if (scheme == Scheme::ForwardEuler) return 1.0 + z;
  return (1.0 + 0.5 * z) / (1.0 - 0.5 * z);
}

double critical_time_step(const GridSpec& grid, double diffusion) {
  if (!(diffusion > 0.0)) throw UsageError("D must be positive");
  const double h = grid.h();
  return h * h / (2.0 * grid.dim() * diffusion);
}

SpectralStepper::SpectralStepper(const SolverConfig& config)
    : config_(config), fft_(config.grid), rho_(config.grid.size()) {
  config_.validate();
  const auto& g = config_.grid;
  if (g.dim() == 1) {
    for (int m = 0; m < g.n(); ++m) {
      const int mm[1] = {m};
      rho_[m] = amplification_factor(config_.scheme, mm, config_.k, config_.diffusion, g);
    }
  } else {
    for (int m1 = 0; m1 < g.n(); ++m1)
      for (int m2 = 0; m2 < g.n(); ++m2) {
        const int mm[2] = {m1, m2};
        rho_[g.index(m1, m2)] = amplification_factor(config_.scheme, mm, config_.k, config_.diffusion, g);
      }
  }
}

ScalarField SpectralStepper::step(const ScalarField& f) const { return advance(f, 1); }

ScalarField SpectralStepper::advance(const ScalarField& f, long n) const {
  if (!(f.grid() == config_.grid)) throw UsageError("field grid does not match solver grid");
  auto spec = fft_.forward_real(f);
  for (std::size_t i = 0; i < spec.size(); ++i)
    spec[i] *= n == 1 ? rho_[i] : std::pow(rho_[i], static_cast<double>(n));
  return fft_.inverse_real(spec);
}

ScalarField step(const ScalarField& f, const SolverConfig& config) {
  return SpectralStepper(config).step(f);
}

ScalarField step_stencil(const ScalarField& f, const SolverConfig& config) {
  if (config.scheme != Scheme::ForwardEuler)
    throw UsageError("the stencil route only implements forward Euler");
  config.validate();
  ScalarField out = apply_discrete_laplacian(f);
  const double kd = config.k * config.diffusion;
  auto u = f.values();
  auto o = out.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = u[i] + kd * o[i];
  return out;
}

namespace {

void check_stable(const ScalarField& f, long n) {
  for (double v : f.values()) {
    if (!std::isfinite(v) || std::abs(v) > 1e6)
      throw InstabilityError(fmt::format(
          "solution blew up at step {} (|u| > 1e6 or NaN); reduce k below the critical step", n));
  }
}

}  // namespace

FieldSeries solve(const ScalarField& u0, const SolverConfig& config, int sample_stride) {
  if (sample_stride < 1) throw UsageError("sample stride must be >= 1");
  SpectralStepper stepper(config);
  FieldSeries series{config, sample_stride, {}};
  series.frames.reserve(static_cast<std::size_t>(config.n_max / sample_stride) + 1);
  series.frames.push_back(u0);
  ScalarField u = u0;
  for (long n = 1; n <= config.n_max; ++n) {
    u = stepper.step(u);
    check_stable(u, n);
    if (n % sample_stride == 0) series.frames.push_back(u);
  }
  return series;
}

ScalarField make_patch_initial(const GridSpec& grid) {
  ScalarField f(grid);
  auto inside = [&](int j) {
    const double x = grid.cell_center(j);
    return x >= 0.25 && x < 0.75;
  };
  if (grid.dim() == 1) {
    for (int j = 0; j < grid.n(); ++j) f.at(j) = inside(j) ? 1.0 : 0.0;
  } else {
    for (int j1 = 0; j1 < grid.n(); ++j1)
      for (int j2 = 0; j2 < grid.n(); ++j2) f.at(j1, j2) = (inside(j1) && inside(j2)) ? 1.0 : 0.0;
  }
  return f;
}

}  // namespace gasdiff
