#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "gasdiff/error.hpp"
#include "gasdiff/estimator.hpp"

using namespace gasdiff;
using std::numbers::pi;

namespace {

constexpr double kInterval = 2e-3;

std::vector<ScalarField> synthetic_frames(const GridSpec& g, double d, int frames, const ScalarField& u0) {
  const auto s = solve(u0, {g, kInterval, d, Scheme::CrankNicolson, frames - 1});
  return s.frames;
}

FitProblem synthetic_problem(int n, double d_true, int frames, double noise = 0.0, std::uint64_t seed = 1) {
  const GridSpec g(2, n);
  auto targets = synthetic_frames(g, d_true, frames, make_patch_initial(g));
  if (noise > 0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, noise);
    for (auto& f : targets)
      for (auto& v : f.values()) v += gauss(rng);
  }
  return FitProblem(std::move(targets), kInterval, make_patch_initial(g));
}

ScalarField cosine_mode(const GridSpec& g, int m1, int m2) {
  ScalarField f(g);
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j)
      f.at(i, j) = 1.0 + 0.5 * std::cos(2 * pi * (m1 * g.cell_center(i) + m2 * g.cell_center(j)));
  return f;
}

}  // namespace

TEST_CASE("residuals") {
  const auto p = synthetic_problem(16, 0.3, 4);
  CHECK(p.residual_size() == 4 * 256);
  const auto r = p.residuals(0.3);
  CHECK(r.size() == 4 * 256);
  for (double v : r) CHECK(std::abs(v) < 1e-14);

  const GridSpec g(2, 16);
  auto shifted = synthetic_frames(g, 0.3, 4, make_patch_initial(g));
  for (auto& f : shifted)
    for (auto& v : f.values()) v += 0.05;
  const FitProblem q(shifted, kInterval, make_patch_initial(g));
  for (double v : q.residuals(0.3)) CHECK(v == doctest::Approx(0.05).epsilon(1e-12));
  // (1/N^2) F N^2 delta^2 = F delta^2, no division by the frame count.
  CHECK(q.cost(0.3) == doctest::Approx(4 * 0.05 * 0.05).epsilon(1e-10));
  CHECK(p.cost(0.3) < 1e-28);
  CHECK(p.cost(1.0) >= 0.0);
}

TEST_CASE("numerical Jacobian matches the closed-form spectral derivative") {
  const GridSpec g(2, 16);
  const int m1 = 1, m2 = 2;
  const auto u0 = cosine_mode(g, m1, m2);
  const int frames = 6;
  const double d = 0.2;
  const FitProblem p(synthetic_frames(g, d, frames, u0), kInterval, u0);
  const auto jac = p.jacobian(d);

  const std::array<int, 2> m{m1, m2};
  const double z = kInterval * d * laplacian_eigenvalue(m, g);
  const double rho = (1 + z / 2) / (1 - z / 2);
  const double drho = kInterval * laplacian_eigenvalue(m, g) / ((1 - z / 2) * (1 - z / 2));
  for (int n = 0; n < frames; ++n) {
    const double dn = n == 0 ? 0.0 : n * std::pow(rho, n - 1) * drho;
    for (int i = 0; i < g.n(); ++i)
      for (int j = 0; j < g.n(); ++j) {
        const double expect = dn * (u0.at(i, j) - 1.0);
        const double got = jac[n * g.size() + g.index(i, j)];
        CHECK(got == doctest::Approx(expect).epsilon(1e-6).scale(1e-10));
      }
  }
}

TEST_CASE("Jacobian of a fully decayed solution and of the mass vanishes") {
  const GridSpec g(2, 12);
  // Crank-Nicolson does not damp stiff modes, so the decayed case uses
  // steps small enough that every mode decays.
  const FitProblem decayed(synthetic_frames(g, 0.1, 5, make_patch_initial(g)), 0.5, make_patch_initial(g), 5000);
  const auto flat = decayed.jacobian(5.0);
  for (std::size_t j = g.size(); j < flat.size(); ++j) CHECK(std::abs(flat[j]) < 1e-10);

  const FitProblem p(synthetic_frames(g, 0.1, 5, make_patch_initial(g)), kInterval, make_patch_initial(g));
  const auto jac = p.jacobian(0.1);
  for (std::size_t n = 0; n < 5; ++n) {
    double mass = 0.0, scale = 0.0;
    for (std::size_t j = n * g.size(); j < (n + 1) * g.size(); ++j) {
      mass += jac[j];
      scale += std::abs(jac[j]);
    }
    // Zero up to the round-off of the central difference.
    CHECK(std::abs(mass) <= 1e-6 * scale + 1e-12);
  }
}

TEST_CASE("noiseless fit recovers the generating D") {
  const auto p = synthetic_problem(32, 0.8, 11);
  for (double d0 : {0.08, 8.0}) {
    CAPTURE(d0);
    FitConfig cfg;
    cfg.d0 = d0;
    const auto r = lm_fit(p, cfg);
    CHECK(r.converged);
    CHECK(r.d_opt_nd == doctest::Approx(0.8).epsilon(1e-6));
    for (std::size_t i = 1; i < r.cost_trace.size(); ++i) CHECK(r.cost_trace[i] < r.cost_trace[i - 1]);
  }
}

TEST_CASE("noisy fit recovers D within one percent") {
  const auto p = synthetic_problem(50, 0.8, 11, 0.01, 17);
  FitConfig cfg;
  cfg.d0 = 0.5;
  const auto r = lm_fit(p, cfg, UnitScale{});
  CHECK(r.d_opt_nd == doctest::Approx(0.8).epsilon(0.01));
  CHECK(r.d_opt_cm2_s == doctest::Approx(250 * r.d_opt_nd));
  CHECK(r.ci95_nd > 0.0);
  CHECK(std::abs(r.d_opt_nd - 0.8) < 3 * r.ci95_nd);
}

TEST_CASE("confidence interval") {
  const std::vector<double> jac{1.0, 2.0, 3.0};
  const std::vector<double> zero(3, 0.0);
  CHECK(confidence_interval_95(jac, zero) == 0.0);
  CHECK_THROWS(confidence_interval_95(std::vector<double>(3, 0.0), jac));
  CHECK_THROWS(confidence_interval_95(std::vector<double>{1.0}, std::vector<double>{0.5}));

  auto halfwidth = [](int frames, double noise, std::uint64_t seed) {
    const auto p = synthetic_problem(16, 0.5, frames, noise, seed);
    FitConfig cfg;
    cfg.d0 = 0.5;
    return lm_fit(p, cfg).ci95_nd;
  };
  CHECK(halfwidth(12, 0.01, 3) < halfwidth(6, 0.01, 3));

  double ratio = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) ratio += halfwidth(6, 0.02, seed) / halfwidth(6, 0.01, seed);
  CHECK(ratio / 20 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("cost curve") {
  const auto p = synthetic_problem(16, 0.4, 8);
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(0.1 + 0.02 * i);
  const auto curve = cost_curve(p, grid);
  REQUIRE(curve.size() == grid.size());
  const auto best = std::min_element(curve.begin(), curve.end(), [](auto a, auto b) { return a.second < b.second; });
  CHECK(std::abs(best->first - 0.4) <= 0.01 + 1e-12);

  int sign_changes = 0;
  for (std::size_t i = 2; i < curve.size(); ++i) {
    const bool down_before = curve[i - 1].second < curve[i - 2].second;
    const bool down_now = curve[i].second < curve[i - 1].second;
    if (down_before != down_now) ++sign_changes;
  }
  CHECK(sign_changes == 1);

  FitConfig cfg;
  cfg.d0 = 0.2;
  const auto fit = lm_fit(p, cfg);
  for (const auto& [d, c] : curve) CHECK(c >= fit.final_cost - 1e-12);
}

TEST_CASE("fit configuration and problem validation") {
  FitConfig bad;
  bad.d0 = -1.0;
  CHECK_THROWS_AS(bad.validate(), UsageError);
  const GridSpec g(2, 8);
  CHECK_THROWS_AS(FitProblem({}, 1e-3, make_patch_initial(g)), InputError);
  CHECK_THROWS_AS(FitProblem({ScalarField(GridSpec(2, 9))}, 1e-3, make_patch_initial(g)), InputError);
}

TEST_CASE("fit from a binned series") {
  // Binned frames built from an FD solution so the fit has a known answer.
  const GridSpec g(2, 10);
  const UnitScale scale{5e-4, 1e-9};
  const double d = 0.05;
  const double dt_nd = 5e-3;
  const auto fd = solve(make_patch_initial(g), {g, dt_nd, d, Scheme::CrankNicolson, 6});
  std::vector<CountField> counts;
  std::vector<double> times;
  for (std::size_t n = 0; n < fd.frames.size(); ++n) {
    CountField c{g, {}};
    for (double v : fd.frames[n].values()) c.counts.push_back(static_cast<int>(std::lround(1e5 * v)));
    counts.push_back(c);
    times.push_back(5000.0 * n);
  }
  const auto binned = normalize_series(counts, times);
  const auto p = FitProblem::from_binned(binned, scale);
  CHECK(p.frame_count() == 7);
  CHECK(p.frame_interval() == doctest::Approx(dt_nd));
  FitConfig cfg;
  cfg.d0 = 0.01;
  const auto r = lm_fit(p, cfg, scale);
  CHECK(r.d_opt_nd == doctest::Approx(d).epsilon(1e-3));

  const auto p0 = FitProblem::from_binned(binned, scale, InitialCondition::Frame0);
  CHECK(lm_fit(p0, cfg, scale).d_opt_nd == doctest::Approx(d).epsilon(1e-3));

  times.back() += 1000.0;
  CHECK_THROWS_AS(FitProblem::from_binned(normalize_series(counts, times), scale), InputError);
}
