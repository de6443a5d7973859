#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>

#include "gasdiff/binning.hpp"
#include "gasdiff/error.hpp"
#include "gasdiff/md.hpp"

using namespace gasdiff;

namespace {

CountField peak_field(const GridSpec& g, int peak) {
  CountField c{g, std::vector<int>(g.size(), 0)};
  c.counts[0] = peak;
  c.counts[1] = 1;
  return c;
}

}  // namespace

TEST_CASE("single particle lands in the expected cell") {
  const SimBox box(100.0);
  const std::vector<Vec2> pos{{30.0, 30.0}};
  const std::vector<Species> sp{Species::Ar};
  const auto c = bin_counts(pos, sp, Species::Ar, box, GridSpec(2, 2));
  CHECK(c.counts == std::vector<int>{1, 0, 0, 0});
}

TEST_CASE("species filter and wrapping") {
  const SimBox box(100.0);
  const std::vector<Vec2> pos{{30.0, 30.0}, {-10.0, 130.0}, {100.0, 50.0}, {70.0, 70.0}};
  const std::vector<Species> sp{Species::Ar, Species::Ar, Species::Ar, Species::He};
  const auto c = bin_counts(pos, sp, Species::Ar, box, GridSpec(2, 2));
  // (-10, 130) wraps to (90, 30): cell (1, 0); x = side wraps to 0: cell (0, 1).
  CHECK(c.counts == std::vector<int>{1, 1, 1, 0});
  CHECK(c.total() == 3);
  const auto he = bin_counts(pos, sp, Species::He, box, GridSpec(2, 2));
  CHECK(he.counts == std::vector<int>{0, 0, 0, 1});
}

TEST_CASE("one particle per cell centre") {
  const int n = 7;
  const SimBox box(350.0);
  const GridSpec g(2, n);
  std::vector<Vec2> pos;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) pos.push_back({g.cell_center(i) * box.side(), g.cell_center(j) * box.side()});
  const std::vector<Species> sp(pos.size(), Species::Ar);
  const auto c = bin_counts(pos, sp, Species::Ar, box, g);
  for (int v : c.counts) CHECK(v == 1);
}

TEST_CASE("counts partition the argon of every frame") {
  MDConfig cfg;
  cfg.n_he = 200;
  cfg.n_ar = 300;
  cfg.sample_stride = 50;
  const auto r = run(cfg, SimBox(3000.0), 200);
  for (int n : {2, 3, 10, 20}) {
    const auto frames = bin_trajectory(r.trajectory, Species::Ar, GridSpec(2, n));
    const auto serial = bin_trajectory_serial(r.trajectory, Species::Ar, GridSpec(2, n));
    REQUIRE(frames.size() == r.trajectory.frames.size());
    for (std::size_t f = 0; f < frames.size(); ++f) {
      CHECK(frames[f].total() == 300);
      CHECK(frames[f].counts == serial[f].counts);
    }
  }
}

TEST_CASE("global max normalization") {
  const GridSpec g(2, 4);
  const std::vector<double> times{0.0, 5000.0};
  const auto s = normalize_series({peak_field(g, 10), peak_field(g, 4)}, times);
  CHECK(s.normalization_max == 10);
  CHECK(s.frames[0].u[0] == 1.0);
  CHECK(s.frames[1].u[0] == 0.4);
  CHECK(s.frames[1].u[1] == 0.1);
  for (const auto& f : s.frames)
    for (double v : f.u.values()) CHECK((v >= 0.0 && v <= 1.0));

  const auto single = normalize_series({peak_field(g, 8)}, std::vector<double>{0.0});
  CHECK(single.frames[0].u[0] == 1.0);
}

TEST_CASE("per-frame normalization") {
  const GridSpec g(2, 4);
  const auto s = normalize_series({peak_field(g, 10), peak_field(g, 4)}, std::vector<double>{0.0, 1.0},
                                  Normalization::PerFrame);
  CHECK(s.frames[1].u[0] == 1.0);
  CHECK(s.frames[1].u[1] == 0.25);
}

TEST_CASE("all-zero counts cannot be normalized") {
  const GridSpec g(2, 3);
  CHECK_THROWS_AS(normalize_series({CountField{g, std::vector<int>(9, 0)}}, std::vector<double>{0.0}), InputError);
}

TEST_CASE("MD frames pair one to one with FD steps") {
  // Stride 1000 at 5 fs is 5 ps between frames; with a 1 ns time unit that
  // is the FD step k = 5e-3.
  const GridSpec g(2, 4);
  std::vector<CountField> counts;
  std::vector<double> times;
  for (int n = 0; n < 5; ++n) {
    counts.push_back(peak_field(g, 3));
    times.push_back(5000.0 * n);
  }
  const auto binned = normalize_series(counts, times);
  const UnitScale scale{5e-4, 1e-9};
  const auto fd = solve(ScalarField(g, 0.1), {g, 5e-3, 0.1, Scheme::CrankNicolson, 4});
  const auto pairs = align_series(binned, fd, scale);
  REQUIRE(pairs.size() == 5);
  for (std::size_t n = 0; n < 5; ++n) {
    CHECK(pairs[n].index == n);
    CHECK(pairs[n].time_nd == doctest::Approx(5e-3 * n));
  }

  const auto one_b = normalize_series({peak_field(g, 3)}, std::vector<double>{0.0});
  const auto one_f = solve(ScalarField(g, 0.1), {g, 5e-3, 0.1, Scheme::CrankNicolson, 0});
  CHECK(align_series(one_b, one_f, scale).size() == 1);
}

TEST_CASE("mismatched frame counts name both counts") {
  const GridSpec g(2, 4);
  const auto binned = normalize_series({peak_field(g, 3), peak_field(g, 3), peak_field(g, 3)},
                                       std::vector<double>{0.0, 5000.0, 10000.0});
  const auto fd = solve(ScalarField(g, 0.1), {g, 5e-3, 0.1, Scheme::CrankNicolson, 1});
  try {
    align_series(binned, fd, UnitScale{});
    FAIL("expected an error");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find('3') != std::string::npos);
    CHECK(msg.find('2') != std::string::npos);
  }
  const auto fd_other_grid = solve(ScalarField(GridSpec(2, 5), 0.1), {GridSpec(2, 5), 5e-3, 0.1, Scheme::CrankNicolson, 2});
  CHECK_THROWS_AS(align_series(binned, fd_other_grid, UnitScale{}), InputError);
  const auto fd_wrong_k = solve(ScalarField(g, 0.1), {g, 2e-3, 0.1, Scheme::CrankNicolson, 2});
  CHECK_THROWS_AS(align_series(binned, fd_wrong_k, UnitScale{}), InputError);
}
