#include "gasdiff/binning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "gasdiff/error.hpp"

namespace gasdiff {

long CountField::total() const { return std::accumulate(counts.begin(), counts.end(), 0L); }

int CountField::max() const {
  return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

CountField bin_counts(std::span<const Vec2> positions, std::span<const Species> species,
                      Species filter, const SimBox& box, const GridSpec& grid) {
  if (grid.dim() != 2) throw UsageError("binning needs a 2D grid");
  if (positions.size() != species.size()) throw InputError("positions and species differ in length");
  CountField out{grid, std::vector<int>(grid.size(), 0)};
  const int n = grid.n();
  const double scale = n / box.side();
  auto cell = [&](double x) {
    int j = static_cast<int>(std::floor(box.wrap(x) * scale));
    return j >= n ? j - n : j;
  };
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (species[i] != filter) continue;
    ++out.counts[grid.index(cell(positions[i].x), cell(positions[i].y))];
  }
  return out;
}

namespace {

template <bool Parallel>
std::vector<CountField> bin_frames(const Trajectory& traj, Species filter, const GridSpec& grid) {
  const auto nf = static_cast<long>(traj.frames.size());
  std::vector<CountField> out(traj.frames.size(), CountField{grid, {}});
#pragma omp parallel for schedule(dynamic) if (Parallel)
  for (long f = 0; f < nf; ++f)
    out[f] = bin_counts(traj.frames[f].positions, traj.species, filter, traj.box, grid);
  return out;
}

}  // namespace

std::vector<CountField> bin_trajectory(const Trajectory& traj, Species filter, const GridSpec& grid) {
  return bin_frames<true>(traj, filter, grid);
}

std::vector<CountField> bin_trajectory_serial(const Trajectory& traj, Species filter,
                                              const GridSpec& grid) {
  return bin_frames<false>(traj, filter, grid);
}

BinnedSeries normalize_series(std::vector<CountField> counts, std::span<const double> times_fs,
                              Normalization normalization) {
  if (counts.empty()) throw InputError("no frames to normalize");
  if (counts.size() != times_fs.size()) throw InputError("frame and time counts differ");
  const GridSpec grid = counts.front().grid;
  int global_max = 0;
  for (const auto& c : counts) {
    if (!(c.grid == grid)) throw InputError("count frames use different grids");
    global_max = std::max(global_max, c.max());
  }
  if (global_max == 0) throw InputError("all binned counts are zero; nothing to normalize");

  BinnedSeries out{grid, {}, global_max, normalization};
  out.frames.reserve(counts.size());
  for (std::size_t f = 0; f < counts.size(); ++f) {
    const int m = normalization == Normalization::Global ? global_max : counts[f].max();
    ScalarField u(grid);
    if (m > 0)
      for (std::size_t j = 0; j < grid.size(); ++j)
        u[j] = static_cast<double>(counts[f].counts[j]) / m;
    out.frames.push_back({times_fs[f], std::move(counts[f]), std::move(u)});
  }
  return out;
}

std::vector<FramePair> align_series(const BinnedSeries& binned, const FieldSeries& fd,
                                    const UnitScale& scale) {
  if (binned.frames.size() != fd.frames.size())
    throw InputError(fmt::format("cannot align {} binned frames with {} FD frames",
                                 binned.frames.size(), fd.frames.size()));
  if (!(binned.grid == fd.config.grid))
    throw InputError(fmt::format("binned grid N={} differs from FD grid N={}", binned.grid.n(),
                                 fd.config.grid.n()));
  const double t0 = binned.frames.front().time_fs;
  std::vector<FramePair> pairs;
  pairs.reserve(binned.frames.size());
  for (std::size_t n = 0; n < binned.frames.size(); ++n) {
    const double t_md = scale.fs_to_nd_time(binned.frames[n].time_fs - t0);
    const double t_fd = fd.frame_time(n);
    if (std::abs(t_md - t_fd) > 0.5 * fd.config.k)
      throw InputError(fmt::format("frame {}: MD time {} and FD time {} differ by more than k/2", n,
                                   t_md, t_fd));
    pairs.push_back({n, t_fd});
  }
  return pairs;
}

}  // namespace gasdiff
