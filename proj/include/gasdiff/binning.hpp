#pragma once

#include <span>
#include <vector>

#include "gasdiff/core.hpp"
#include "gasdiff/fdsolver.hpp"
#include "gasdiff/particles.hpp"
#include "gasdiff/trajectory.hpp"

namespace gasdiff {

/// Per-cell particle counts on a GridSpec (row-major like ScalarField).
struct CountField {
  GridSpec grid;
  std::vector<int> counts;

  long total() const;
  int max() const;
};

/// Counts particles of `filter` species per cell, j_i = floor(N x_i / side)
/// after wrapping into the box. Boundary ties go to the higher cell.
CountField bin_counts(std::span<const Vec2> positions, std::span<const Species> species,
                      Species filter, const SimBox& box, const GridSpec& grid);

/// bin_counts for every frame, OpenMP over frames.
std::vector<CountField> bin_trajectory(const Trajectory& traj, Species filter, const GridSpec& grid);
std::vector<CountField> bin_trajectory_serial(const Trajectory& traj, Species filter,
                                              const GridSpec& grid);

enum class Normalization { Global, PerFrame };

struct BinnedFrame {
  double time_fs;
  CountField counts;
  ScalarField u;
};

struct BinnedSeries {
  GridSpec grid;
  std::vector<BinnedFrame> frames;
  int normalization_max = 0;  // global max count (largest per-frame max for PerFrame)
  Normalization normalization = Normalization::Global;
};

/// U = counts / max. Global uses one max over every frame and cell. Throws
/// InputError when all counts are zero.
BinnedSeries normalize_series(std::vector<CountField> counts, std::span<const double> times_fs,
                              Normalization normalization = Normalization::Global);

struct FramePair {
  std::size_t index;  // frame n in both series
  double time_nd;
};

/// Checks that the binned frames and the FD frames describe the same
/// physical times (within half an FD step) and pairs them one to one.
std::vector<FramePair> align_series(const BinnedSeries& binned, const FieldSeries& fd,
                                    const UnitScale& scale);

}  // namespace gasdiff
