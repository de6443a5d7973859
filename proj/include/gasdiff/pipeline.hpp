#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "gasdiff/binning.hpp"
#include "gasdiff/estimator.hpp"
#include "gasdiff/md.hpp"

namespace gasdiff {

// ---- binned series on disk -------------------------------------------------

struct BinnedDir {
  BinnedSeries series;
  double box_side_A = 0.0;
};

/// Writes binned.json (N, M, normalization, frame times, box) and, when
/// `frames` is set, counts_NNNN.csv / U_NNNN.csv per frame. Returns the
/// files written.
std::vector<std::string> write_binned_dir(const BinnedSeries& series, double box_side_A,
                                          const std::filesystem::path& dir, bool frames = true,
                                          bool svg = false);
/// Reads the count frames back and re-normalizes them; the stored M must match.
BinnedDir read_binned_dir(const std::filesystem::path& dir);

// ---- end-to-end reproduction ------------------------------------------------

struct ReproduceConfig {
  std::string scale_name;
  MDConfig md;
  SimBox box;
  long n_steps = 0;
  std::vector<int> grid_sizes;
  std::vector<std::uint64_t> seeds;
  UnitScale scale;  // box_length_cm follows the box side
  FitConfig fit;
  InitialCondition init = InitialCondition::Patch;
  Normalization normalization = Normalization::Global;
  bool keep_trajectory = false;
  bool write_frames = false;
};

/// 500 He + 500 Ar, 5e3 A box, 2e4 steps of 5 fs, stride 200, N in {10, 20}.
ReproduceConfig desk_preset();
/// 3e4 He + 3e4 Ar, 5e4 A box, 1e6 steps of 5 fs, stride 1000, 300 K, N in
/// {20, 50, 100}, seeds {1, 2, 3}.
ReproduceConfig paper_preset();
ReproduceConfig preset(const std::string& name);

struct SeedResult {
  std::uint64_t seed = 0;
  MsdEstimate msd;
  double energy_drift = 0.0;  // max |E - E0| / |E0| over samples
  std::vector<FitResult> fits;  // one per grid size
};

struct ReproduceRow {
  int n = 0;
  double d_opt_cm2_s = 0.0;  // mean over seeds
  double d_opt_nd = 0.0;
  double cost = 0.0;
  double ci95_cm2_s = 0.0;
};

struct ReproduceReport {
  std::vector<SeedResult> seeds;
  std::vector<ReproduceRow> rows;
  double msd_cm2_s = 0.0;  // mean over seeds
};

/// MD per seed (binned and MSD-tracked while running), fit per grid size,
/// seed averages. Writes table.csv, per_seed.csv, report.json and per-stage
/// manifests under out_dir. Stage failures are rethrown naming the stage.
ReproduceReport reproduce(const ReproduceConfig& cfg, const std::filesystem::path& out_dir);

nlohmann::json to_json(const FitResult& r);
nlohmann::json to_json(const MsdEstimate& m);

}  // namespace gasdiff
