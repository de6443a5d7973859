#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gasdiff/particles.hpp"
#include "gasdiff/trajectory.hpp"

namespace gasdiff {

struct LJPairParams {
  double epsilon;  // kcal/mol
  double sigma;    // A
  double r_cut;    // A
};

/// Table values for He-He, He-Ar, Ar-Ar; symmetric in (a, b).
LJPairParams pair_params(Species a, Species b);

/// 4 eps [(sigma/r)^12 - (sigma/r)^6] inside the cutoff, 0 outside.
double lj_potential(double r, const LJPairParams& p);

/// Force on particle i for r_vec = r_i - r_j (i.e. -grad_i V). Throws
/// InputError for |r_vec| < 1e-6 A.
Vec2 lj_force_pair(Vec2 r_vec, const LJPairParams& p);

struct ParticleState {
  std::vector<Vec2> positions;  // wrapped into [0, side)^2
  std::vector<Vec2> unwrapped;
  std::vector<Vec2> velocities;  // A/fs
  std::vector<Species> species;
  double time_fs = 0.0;

  std::size_t size() const noexcept { return positions.size(); }
};

struct MDConfig {
  double dt = 5.0;             // fs
  double temperature = 300.0;  // K
  int n_he = 30000;
  int n_ar = 30000;
  std::uint64_t seed = 1;
  int sample_stride = 1000;

  void validate() const;
};

/// He uniform over the box, Ar uniform over [side/4, 3 side/4]^2, Maxwell-
/// Boltzmann velocities with the centre-of-mass drift removed. A particle
/// landing within 0.8 sigma_ArAr of another is redrawn (100 attempts).
ParticleState init_state(const MDConfig& cfg, const SimBox& box);

struct ForceResult {
  std::vector<Vec2> forces;  // kcal/(mol A)
  double potential = 0.0;    // kcal/mol, each pair counted once
};

/// Cell-list forces, cells of edge >= r_cut, half-shell stencil so every
/// pair is visited once. OpenMP over cells with per-thread accumulators
/// reduced in thread order: bitwise reproducible for a fixed thread count.
ForceResult compute_forces(const ParticleState& state, const SimBox& box);
/// Single-threaded reference of compute_forces (same cells, same pairs).
ForceResult compute_forces_serial(const ParticleState& state, const SimBox& box);

/// Velocity Verlet: half kick, drift, new forces, half kick. `forces` must
/// hold the forces of `state` and is replaced with the new ones. Throws
/// InstabilityError when a speed exceeds 1 A/fs.
void verlet_step(ParticleState& state, ForceResult& forces, const MDConfig& cfg,
                 const SimBox& box);

double kinetic_energy(const ParticleState& state);  // kcal/mol
Vec2 total_momentum(const ParticleState& state);    // g/mol A/fs

struct EnergySample {
  long step = 0;
  double time_fs = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double total() const { return kinetic + potential; }
};

/// Called at step 0 and every cfg.sample_stride steps.
using FrameSink = std::function<void(long step, const ParticleState&, const EnergySample&)>;

void run(const MDConfig& cfg, const SimBox& box, long n_steps, const FrameSink& sink);
void run(ParticleState state, const MDConfig& cfg, const SimBox& box, long n_steps,
         const FrameSink& sink);

struct MdRun {
  Trajectory trajectory;
  std::vector<EnergySample> energy;
};

MdRun run(const MDConfig& cfg, const SimBox& box, long n_steps);

/// Appends a sampled state to a trajectory (unwrapped positions).
void append_frame(Trajectory& traj, long step, const ParticleState& state);
Trajectory empty_trajectory(const MDConfig& cfg, const SimBox& box, const ParticleState& initial);

// ---- mean squared displacement -------------------------------------------

struct MsdPoint {
  double time_fs;
  double msd;  // A^2
};

/// Divisor applied to the MSD slope: 2d (d=2 gives 4) or the literal 6.
enum class MsdConvention { PerDimension, ThreeDimensional };

struct MsdEstimate {
  double diffusion = 0.0;      // A^2/fs
  double r_squared = 0.0;      // of the linear fit in the window
  double loglog_exponent = 0;  // slope of log MSD vs log t: 1 diffusive, 2 ballistic
  bool ballistic = false;      // loglog_exponent > 1.5
  int n_points = 0;

  double cm2_per_s() const { return diffusion * 0.1; }
};

/// MSD of one species relative to frame 0. Wrapped-only trajectories are
/// unwrapped by nearest-image continuity between consecutive frames.
std::vector<MsdPoint> msd_series(const Trajectory& traj, Species species);

/// Least-squares slope of MSD vs t over [t_lo, t_hi], divided per convention.
MsdEstimate fit_msd(std::span<const MsdPoint> series, double t_lo, double t_hi,
                    MsdConvention convention = MsdConvention::PerDimension);

MsdEstimate msd_diffusion_estimate(const Trajectory& traj, Species species, double t_lo,
                                   double t_hi,
                                   MsdConvention convention = MsdConvention::PerDimension);

/// Streaming MSD of one species for runs that are not kept in memory.
class MsdAccumulator {
 public:
  MsdAccumulator(const ParticleState& initial, Species species);
  void add(const ParticleState& state);
  const std::vector<MsdPoint>& series() const noexcept { return series_; }

 private:
  Species species_;
  std::vector<std::size_t> members_;
  std::vector<Vec2> origin_;
  std::vector<MsdPoint> series_;
};

}  // namespace gasdiff
