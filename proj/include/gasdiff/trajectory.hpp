#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "gasdiff/particles.hpp"

namespace gasdiff {

struct TrajectoryFrame {
  long timestep = 0;
  double time_fs = 0.0;
  std::vector<Vec2> positions;   // unwrapped when Trajectory::unwrapped
  std::vector<Vec2> velocities;  // zeros when !Trajectory::has_velocities
};

/// Sampled particle history. Particle identity (id, species) is fixed across
/// frames; frame rows are stored in particle order.
struct Trajectory {
  SimBox box;
  std::string units = "real";
  double dt_fs = 0.0;
  std::uint64_t seed = 0;
  std::vector<long> ids;
  std::vector<Species> species;
  bool has_velocities = true;
  bool unwrapped = true;
  std::vector<TrajectoryFrame> frames;

  std::size_t particle_count() const noexcept { return ids.size(); }
  std::size_t count(Species s) const;
  /// Strictly increasing timesteps, constant particle count.
  void validate() const;
};

/// Native line-oriented format, see docs/trajectory-format.md.
void write_native(std::ostream& out, const Trajectory& traj);
void write_native(const std::string& path, const Trajectory& traj);
Trajectory read_native(std::istream& in);
Trajectory read_native(const std::string& path);

using TypeMap = std::map<int, Species>;
/// LAMMPS type 1 -> He, 2 -> Ar.
TypeMap default_type_map();
/// Parses "1=He,2=Ar".
TypeMap parse_type_map(const std::string& spec);

/// Text dump reader for orthogonal boxes. Columns are located through the
/// ITEM: ATOMS header; accepts x/y, xs/ys, xu/yu, xsu/ysu and image flags
/// ix/iy. Frame times are timestep * dt_fs. Throws ParseError with the
/// offending line.
Trajectory parse_lammps_dump(std::istream& in, const TypeMap& types, double dt_fs = 5.0);
Trajectory parse_lammps_dump(const std::string& path, const TypeMap& types, double dt_fs = 5.0);

/// Writes `id type xu yu [vx vy]` (or `x y` for wrapped data) frames.
void write_lammps_dump(std::ostream& out, const Trajectory& traj, const TypeMap& types);

}  // namespace gasdiff
