#include <cmath>

#include <fmt/format.h>

#include "gasdiff/error.hpp"
#include "gasdiff/md.hpp"

namespace gasdiff {

std::vector<MsdPoint> msd_series(const Trajectory& traj, Species species) {
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < traj.species.size(); ++i)
    if (traj.species[i] == species) members.push_back(i);
  if (members.empty())
    throw InputError(fmt::format("trajectory has no {} particles", to_string(species)));

  std::vector<MsdPoint> out;
  if (traj.frames.empty()) return out;
  std::vector<Vec2> origin, current;
  for (std::size_t i : members) origin.push_back(traj.frames.front().positions[i]);
  current = origin;
  for (std::size_t f = 0; f < traj.frames.size(); ++f) {
    const auto& frame = traj.frames[f];
    double sum = 0.0;
    for (std::size_t k = 0; k < members.size(); ++k) {
      const Vec2 p = frame.positions[members[k]];
      if (traj.unwrapped) {
        current[k] = p;
      } else if (f > 0) {
        const Vec2 prev = traj.box.wrap(current[k]);
        current[k] += traj.box.minimum_image(p - prev);
      }
      sum += (current[k] - origin[k]).norm2();
    }
    out.push_back({frame.time_fs, sum / static_cast<double>(members.size())});
  }
  return out;
}

MsdEstimate fit_msd(std::span<const MsdPoint> series, double t_lo, double t_hi,
                    MsdConvention convention) {
  double st = 0, sm = 0, stt = 0, stm = 0, smm = 0;
  double lx = 0, ly = 0, lxx = 0, lxy = 0;
  int n = 0, nl = 0;
  for (const auto& p : series) {
    if (p.time_fs < t_lo || p.time_fs > t_hi) continue;
    ++n;
    st += p.time_fs;
    sm += p.msd;
    stt += p.time_fs * p.time_fs;
    stm += p.time_fs * p.msd;
    smm += p.msd * p.msd;
    if (p.time_fs > 0.0 && p.msd > 0.0) {
      const double x = std::log(p.time_fs), y = std::log(p.msd);
      ++nl;
      lx += x; ly += y; lxx += x * x; lxy += x * y;
    }
  }
  if (n < 3)
    throw InputError(fmt::format("MSD fit window [{}, {}] fs holds {} frames, need >= 3", t_lo, t_hi, n));
  const double sxx = stt - st * st / n;
  const double sxy = stm - st * sm / n;
  const double syy = smm - sm * sm / n;
  if (!(sxx > 0.0)) throw InputError("MSD fit window has no time spread");
  const double slope = sxy / sxx;

  MsdEstimate est;
  est.n_points = n;
  const double divisor = convention == MsdConvention::PerDimension ? 4.0 : 6.0;
  est.diffusion = slope / divisor;
  est.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  if (nl >= 2) {
    const double lsxx = lxx - lx * lx / nl;
    if (lsxx > 0.0) est.loglog_exponent = (lxy - lx * ly / nl) / lsxx;
  }
  est.ballistic = est.loglog_exponent > 1.5;
  return est;
}

MsdEstimate msd_diffusion_estimate(const Trajectory& traj, Species species, double t_lo,
                                   double t_hi, MsdConvention convention) {
  const auto series = msd_series(traj, species);
  return fit_msd(series, t_lo, t_hi, convention);
}

MsdAccumulator::MsdAccumulator(const ParticleState& initial, Species species) : species_(species) {
  for (std::size_t i = 0; i < initial.size(); ++i)
    if (initial.species[i] == species) {
      members_.push_back(i);
      origin_.push_back(initial.unwrapped[i]);
    }
  if (members_.empty())
    throw InputError(fmt::format("state has no {} particles", to_string(species)));
}

void MsdAccumulator::add(const ParticleState& state) {
  double sum = 0.0;
  for (std::size_t k = 0; k < members_.size(); ++k)
    sum += (state.unwrapped[members_[k]] - origin_[k]).norm2();
  series_.push_back({state.time_fs, sum / static_cast<double>(members_.size())});
}

}  // namespace gasdiff
