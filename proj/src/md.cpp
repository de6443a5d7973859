#include "gasdiff/md.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <fmt/format.h>

#include "gasdiff/error.hpp"

namespace gasdiff {

LJPairParams pair_params(Species a, Species b) {
  if (a == Species::He && b == Species::He) return {0.0196, 2.50, kCutoff};
  if (a == Species::Ar && b == Species::Ar) return {0.2498, 3.40, kCutoff};
  return {0.0700, 2.92, kCutoff};
}

double lj_potential(double r, const LJPairParams& p) {
  if (!(r > 0.0)) throw InputError(fmt::format("LJ distance must be positive, got {}", r));
  if (r >= p.r_cut) return 0.0;
  const double s6 = std::pow(p.sigma / r, 6);
  return 4.0 * p.epsilon * (s6 * s6 - s6);
}

namespace {

constexpr double kMinSeparation2 = 1e-12;  // (1e-6 A)^2

// Scalar factor f such that the force on i is f * r_vec; 0 beyond cutoff.
inline double pair_force_factor(double r2, const LJPairParams& p, double& energy) {
  if (r2 >= p.r_cut * p.r_cut) {
    energy = 0.0;
    return 0.0;
  }
  const double inv_r2 = 1.0 / r2;
  const double s2 = p.sigma * p.sigma * inv_r2;
  const double s6 = s2 * s2 * s2;
  energy = 4.0 * p.epsilon * (s6 * s6 - s6);
  return 24.0 * p.epsilon * inv_r2 * (2.0 * s6 * s6 - s6);
}

}  // namespace

Vec2 lj_force_pair(Vec2 r_vec, const LJPairParams& p) {
  const double r2 = r_vec.norm2();
  if (r2 < kMinSeparation2)
    throw InputError(fmt::format("coincident particles (separation {} A)", std::sqrt(r2)));
  double e = 0.0;
  return pair_force_factor(r2, p, e) * r_vec;
}

void MDConfig::validate() const {
  if (!(dt > 0.0)) throw UsageError("MD time step must be positive");
  if (!(temperature > 0.0)) throw UsageError("temperature must be positive");
  if (n_he < 0 || n_ar < 0) throw UsageError("particle counts must be non-negative");
  if (sample_stride < 1) throw UsageError("sample stride must be >= 1");
}

ParticleState init_state(const MDConfig& cfg, const SimBox& box) {
  cfg.validate();
  box.check_cutoff(kCutoff);
  const double min_sep = 0.8 * pair_params(Species::Ar, Species::Ar).sigma;
  const double min_sep2 = min_sep * min_sep;

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Hash of occupied cells (edge min_sep) for the overlap test.
  const auto cells_per_side = static_cast<std::int64_t>(std::max(1.0, std::floor(box.side() / min_sep)));
  const double cell_edge = box.side() / static_cast<double>(cells_per_side);
  std::unordered_map<std::int64_t, std::vector<std::size_t>> occupied;
  auto cell_of = [&](double c) {
    return std::min(cells_per_side - 1, static_cast<std::int64_t>(c / cell_edge));
  };

  ParticleState s;
  const std::size_t total = static_cast<std::size_t>(cfg.n_he) + cfg.n_ar;
  s.positions.reserve(total);
  s.species.reserve(total);

  auto overlaps = [&](Vec2 p) {
    const auto cx = cell_of(p.x), cy = cell_of(p.y);
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto nx = (cx + dx + cells_per_side) % cells_per_side;
        const auto ny = (cy + dy + cells_per_side) % cells_per_side;
        auto it = occupied.find(nx * cells_per_side + ny);
        if (it == occupied.end()) continue;
        for (std::size_t j : it->second)
          if (box.minimum_image(p - s.positions[j]).norm2() < min_sep2) return true;
      }
    return false;
  };

  auto place = [&](Species sp, double lo, double hi) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      const Vec2 p{box.wrap(lo + (hi - lo) * unit(rng)), box.wrap(lo + (hi - lo) * unit(rng))};
      if (overlaps(p)) continue;
      occupied[cell_of(p.x) * cells_per_side + cell_of(p.y)].push_back(s.positions.size());
      s.positions.push_back(p);
      s.species.push_back(sp);
      return;
    }
    throw InputError("could not place a particle without overlap in 100 attempts; box too dense");
  };

  const double side = box.side();
  for (int i = 0; i < cfg.n_he; ++i) place(Species::He, 0.0, side);
  for (int i = 0; i < cfg.n_ar; ++i) place(Species::Ar, 0.25 * side, 0.75 * side);

  s.velocities.resize(total);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec2 momentum;
  double mass_sum = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    const double m = species_mass(s.species[i]);
    const double sd = std::sqrt(kBoltzmann * cfg.temperature / m * kAccelConversion);
    s.velocities[i] = {sd * gauss(rng), sd * gauss(rng)};
    momentum += m * s.velocities[i];
    mass_sum += m;
  }
  if (total > 1) {
    const Vec2 v_com = (1.0 / mass_sum) * momentum;
    for (auto& v : s.velocities) v -= v_com;
  }
  s.unwrapped = s.positions;
  return s;
}

namespace {

struct CellList {
  int n_side = 0;
  std::vector<int> start;          // n_side^2 + 1 offsets into order
  std::vector<std::size_t> order;  // particle indices sorted by cell
};

// Cell edge >= r_cut; the count is capped near sqrt(N) so sparse boxes do
// not pay for millions of empty cells. Returns n_side = 0 when fewer than
// three cells fit, in which case the caller falls back to all pairs.
CellList build_cells(const ParticleState& s, const SimBox& box) {
  CellList cl;
  const auto by_cutoff = static_cast<int>(std::floor(box.side() / kCutoff));
  const auto by_count = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(s.size()))));
  cl.n_side = std::min(by_cutoff, std::max(3, by_count));
  if (cl.n_side < 3) {
    cl.n_side = 0;
    return cl;
  }
  const int nc = cl.n_side * cl.n_side;
  const double scale = cl.n_side / box.side();
  std::vector<int> cell(s.size());
  cl.start.assign(static_cast<std::size_t>(nc) + 1, 0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const int cx = std::min(cl.n_side - 1, static_cast<int>(s.positions[i].x * scale));
    const int cy = std::min(cl.n_side - 1, static_cast<int>(s.positions[i].y * scale));
    cell[i] = cx * cl.n_side + cy;
    ++cl.start[cell[i] + 1];
  }
  for (int c = 0; c < nc; ++c) cl.start[c + 1] += cl.start[c];
  cl.order.resize(s.size());
  std::vector<int> fill(cl.start.begin(), cl.start.end() - 1);
  for (std::size_t i = 0; i < s.size(); ++i) cl.order[fill[cell[i]]++] = i;
  return cl;
}

// Accumulates one pair into f; returns false on coincident particles.
inline bool add_pair(const ParticleState& s, const SimBox& box, std::size_t i, std::size_t j,
                     Vec2* f, double& pot) {
  const Vec2 d = box.minimum_image(s.positions[i] - s.positions[j]);
  const double r2 = d.norm2();
  if (r2 < kMinSeparation2) return false;
  const auto p = pair_params(s.species[i], s.species[j]);
  double e = 0.0;
  const double k = pair_force_factor(r2, p, e);
  if (k != 0.0 || e != 0.0) {
    f[i] += k * d;
    f[j] -= k * d;
    pot += e;
  }
  return true;
}

// Half-shell neighbours: self, E, NE, N, NW.
constexpr int kShell[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};

template <bool Parallel>
ForceResult forces_impl(const ParticleState& s, const SimBox& box) {
  const std::size_t np = s.size();
  ForceResult out;
  out.forces.assign(np, Vec2{});
  if (np < 2) return out;

  const CellList cl = build_cells(s, box);
  bool coincident = false;

  if (cl.n_side == 0) {
    double pot = 0.0;
    for (std::size_t i = 0; i < np; ++i)
      for (std::size_t j = i + 1; j < np; ++j)
        if (!add_pair(s, box, i, j, out.forces.data(), pot)) coincident = true;
    out.potential = pot;
  } else {
    int n_threads = 1;
#ifdef _OPENMP
    if constexpr (Parallel) n_threads = omp_get_max_threads();
#endif
    std::vector<std::vector<Vec2>> partial(static_cast<std::size_t>(n_threads));
    std::vector<double> pot(static_cast<std::size_t>(n_threads), 0.0);
    const int n_side = cl.n_side;
    const int nc = n_side * n_side;

#pragma omp parallel num_threads(n_threads) if (Parallel) reduction(|| : coincident)
    {
      int tid = 0;
#ifdef _OPENMP
      if constexpr (Parallel) tid = omp_get_thread_num();
#endif
      auto& f = partial[static_cast<std::size_t>(tid)];
      f.assign(np, Vec2{});
      double e = 0.0;
#pragma omp for schedule(static)
      for (int c = 0; c < nc; ++c) {
        const int cx = c / n_side, cy = c % n_side;
        const int b0 = cl.start[c], b1 = cl.start[c + 1];
        for (int a = b0; a < b1; ++a)
          for (int b = a + 1; b < b1; ++b)
            if (!add_pair(s, box, cl.order[a], cl.order[b], f.data(), e)) coincident = true;
        for (const auto& off : kShell) {
          const int nx = (cx + off[0] + n_side) % n_side;
          const int ny = (cy + off[1] + n_side) % n_side;
          const int nb = nx * n_side + ny;
          for (int a = b0; a < b1; ++a)
            for (int b = cl.start[nb]; b < cl.start[nb + 1]; ++b)
              if (!add_pair(s, box, cl.order[a], cl.order[b], f.data(), e)) coincident = true;
        }
      }
      pot[static_cast<std::size_t>(tid)] = e;
    }
    for (int t = 0; t < n_threads; ++t) {
      const auto& f = partial[static_cast<std::size_t>(t)];
      if (f.empty()) continue;
      for (std::size_t i = 0; i < np; ++i) out.forces[i] += f[i];
      out.potential += pot[static_cast<std::size_t>(t)];
    }
  }
  if (coincident) throw InputError("coincident particles (separation < 1e-6 A)");
  return out;
}

}  // namespace

ForceResult compute_forces(const ParticleState& state, const SimBox& box) {
  return forces_impl<true>(state, box);
}

ForceResult compute_forces_serial(const ParticleState& state, const SimBox& box) {
  return forces_impl<false>(state, box);
}

void verlet_step(ParticleState& s, ForceResult& forces, const MDConfig& cfg, const SimBox& box) {
  const double dt = cfg.dt;
  const std::size_t np = s.size();
  for (std::size_t i = 0; i < np; ++i) {
    const double a = 0.5 * dt * kAccelConversion / species_mass(s.species[i]);
    s.velocities[i] += a * forces.forces[i];
    const Vec2 dx = dt * s.velocities[i];
    s.unwrapped[i] += dx;
    s.positions[i] = box.wrap(s.positions[i] + dx);
  }
  forces = compute_forces(s, box);
  double vmax2 = 0.0;
  for (std::size_t i = 0; i < np; ++i) {
    const double a = 0.5 * dt * kAccelConversion / species_mass(s.species[i]);
    s.velocities[i] += a * forces.forces[i];
    vmax2 = std::max(vmax2, s.velocities[i].norm2());
  }
  s.time_fs += dt;
  if (vmax2 > 1.0)
    throw InstabilityError(fmt::format(
        "particle speed {:.3g} A/fs exceeds 1 A/fs at t = {} fs; reduce dt", std::sqrt(vmax2),
        s.time_fs));
}

double kinetic_energy(const ParticleState& s) {
  double ke = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    ke += 0.5 * species_mass(s.species[i]) * s.velocities[i].norm2();
  return ke / kAccelConversion;
}

Vec2 total_momentum(const ParticleState& s) {
  Vec2 p;
  for (std::size_t i = 0; i < s.size(); ++i) p += species_mass(s.species[i]) * s.velocities[i];
  return p;
}

void run(ParticleState state, const MDConfig& cfg, const SimBox& box, long n_steps,
         const FrameSink& sink) {
  cfg.validate();
  if (n_steps < 0) throw UsageError("step count must be non-negative");
  ForceResult forces = compute_forces(state, box);
  auto sample = [&](long step) {
    if (!sink) return;
    sink(step, state, {step, state.time_fs, kinetic_energy(state), forces.potential});
  };
  sample(0);
  for (long step = 1; step <= n_steps; ++step) {
    verlet_step(state, forces, cfg, box);
    if (step % cfg.sample_stride == 0) sample(step);
  }
}

void run(const MDConfig& cfg, const SimBox& box, long n_steps, const FrameSink& sink) {
  run(init_state(cfg, box), cfg, box, n_steps, sink);
}

Trajectory empty_trajectory(const MDConfig& cfg, const SimBox& box, const ParticleState& initial) {
  Trajectory t;
  t.box = box;
  t.dt_fs = cfg.dt;
  t.seed = cfg.seed;
  t.species = initial.species;
  t.ids.resize(initial.size());
  for (std::size_t i = 0; i < t.ids.size(); ++i) t.ids[i] = static_cast<long>(i) + 1;
  t.has_velocities = true;
  t.unwrapped = true;
  return t;
}

void append_frame(Trajectory& traj, long step, const ParticleState& state) {
  traj.frames.push_back({step, state.time_fs, state.unwrapped, state.velocities});
}

MdRun run(const MDConfig& cfg, const SimBox& box, long n_steps) {
  ParticleState initial = init_state(cfg, box);
  MdRun out{empty_trajectory(cfg, box, initial), {}};
  run(std::move(initial), cfg, box, n_steps,
      [&](long step, const ParticleState& s, const EnergySample& e) {
        append_frame(out.trajectory, step, s);
        out.energy.push_back(e);
      });
  return out;
}

}  // namespace gasdiff
