#include "cli.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gasdiff/analytic.hpp"
#include "gasdiff/binning.hpp"
#include "gasdiff/error.hpp"
#include "gasdiff/estimator.hpp"
#include "gasdiff/fdsolver.hpp"
#include "gasdiff/heatmap.hpp"
#include "gasdiff/manifest.hpp"
#include "gasdiff/md.hpp"
#include "gasdiff/pipeline.hpp"
#include "gasdiff/trajectory.hpp"

namespace gasdiff::cli {

namespace fs = std::filesystem;

namespace {

bool g_verbose = false;

template <typename... Args>
void log(fmt::format_string<Args...> f, Args&&... args) {
  if (g_verbose) fmt::print(stderr, "[gasdiff] {}\n", fmt::format(f, std::forward<Args>(args)...));
}

// "run.manifest.json" next to a single output file.
fs::path manifest_beside(const fs::path& file) {
  return file.parent_path() / (file.stem().string() + ".manifest.json");
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
}

bool is_lammps_path(const fs::path& p) {
  const auto ext = p.extension().string();
  return ext == ".dump" || ext == ".lammpstrj" || ext == ".lammps";
}

Trajectory load_trajectory(const fs::path& path, const TypeMap& types, double dt_fs) {
  std::ifstream in(path);
  if (!in) throw ParseError(ParseErrorKind::Io, 0, "cannot open " + path.string());
  std::string first;
  std::getline(in, first);
  in.seekg(0);
  if (first.rfind("#gasdiff-trajectory", 0) == 0) return read_native(in);
  return parse_lammps_dump(in, types, dt_fs);
}

void save_trajectory(const fs::path& path, const Trajectory& traj, const TypeMap& types) {
  ensure_parent(path);
  if (is_lammps_path(path)) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    write_lammps_dump(out, traj, types);
  } else {
    write_native(path.string(), traj);
  }
}

UnitScale scale_for(double box_cm, double time_s) {
  UnitScale s{box_cm, time_s};
  s.validate();
  return s;
}

// ---- md-run -----------------------------------------------------------------

struct MdRunOpts {
  MDConfig md;
  double box = 5e4;
  long steps = 1000;
  std::string out;
  std::string energy_out;
};

void cmd_md_run(const MdRunOpts& o) {
  Stopwatch sw;
  SimBox box(o.box);
  log("md-run: {} He + {} Ar, {} steps", o.md.n_he, o.md.n_ar, o.steps);
  const MdRun result = run(o.md, box, o.steps);
  const fs::path out(o.out);
  save_trajectory(out, result.trajectory, default_type_map());
  RunManifest man{"md-run",
                  {{"n_he", o.md.n_he}, {"n_ar", o.md.n_ar}, {"box_A", o.box}, {"dt_fs", o.md.dt},
                   {"steps", o.steps}, {"stride", o.md.sample_stride}, {"temp_K", o.md.temperature}},
                  {}, {out.string()}, o.md.seed, 0.0};
  if (!o.energy_out.empty()) {
    ensure_parent(o.energy_out);
    std::ofstream e(o.energy_out);
    fmt::print(e, "step,time_fs,kinetic,potential,total\n");
    for (const auto& s : result.energy)
      fmt::print(e, "{},{:.17g},{:.17g},{:.17g},{:.17g}\n", s.step, s.time_fs, s.kinetic, s.potential, s.total());
    man.outputs.push_back(o.energy_out);
  }
  man.wall_time_s = sw.seconds();
  man.write(manifest_beside(out));
}

// ---- fd-run -----------------------------------------------------------------

struct FdRunOpts {
  int n = 32;
  int dim = 2;
  double d = 3.18e-3;
  double k = 1e-4;
  long steps = 500;
  std::string scheme = "cn";
  int stride = 100;
  std::string out;
  bool oracle = false;
  bool svg = false;
};

void cmd_fd_run(const FdRunOpts& o) {
  Stopwatch sw;
  const GridSpec grid(o.dim, o.n);
  const SolverConfig cfg{grid, o.k, o.d, parse_scheme(o.scheme), o.steps};
  cfg.validate();
  log("fd-run: N={} d={} k={} (k_c={})", o.n, o.dim, o.k, critical_time_step(grid, o.d));
  const FieldSeries series = solve(make_patch_initial(grid), cfg, o.stride);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  std::vector<std::string> outputs;
  nlohmann::json sj{{"N", o.n}, {"d", o.dim}, {"k", o.k}, {"D", o.d}, {"scheme", o.scheme},
                    {"stride", o.stride}, {"frames", nlohmann::json::array()}};
  for (std::size_t i = 0; i < series.frames.size(); ++i) {
    const double t = series.frame_time(i);
    const auto name = fmt::format("frame_{:04d}.csv", i);
    write_field_csv((dir / name).string(), series.frames[i], t);
    outputs.push_back((dir / name).string());
    nlohmann::json fj{{"file", name}, {"t", t}, {"mass", field_mass(series.frames[i])},
                      {"energy", field_energy(series.frames[i])}};
    if (o.oracle) {
      const ScalarField exact = exact_solution_on_grid(grid, t, o.d);
      const auto oname = fmt::format("oracle_{:04d}.csv", i);
      write_field_csv((dir / oname).string(), exact, t);
      outputs.push_back((dir / oname).string());
      double err = 0.0;
      for (std::size_t j = 0; j < grid.size(); ++j) err += std::pow(series.frames[i][j] - exact[j], 2);
      fj["oracle"] = oname;
      fj["l2_error"] = std::sqrt(err / static_cast<double>(grid.size()));
    }
    if (o.svg && o.dim == 2) {
      const auto svg = dir / fmt::format("frame_{:04d}.svg", i);
      std::ofstream out(svg);
      render_heatmap(series.frames[i], out);
      outputs.push_back(svg.string());
    }
    sj["frames"].push_back(fj);
  }
  write_json(dir / "series.json", sj);
  outputs.push_back((dir / "series.json").string());
  RunManifest man{"fd-run", sj, {}, outputs, std::nullopt, sw.seconds()};
  man.config.erase("frames");
  man.write(dir / "manifest.json");
}

// ---- amp-plot ---------------------------------------------------------------

struct AmpPlotOpts {
  int n = 64;
  int dim = 1;
  double d = 3.18e-3;
  std::vector<double> k_factors{0.5, 1.0, 1.5};
  std::string out;
};

void cmd_amp_plot(const AmpPlotOpts& o) {
  Stopwatch sw;
  const GridSpec grid(o.dim, o.n);
  const double kc = critical_time_step(grid, o.d);
  const fs::path out(o.out);
  ensure_parent(out);
  std::ofstream csv(out);
  fmt::print(csv, "m_over_N");
  for (const char* s : {"fe", "cn"})
    for (double f : o.k_factors) fmt::print(csv, ",{}_k{:g}kc", s, f);
  fmt::print(csv, "\n");
  for (int m = 0; m <= o.n / 2; ++m) {
    // Modes along one axis; for d = 2 the diagonal (m, m) reaches the extreme eigenvalue.
    std::vector<int> mv(static_cast<std::size_t>(o.dim), m);
    fmt::print(csv, "{:.6g}", static_cast<double>(m) / o.n);
    for (Scheme s : {Scheme::ForwardEuler, Scheme::CrankNicolson})
      for (double f : o.k_factors) fmt::print(csv, ",{:.17g}", amplification_factor(s, mv, f * kc, o.d, grid));
    fmt::print(csv, "\n");
  }
  RunManifest man{"amp-plot", {{"N", o.n}, {"d", o.dim}, {"D", o.d}, {"k_c", kc}, {"k_factors", o.k_factors}},
                  {}, {out.string()}, std::nullopt, sw.seconds()};
  man.write(manifest_beside(out));
}

// ---- bin --------------------------------------------------------------------

struct BinOpts {
  std::string traj;
  int n = 20;
  std::string species = "ar";
  std::string out;
  bool per_frame = false;
  bool svg = false;
  std::string types = "1=He,2=Ar";
  double dt = 5.0;
};

void cmd_bin(const BinOpts& o) {
  Stopwatch sw;
  const Trajectory traj = load_trajectory(o.traj, parse_type_map(o.types), o.dt);
  const Species sp = parse_species(o.species);
  const GridSpec grid(2, o.n);
  log("bin: {} frames, {} {} atoms, N={}", traj.frames.size(), traj.count(sp), to_string(sp), o.n);
  std::vector<double> times;
  for (const auto& f : traj.frames) times.push_back(f.time_fs);
  const auto series = normalize_series(bin_trajectory(traj, sp, grid), times,
                                       o.per_frame ? Normalization::PerFrame : Normalization::Global);
  const auto outputs = write_binned_dir(series, traj.box.side(), o.out, true, o.svg);
  RunManifest man{"bin",
                  {{"N", o.n}, {"species", to_string(sp)}, {"normalization", o.per_frame ? "per-frame" : "global"}},
                  {o.traj}, outputs, traj.seed, sw.seconds()};
  man.write(fs::path(o.out) / "manifest.json");
}

// ---- fit / cost-curve -------------------------------------------------------

struct FitOpts {
  std::string binned;
  FitConfig fit;
  double box_cm = 0.0;  // 0: box side from binned.json
  double time_s = 1e-9;
  bool init_frame0 = false;
  int steps_per_frame = 1;
  std::string out;
  // cost-curve only
  double d_min = 1e-4;
  double d_max = 1e-1;
  int points = 41;
  bool log_spacing = true;
};

struct LoadedProblem {
  BinnedDir dir;
  UnitScale scale;
};

LoadedProblem load_problem(const FitOpts& o) {
  BinnedDir dir = read_binned_dir(o.binned);
  const double box_cm = o.box_cm > 0 ? o.box_cm : dir.box_side_A * 1e-8;
  return {std::move(dir), scale_for(box_cm, o.time_s)};
}

nlohmann::json fit_config_json(const FitOpts& o, const UnitScale& scale) {
  return {{"d0", o.fit.d0},
          {"scale_box_cm", scale.box_length_cm},
          {"scale_time_s", scale.time_unit_s},
          {"init", o.init_frame0 ? "frame0" : "patch"},
          {"steps_per_frame", o.steps_per_frame},
          {"max_iter", o.fit.max_iter}};
}

void cmd_fit(const FitOpts& o) {
  Stopwatch sw;
  const auto lp = load_problem(o);
  const auto problem = FitProblem::from_binned(lp.dir.series, lp.scale,
                                               o.init_frame0 ? InitialCondition::Frame0 : InitialCondition::Patch,
                                               o.steps_per_frame);
  const FitResult r = lm_fit(problem, o.fit, lp.scale);
  log("fit: D={} nd = {} cm^2/s after {} iterations", r.d_opt_nd, r.d_opt_cm2_s, r.iterations);
  const fs::path out(o.out);
  ensure_parent(out);
  write_json(out, to_json(r));
  RunManifest man{"fit", fit_config_json(o, lp.scale), {o.binned}, {out.string()}, std::nullopt, sw.seconds()};
  man.write(manifest_beside(out));
}

void cmd_cost_curve(const FitOpts& o) {
  Stopwatch sw;
  if (o.points < 2) throw UsageError("--points must be at least 2");
  if (!(o.d_min > 0) || !(o.d_max > o.d_min)) throw UsageError("need 0 < --d-min < --d-max");
  const auto lp = load_problem(o);
  const auto problem = FitProblem::from_binned(lp.dir.series, lp.scale,
                                               o.init_frame0 ? InitialCondition::Frame0 : InitialCondition::Patch,
                                               o.steps_per_frame);
  std::vector<double> ds;
  for (int i = 0; i < o.points; ++i) {
    const double a = static_cast<double>(i) / (o.points - 1);
    ds.push_back(o.log_spacing ? o.d_min * std::pow(o.d_max / o.d_min, a) : o.d_min + a * (o.d_max - o.d_min));
  }
  const auto costs = cost_curve(problem, ds);
  const fs::path out(o.out);
  ensure_parent(out);
  std::ofstream csv(out);
  fmt::print(csv, "d_nd,d_cm2_s,cost\n");
  for (std::size_t i = 0; i < ds.size(); ++i)
    fmt::print(csv, "{:.17g},{:.17g},{:.17g}\n", ds[i], nd_to_physical_D(ds[i], lp.scale), costs[i].second);
  auto cfg = fit_config_json(o, lp.scale);
  cfg["d_min"] = o.d_min;
  cfg["d_max"] = o.d_max;
  cfg["points"] = o.points;
  cfg["log"] = o.log_spacing;
  RunManifest man{"cost-curve", cfg, {o.binned}, {out.string()}, std::nullopt, sw.seconds()};
  man.write(manifest_beside(out));
}

// ---- msd --------------------------------------------------------------------

struct MsdOpts {
  std::string traj;
  std::string species = "ar";
  double t_lo = -1.0;  // negative: whole trajectory
  double t_hi = -1.0;
  std::string convention = "2d";
  std::string out;
  std::string series_out;
  std::string types = "1=He,2=Ar";
  double dt = 5.0;
};

void cmd_msd(const MsdOpts& o) {
  Stopwatch sw;
  const Trajectory traj = load_trajectory(o.traj, parse_type_map(o.types), o.dt);
  if (traj.frames.empty()) throw InputError("trajectory has no frames");
  MsdConvention conv;
  if (o.convention == "2d")
    conv = MsdConvention::PerDimension;
  else if (o.convention == "3d")
    conv = MsdConvention::ThreeDimensional;
  else
    throw UsageError("--convention must be 2d or 3d");
  const Species sp = parse_species(o.species);
  const auto series = msd_series(traj, sp);
  const double lo = o.t_lo < 0 ? traj.frames.front().time_fs : o.t_lo;
  const double hi = o.t_hi < 0 ? traj.frames.back().time_fs : o.t_hi;
  const MsdEstimate est = fit_msd(series, lo, hi, conv);
  if (est.ballistic) fmt::print(stderr, "warning: MSD grows ballistically (log-log slope {:.2f})\n", est.loglog_exponent);
  const fs::path out(o.out);
  ensure_parent(out);
  auto j = to_json(est);
  j["convention"] = o.convention;
  write_json(out, j);
  RunManifest man{"msd", {{"species", to_string(sp)}, {"t_lo_fs", lo}, {"t_hi_fs", hi}, {"convention", o.convention}},
                  {o.traj}, {out.string()}, traj.seed, 0.0};
  if (!o.series_out.empty()) {
    ensure_parent(o.series_out);
    std::ofstream csv(o.series_out);
    fmt::print(csv, "time_fs,msd_A2\n");
    for (const auto& p : series) fmt::print(csv, "{:.17g},{:.17g}\n", p.time_fs, p.msd);
    man.outputs.push_back(o.series_out);
  }
  man.wall_time_s = sw.seconds();
  man.write(manifest_beside(out));
}

// ---- convert / heatmap --------------------------------------------------------

struct ConvertOpts {
  std::string in;
  std::string out;
  std::string types = "1=He,2=Ar";
  double dt = 5.0;
};

void cmd_convert(const ConvertOpts& o) {
  Stopwatch sw;
  const TypeMap types = parse_type_map(o.types);
  const Trajectory traj = load_trajectory(o.in, types, o.dt);
  save_trajectory(o.out, traj, types);
  RunManifest man{"convert", {{"types", o.types}, {"dt_fs", o.dt}}, {o.in}, {o.out}, std::nullopt, sw.seconds()};
  man.write(manifest_beside(o.out));
}

struct HeatmapOpts {
  std::string in;
  std::string out;
  int cell_px = 8;
};

void cmd_heatmap(const HeatmapOpts& o) {
  Stopwatch sw;
  ensure_parent(o.out);
  render_heatmap(o.in, o.out, o.cell_px);
  RunManifest man{"heatmap", {{"cell_px", o.cell_px}}, {o.in}, {o.out}, std::nullopt, sw.seconds()};
  man.write(manifest_beside(o.out));
}

// ---- reproduce ----------------------------------------------------------------

struct ReproduceOpts {
  std::string scale = "desk";
  std::vector<std::uint64_t> seeds;
  std::vector<int> grid_sizes;
  long steps = 0;
  double d0 = 0.0;
  bool init_frame0 = false;
  bool per_frame = false;
  bool keep_trajectory = false;
  bool write_frames = false;
  std::string out;
};

void cmd_reproduce(const ReproduceOpts& o) {
  Stopwatch sw;
  ReproduceConfig cfg = preset(o.scale);
  if (!o.seeds.empty()) cfg.seeds = o.seeds;
  if (!o.grid_sizes.empty()) cfg.grid_sizes = o.grid_sizes;
  if (o.steps > 0) cfg.n_steps = o.steps;
  if (o.d0 > 0) cfg.fit.d0 = o.d0;
  if (o.init_frame0) cfg.init = InitialCondition::Frame0;
  if (o.per_frame) cfg.normalization = Normalization::PerFrame;
  cfg.keep_trajectory = o.keep_trajectory;
  cfg.write_frames = o.write_frames;
  log("reproduce: {} preset, {} seed(s), {} grid size(s)", cfg.scale_name, cfg.seeds.size(), cfg.grid_sizes.size());
  const auto report = reproduce(cfg, o.out);
  for (const auto& r : report.rows)
    log("N={:4d}  D_opt={:.4g} cm^2/s  cost={:.4g}", r.n, r.d_opt_cm2_s, r.cost);
  log("MSD estimate {:.4g} cm^2/s", report.msd_cm2_s);
  const fs::path dir(o.out);
  RunManifest man{"reproduce",
                  {{"scale", cfg.scale_name}, {"seeds", cfg.seeds}, {"N", cfg.grid_sizes}, {"steps", cfg.n_steps},
                   {"d0", cfg.fit.d0}, {"init", cfg.init == InitialCondition::Patch ? "patch" : "frame0"},
                   {"normalization", cfg.normalization == Normalization::Global ? "global" : "per-frame"}},
                  {}, {(dir / "table.csv").string(), (dir / "per_seed.csv").string(), (dir / "report.json").string()},
                  std::nullopt, sw.seconds()};
  man.write(dir / "manifest.json");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Ar-in-He diffusion: MD, finite-difference diffusion solver and D fitting", "gasdiff"};
  app.set_config("--config", "", "key=value config file ([subcommand] sections); flags override it");
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_flag("--verbose,-v", g_verbose, "Progress on stderr");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  MdRunOpts md;
  auto* s_md = app.add_subcommand("md-run", "Run 2D Lennard-Jones NVE dynamics and write a trajectory");
  s_md->add_option("--n-he", md.md.n_he, "Helium atoms");
  s_md->add_option("--n-ar", md.md.n_ar, "Argon atoms");
  s_md->add_option("--box", md.box, "Box side (A)");
  s_md->add_option("--dt", md.md.dt, "Time step (fs)");
  s_md->add_option("--steps", md.steps, "Number of steps");
  s_md->add_option("--stride", md.md.sample_stride, "Steps between stored frames");
  s_md->add_option("--temp", md.md.temperature, "Initial temperature (K)");
  s_md->add_option("--seed", md.md.seed, "RNG seed");
  s_md->add_option("--energy", md.energy_out, "Also write an energy CSV");
  s_md->add_option("--out", md.out, "Trajectory file (.dump/.lammpstrj for LAMMPS text, else native)")->required();

  FdRunOpts fd;
  auto* s_fd = app.add_subcommand("fd-run", "Solve the periodic diffusion equation from the centred patch");
  s_fd->add_option("--N", fd.n, "Cells per side");
  s_fd->add_option("--dim", fd.dim, "Dimension (1 or 2)");
  s_fd->add_option("--D", fd.d, "Diffusion coefficient (nondimensional)");
  s_fd->add_option("--k", fd.k, "Time step (nondimensional)");
  s_fd->add_option("--steps", fd.steps, "Number of steps");
  s_fd->add_option("--scheme", fd.scheme, "fe or cn")->check(CLI::IsMember({"fe", "cn"}));
  s_fd->add_option("--stride", fd.stride, "Steps between written frames");
  s_fd->add_flag("--oracle", fd.oracle, "Also write the analytic solution and L2 errors");
  s_fd->add_flag("--svg", fd.svg, "Heatmap per frame (2D only)");
  s_fd->add_option("--out", fd.out, "Output directory")->required();

  AmpPlotOpts amp;
  auto* s_amp = app.add_subcommand("amp-plot", "Amplification factor per mode for several time steps");
  s_amp->add_option("--N", amp.n, "Cells per side");
  s_amp->add_option("--dim", amp.dim, "Dimension (1 or 2)");
  s_amp->add_option("--D", amp.d, "Diffusion coefficient (nondimensional)");
  s_amp->add_option("--k-factors", amp.k_factors, "Time steps as multiples of k_c")->delimiter(',');
  s_amp->add_option("--out", amp.out, "CSV path")->required();

  BinOpts bn;
  auto* s_bin = app.add_subcommand("bin", "Histogram a trajectory into normalized N x N concentration frames");
  s_bin->add_option("--traj", bn.traj, "Trajectory (native or LAMMPS dump)")->required();
  s_bin->add_option("--N", bn.n, "Cells per side");
  s_bin->add_option("--species", bn.species, "ar or he");
  s_bin->add_flag("--per-frame", bn.per_frame, "Normalize each frame by its own maximum");
  s_bin->add_flag("--svg", bn.svg, "Heatmap per frame");
  s_bin->add_option("--types", bn.types, "LAMMPS type map");
  s_bin->add_option("--dt", bn.dt, "LAMMPS time step (fs)");
  s_bin->add_option("--out", bn.out, "Output directory")->required();

  FitOpts fit;
  auto add_fit_common = [&](CLI::App* s) {
    s->add_option("--binned", fit.binned, "Directory written by `bin`")->required();
    s->add_option("--scale-box-cm", fit.box_cm, "Box length unit (cm); default: the binned box side");
    s->add_option("--scale-time-s", fit.time_s, "Time unit (s)");
    s->add_flag("--init-from-frame0", fit.init_frame0, "Start the model from binned frame 0, not the patch");
    s->add_option("--steps-per-frame", fit.steps_per_frame, "Crank-Nicolson steps between frames");
    s->add_option("--out", fit.out, "Output path")->required();
  };
  auto* s_fit = app.add_subcommand("fit", "Levenberg-Marquardt fit of D to binned frames");
  add_fit_common(s_fit);
  s_fit->add_option("--d0", fit.fit.d0, "Initial D (nondimensional)");
  s_fit->add_option("--max-iter", fit.fit.max_iter, "Iteration cap");
  auto* s_cc = app.add_subcommand("cost-curve", "Tabulate the fit cost over a range of D");
  add_fit_common(s_cc);
  s_cc->add_option("--d-min", fit.d_min, "Smallest D (nondimensional)");
  s_cc->add_option("--d-max", fit.d_max, "Largest D (nondimensional)");
  s_cc->add_option("--points", fit.points, "Number of samples");
  s_cc->add_flag("--log,!--linear", fit.log_spacing, "Logarithmic spacing (default)");

  MsdOpts ms;
  auto* s_msd = app.add_subcommand("msd", "Diffusion coefficient from mean squared displacement");
  s_msd->add_option("--traj", ms.traj, "Trajectory (native or LAMMPS dump)")->required();
  s_msd->add_option("--species", ms.species, "ar or he");
  s_msd->add_option("--t-lo", ms.t_lo, "Fit window start (fs)");
  s_msd->add_option("--t-hi", ms.t_hi, "Fit window end (fs)");
  s_msd->add_option("--convention", ms.convention, "2d: slope/4, 3d: slope/6");
  s_msd->add_option("--series", ms.series_out, "Also write the MSD series CSV");
  s_msd->add_option("--types", ms.types, "LAMMPS type map");
  s_msd->add_option("--dt", ms.dt, "LAMMPS time step (fs)");
  s_msd->add_option("--out", ms.out, "JSON path")->required();

  ConvertOpts cv;
  auto* s_cv = app.add_subcommand("convert", "Convert between native and LAMMPS dump trajectories");
  s_cv->add_option("--in", cv.in, "Input trajectory")->required();
  s_cv->add_option("--out", cv.out, "Output trajectory (.dump/.lammpstrj for LAMMPS)")->required();
  s_cv->add_option("--types", cv.types, "LAMMPS type map");
  s_cv->add_option("--dt", cv.dt, "LAMMPS time step (fs)");

  HeatmapOpts hm;
  auto* s_hm = app.add_subcommand("heatmap", "Render a 2D field CSV as an SVG heatmap");
  s_hm->add_option("--in", hm.in, "Field CSV")->required();
  s_hm->add_option("--out", hm.out, "SVG path")->required();
  s_hm->add_option("--cell-px", hm.cell_px, "Pixels per cell")->check(CLI::PositiveNumber);

  ReproduceOpts rp;
  auto* s_rp = app.add_subcommand("reproduce", "MD, binning, fitting and MSD end to end");
  s_rp->add_option("--scale", rp.scale, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
  s_rp->add_option("--seeds", rp.seeds, "Seeds (default from preset)")->delimiter(',');
  s_rp->add_option("--N", rp.grid_sizes, "Grid sizes (default from preset)")->delimiter(',');
  s_rp->add_option("--steps", rp.steps, "Override the MD step count");
  s_rp->add_option("--d0", rp.d0, "Override the initial D");
  s_rp->add_flag("--init-from-frame0", rp.init_frame0, "Start the model from binned frame 0");
  s_rp->add_flag("--per-frame", rp.per_frame, "Per-frame normalization");
  s_rp->add_flag("--keep-trajectory", rp.keep_trajectory, "Write the full trajectory per seed");
  s_rp->add_flag("--write-frames", rp.write_frames, "Write count/U CSVs per frame");
  s_rp->add_option("--out", rp.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::FileError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kInput;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (threads > 0) omp_set_num_threads(threads);
  try {
    if (s_md->parsed()) cmd_md_run(md);
    else if (s_fd->parsed()) cmd_fd_run(fd);
    else if (s_amp->parsed()) cmd_amp_plot(amp);
    else if (s_bin->parsed()) cmd_bin(bn);
    else if (s_fit->parsed()) cmd_fit(fit);
    else if (s_cc->parsed()) cmd_cost_curve(fit);
    else if (s_msd->parsed()) cmd_msd(ms);
    else if (s_cv->parsed()) cmd_convert(cv);
    else if (s_hm->parsed()) cmd_heatmap(hm);
    else if (s_rp->parsed()) cmd_reproduce(rp);
    return kOk;
  } catch (const UsageError& e) {
    fmt::print(stderr, "usage error: {}\n", e.what());
    return kUsage;
  } catch (const InstabilityError& e) {
    fmt::print(stderr, "numerical instability: {}\n", e.what());
    return kInstability;
  } catch (const InputError& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kInput;
  } catch (const nlohmann::json::exception& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kInput;
  } catch (const fs::filesystem_error& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return kInput;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kFailure;
  }
}

}  // namespace gasdiff::cli
