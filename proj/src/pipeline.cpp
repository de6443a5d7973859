#include "gasdiff/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <optional>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gasdiff/error.hpp"
#include "gasdiff/heatmap.hpp"
#include "gasdiff/manifest.hpp"

namespace gasdiff {

namespace fs = std::filesystem;

namespace {

const char* to_string(Normalization n) { return n == Normalization::Global ? "global" : "per-frame"; }

ScalarField counts_as_field(const CountField& c) {
  ScalarField f(c.grid);
  for (std::size_t j = 0; j < c.counts.size(); ++j) f[j] = c.counts[j];
  return f;
}

}  // namespace

std::vector<std::string> write_binned_dir(const BinnedSeries& series, double box_side_A,
                                          const fs::path& dir, bool frames, bool svg) {
  fs::create_directories(dir);
  std::vector<std::string> written;
  nlohmann::json j;
  j["N"] = series.grid.n();
  j["M"] = series.normalization_max;
  j["normalization"] = to_string(series.normalization);
  j["box_side_A"] = box_side_A;
  j["frame_times_fs"] = nlohmann::json::array();
  j["frames"] = nlohmann::json::array();
  for (std::size_t n = 0; n < series.frames.size(); ++n) {
    const auto& fr = series.frames[n];
    j["frame_times_fs"].push_back(fr.time_fs);
    const std::string counts_name = fmt::format("counts_{:04d}.csv", n);
    const std::string u_name = fmt::format("U_{:04d}.csv", n);
    j["frames"].push_back({{"counts", counts_name}, {"U", u_name}});
    if (!frames) continue;
    write_field_csv((dir / counts_name).string(), counts_as_field(fr.counts), fr.time_fs);
    write_field_csv((dir / u_name).string(), fr.u, fr.time_fs);
    written.push_back((dir / counts_name).string());
    written.push_back((dir / u_name).string());
    if (svg) {
      const auto svg_path = dir / fmt::format("U_{:04d}.svg", n);
      std::ofstream out(svg_path);
      render_heatmap(fr.u, out);
      written.push_back(svg_path.string());
    }
  }
  j["frame_files_written"] = frames;
  write_json(dir / "binned.json", j);
  written.push_back((dir / "binned.json").string());
  return written;
}

BinnedDir read_binned_dir(const fs::path& dir) {
  const auto j = read_json(dir / "binned.json");
  try {
    if (!j.at("frame_files_written").get<bool>())
      throw InputError(dir.string() + " holds no frame files (binned without frames)");
    const int n = j.at("N").get<int>();
    const int m = j.at("M").get<int>();
    const auto norm = j.at("normalization").get<std::string>() == "per-frame" ? Normalization::PerFrame
                                                                                : Normalization::Global;
    const auto times = j.at("frame_times_fs").get<std::vector<double>>();
    const auto& frames = j.at("frames");
    if (frames.size() != times.size()) throw InputError("binned.json frame list and times differ");
    std::vector<CountField> counts;
    for (const auto& f : frames) {
      const auto field = read_field_csv((dir / f.at("counts").get<std::string>()).string());
      if (field.field.grid().n() != n || field.field.grid().dim() != 2)
        throw InputError("count frame grid differs from binned.json N");
      CountField c{field.field.grid(), {}};
      for (double v : field.field.values()) {
        if (v < 0 || v != std::floor(v)) throw InputError("count frames must hold non-negative integers");
        c.counts.push_back(static_cast<int>(v));
      }
      counts.push_back(std::move(c));
    }
    BinnedDir out{normalize_series(std::move(counts), times, norm), j.at("box_side_A").get<double>()};
    if (out.series.normalization_max != m)
      throw InputError(fmt::format("binned.json M={} but counts give {}", m, out.series.normalization_max));
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(ParseErrorKind::MalformedHeader, 0, (dir / "binned.json").string() + ": " + e.what());
  }
}

ReproduceConfig desk_preset() {
  ReproduceConfig c;
  c.scale_name = "desk";
  c.md.n_he = 500;
  c.md.n_ar = 500;
  c.md.dt = 5.0;
  c.md.temperature = 300.0;
  c.md.sample_stride = 200;
  c.box = SimBox(5e3);
  c.n_steps = 20000;
  c.grid_sizes = {10, 20};
  c.seeds = {1};
  c.scale = {5e3 * 1e-8, 1e-9};
  c.fit.d0 = 0.01;
  return c;
}

ReproduceConfig paper_preset() {
  ReproduceConfig c;
  c.scale_name = "paper";
  c.md.n_he = 30000;
  c.md.n_ar = 30000;
  c.md.dt = 5.0;
  c.md.temperature = 300.0;
  c.md.sample_stride = 1000;
  c.box = SimBox(5e4);
  c.n_steps = 1000000;
  c.grid_sizes = {20, 50, 100};
  c.seeds = {1, 2, 3};
  c.scale = {5e-4, 1e-9};
  c.fit.d0 = 3e-3;
  return c;
}

ReproduceConfig preset(const std::string& name) {
  if (name == "desk") return desk_preset();
  if (name == "paper") return paper_preset();
  throw UsageError(fmt::format("unknown scale preset '{}', expected desk or paper", name));
}

nlohmann::json to_json(const FitResult& r) {
  return {{"d_opt_nd", r.d_opt_nd},       {"d_opt_cm2_s", r.d_opt_cm2_s}, {"cost", r.final_cost},
          {"iterations", r.iterations},   {"ci95", r.ci95_cm2_s},         {"ci95_nd", r.ci95_nd},
          {"converged", r.converged},     {"cost_trace", r.cost_trace},   {"d_trace", r.d_trace}};
}

nlohmann::json to_json(const MsdEstimate& m) {
  return {{"d_A2_per_fs", m.diffusion}, {"d_cm2_s", m.cm2_per_s()},        {"r_squared", m.r_squared},
          {"loglog_exponent", m.loglog_exponent}, {"ballistic", m.ballistic}, {"n_points", m.n_points}};
}

namespace {

template <typename F>
auto stage(const std::string& name, F&& body) {
  try {
    return body();
  } catch (const UsageError& e) {
    throw UsageError(fmt::format("stage {}: {}", name, e.what()));
  } catch (const InstabilityError& e) {
    throw InstabilityError(fmt::format("stage {}: {}", name, e.what()));
  } catch (const InputError& e) {
    throw InputError(fmt::format("stage {}: {}", name, e.what()));
  } catch (const NumericalError& e) {
    throw NumericalError(fmt::format("stage {}: {}", name, e.what()));
  }
}

nlohmann::json md_config_json(const ReproduceConfig& c, std::uint64_t seed) {
  return {{"n_he", c.md.n_he},   {"n_ar", c.md.n_ar},           {"box_A", c.box.side()},
          {"dt_fs", c.md.dt},    {"steps", c.n_steps},          {"stride", c.md.sample_stride},
          {"temp_K", c.md.temperature}, {"seed", seed}};
}

}  // namespace

ReproduceReport reproduce(const ReproduceConfig& cfg, const fs::path& out_dir) {
  cfg.md.validate();
  cfg.scale.validate();
  cfg.fit.validate();
  if (cfg.seeds.empty() || cfg.grid_sizes.empty()) throw UsageError("reproduce needs seeds and grid sizes");
  std::vector<GridSpec> grids;
  for (int n : cfg.grid_sizes) grids.emplace_back(2, n);
  fs::create_directories(out_dir);

  ReproduceReport report;
  for (std::uint64_t seed : cfg.seeds) {
    SeedResult result;
    result.seed = seed;
    const fs::path seed_dir = out_dir / fmt::format("seed_{}", seed);
    MDConfig md = cfg.md;
    md.seed = seed;

    // MD, binned and MSD-tracked on the fly.
    std::vector<std::vector<CountField>> counts(grids.size());
    std::vector<double> times;
    std::vector<EnergySample> energy;
    std::optional<MsdAccumulator> msd;
    std::optional<Trajectory> traj;
    stage("md", [&] {
      Stopwatch sw;
      const fs::path dir = seed_dir / "md";
      fs::create_directories(dir);
      ParticleState initial = init_state(md, cfg.box);
      msd.emplace(initial, Species::Ar);
      if (cfg.keep_trajectory) traj = empty_trajectory(md, cfg.box, initial);
      run(std::move(initial), md, cfg.box, cfg.n_steps,
          [&](long step, const ParticleState& s, const EnergySample& e) {
            times.push_back(s.time_fs);
            energy.push_back(e);
            msd->add(s);
            for (std::size_t g = 0; g < grids.size(); ++g)
              counts[g].push_back(bin_counts(s.positions, s.species, Species::Ar, cfg.box, grids[g]));
            if (traj) append_frame(*traj, step, s);
          });
      RunManifest man{"reproduce/md", md_config_json(cfg, seed), {}, {}, seed, 0.0};
      {
        std::ofstream out(dir / "energy.csv");
        fmt::print(out, "step,time_fs,kinetic,potential,total\n");
        for (const auto& e : energy)
          fmt::print(out, "{},{:.17g},{:.17g},{:.17g},{:.17g}\n", e.step, e.time_fs, e.kinetic, e.potential,
                     e.total());
        man.outputs.push_back((dir / "energy.csv").string());
      }
      if (traj) {
        write_native((dir / "trajectory.traj").string(), *traj);
        man.outputs.push_back((dir / "trajectory.traj").string());
      }
      man.wall_time_s = sw.seconds();
      man.write(dir / "manifest.json");
      return 0;
    });

    const double e0 = energy.front().total();
    for (const auto& e : energy)
      result.energy_drift = std::max(result.energy_drift, std::abs(e.total() - e0) / std::abs(e0));

    result.msd = stage("msd", [&] {
      Stopwatch sw;
      auto est = fit_msd(msd->series(), times.front(), times.back());
      const fs::path dir = seed_dir / "msd";
      fs::create_directories(dir);
      write_json(dir / "msd.json", to_json(est));
      RunManifest man{"reproduce/msd", {{"species", "Ar"}, {"t_lo_fs", times.front()}, {"t_hi_fs", times.back()}},
                      {}, {(dir / "msd.json").string()}, seed, sw.seconds()};
      man.write(dir / "manifest.json");
      return est;
    });

    for (std::size_t g = 0; g < grids.size(); ++g) {
      const int n = grids[g].n();
      const BinnedSeries binned = stage("bin", [&] {
        Stopwatch sw;
        auto series = normalize_series(std::move(counts[g]), times, cfg.normalization);
        const fs::path dir = seed_dir / fmt::format("bin_N{}", n);
        auto outputs = write_binned_dir(series, cfg.box.side(), dir, cfg.write_frames);
        RunManifest man{"reproduce/bin", {{"N", n}, {"species", "Ar"}, {"normalization", to_string(cfg.normalization)}},
                        {}, outputs, seed, sw.seconds()};
        man.write(dir / "manifest.json");
        return series;
      });
      result.fits.push_back(stage("fit", [&] {
        Stopwatch sw;
        const auto problem = FitProblem::from_binned(binned, cfg.scale, cfg.init);
        auto fit = lm_fit(problem, cfg.fit, cfg.scale);
        const fs::path dir = seed_dir / fmt::format("fit_N{}", n);
        fs::create_directories(dir);
        write_json(dir / "report.json", to_json(fit));
        RunManifest man{"reproduce/fit",
                        {{"N", n}, {"d0", cfg.fit.d0}, {"scale_box_cm", cfg.scale.box_length_cm},
                         {"scale_time_s", cfg.scale.time_unit_s},
                         {"init", cfg.init == InitialCondition::Patch ? "patch" : "frame0"}},
                        {}, {(dir / "report.json").string()}, seed, sw.seconds()};
        man.write(dir / "manifest.json");
        return fit;
      }));
    }
    report.seeds.push_back(std::move(result));
  }

  const double ns = static_cast<double>(report.seeds.size());
  for (const auto& s : report.seeds) report.msd_cm2_s += s.msd.cm2_per_s() / ns;
  for (std::size_t g = 0; g < grids.size(); ++g) {
    ReproduceRow row;
    row.n = grids[g].n();
    for (const auto& s : report.seeds) {
      row.d_opt_cm2_s += s.fits[g].d_opt_cm2_s / ns;
      row.d_opt_nd += s.fits[g].d_opt_nd / ns;
      row.cost += s.fits[g].final_cost / ns;
      row.ci95_cm2_s += s.fits[g].ci95_cm2_s / ns;
    }
    report.rows.push_back(row);
  }

  {
    std::ofstream out(out_dir / "table.csv");
    fmt::print(out, "N,d_opt_cm2_s,cost,ci95_cm2_s,d_opt_nd\n");
    for (const auto& r : report.rows)
      fmt::print(out, "{},{:.6g},{:.6g},{:.6g},{:.6g}\n", r.n, r.d_opt_cm2_s, r.cost, r.ci95_cm2_s, r.d_opt_nd);
  }
  {
    std::ofstream out(out_dir / "per_seed.csv");
    fmt::print(out, "seed,N,d_opt_cm2_s,cost,ci95_cm2_s,iterations,converged,msd_d_cm2_s,energy_drift\n");
    for (const auto& s : report.seeds)
      for (std::size_t g = 0; g < grids.size(); ++g) {
        const auto& f = s.fits[g];
        fmt::print(out, "{},{},{:.6g},{:.6g},{:.6g},{},{},{:.6g},{:.3g}\n", s.seed, grids[g].n(), f.d_opt_cm2_s,
                   f.final_cost, f.ci95_cm2_s, f.iterations, f.converged ? 1 : 0, s.msd.cm2_per_s(),
                   s.energy_drift);
      }
  }
  nlohmann::json j;
  j["scale"] = cfg.scale_name;
  j["msd_d_cm2_s_mean"] = report.msd_cm2_s;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : report.rows)
    j["rows"].push_back({{"N", r.n}, {"d_opt_cm2_s", r.d_opt_cm2_s}, {"d_opt_nd", r.d_opt_nd}, {"cost", r.cost},
                         {"ci95_cm2_s", r.ci95_cm2_s}});
  j["seeds"] = nlohmann::json::array();
  for (const auto& s : report.seeds) {
    nlohmann::json sj{{"seed", s.seed}, {"msd", to_json(s.msd)}, {"energy_drift", s.energy_drift}};
    for (std::size_t g = 0; g < grids.size(); ++g) sj["fits"][std::to_string(grids[g].n())] = to_json(s.fits[g]);
    j["seeds"].push_back(sj);
  }
  write_json(out_dir / "report.json", j);
  return report;
}

}  // namespace gasdiff
