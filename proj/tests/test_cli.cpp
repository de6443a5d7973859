#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "gasdiff/heatmap.hpp"
#include "gasdiff/manifest.hpp"
#include "gasdiff/pipeline.hpp"

using namespace gasdiff;
namespace fs = std::filesystem;

namespace {

int run(std::initializer_list<std::string> args) {
  std::vector<std::string> store{"gasdiff"};
  store.insert(store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : store) argv.push_back(s.c_str());
  return cli::run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

// Scratch directory per test case, removed on exit.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("gasdiff_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& p) const { return (dir / p).string(); }
};

// Element nesting check sufficient for the generated SVG.
bool well_formed_xml(const std::string& doc) {
  if (doc.rfind("<?xml", 0) != 0) return false;
  std::vector<std::string> stack;
  const std::regex tag(R"re(<(/?)([A-Za-z][A-Za-z0-9]*)[^<>]*?(/?)>)re");
  for (auto it = std::sregex_iterator(doc.begin(), doc.end(), tag); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    if (m[3].length() > 0) continue;
    if (m[1].length() == 0) {
      stack.push_back(m[2]);
    } else {
      if (stack.empty() || stack.back() != m[2]) return false;
      stack.pop_back();
    }
  }
  return stack.empty();
}

std::set<std::string> fills(const std::string& svg) {
  std::set<std::string> out;
  const std::regex fill(R"re(fill="(#[0-9a-f]{6})")re");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), fill); it != std::sregex_iterator(); ++it)
    out.insert((*it)[1]);
  return out;
}

}  // namespace

TEST_CASE("heatmap rendering") {
  std::ostringstream zero;
  render_heatmap(ScalarField(GridSpec(2, 5)), zero);
  CHECK(fills(zero.str()) == std::set<std::string>{heatmap_color(0)});
  CHECK(well_formed_xml(zero.str()));

  ScalarField f(GridSpec(2, 2));
  f.at(1, 0) = 1.0;
  std::ostringstream one;
  render_heatmap(f, one);
  CHECK(heatmap_bin(1.0) == kHeatmapBins - 1);
  CHECK(one.str().find(std::string("fill=\"") + heatmap_color(kHeatmapBins - 1)) != std::string::npos);
  CHECK(fills(one.str()).size() == 2);
  CHECK(well_formed_xml(one.str()));
}

TEST_CASE("presets") {
  const auto p = paper_preset();
  CHECK(p.md.n_he == 30000);
  CHECK(p.md.n_ar == 30000);
  CHECK(p.box.side() == 5e4);
  CHECK(p.md.dt == 5.0);
  CHECK(p.n_steps == 1000000);
  CHECK(p.md.sample_stride == 1000);
  CHECK(p.md.temperature == 300.0);
  const auto d = desk_preset();
  CHECK(d.md.n_he == 500);
  CHECK(d.md.n_ar == 500);
  CHECK(d.box.side() == 5e3);
  CHECK(d.n_steps == 20000);
  CHECK(d.md.sample_stride == 200);
  CHECK(d.grid_sizes == std::vector<int>{10, 20});
}

TEST_CASE("exit codes") {
  Scratch s("exit");
  CHECK(run({"--help"}) == cli::kOk);
  CHECK(run({}) == cli::kUsage);
  CHECK(run({"fd-run", "--bogus", "--out", s / "x"}) == cli::kUsage);
  CHECK(run({"fd-run", "--scheme", "rk4", "--out", s / "x"}) == cli::kUsage);
  CHECK(run({"fd-run", "--N", "1", "--out", s / "x"}) == cli::kUsage);
  CHECK(run({"bin", "--traj", s / "missing.traj", "--out", s / "b"}) == cli::kInput);
  CHECK(run({"fd-run", "--scheme", "fe", "--k", "1e-3", "--D", "1", "--steps", "400", "--out", s / "fe"}) ==
        cli::kInstability);
}

TEST_CASE("fd-run, amp-plot and heatmap") {
  Scratch s("fd");
  REQUIRE(run({"fd-run", "--N", "16", "--steps", "20", "--stride", "10", "--oracle", "--svg", "--out", s / "fd"}) ==
          cli::kOk);
  const auto series = load(s / "fd/series.json");
  CHECK(series["frames"].size() == 3);
  CHECK(series["frames"][2]["t"].get<double>() == doctest::Approx(2e-3));
  CHECK(fs::exists(s / "fd/oracle_0002.csv"));
  CHECK(fs::exists(s / "fd/frame_0001.svg"));
  CHECK(fs::exists(s / "fd/manifest.json"));

  REQUIRE(run({"amp-plot", "--N", "8", "--out", s / "amp.csv"}) == cli::kOk);
  std::ifstream amp(s / "amp.csv");
  std::string header, row;
  std::getline(amp, header);
  CHECK(header == "m_over_N,fe_k0.5kc,fe_k1kc,fe_k1.5kc,cn_k0.5kc,cn_k1kc,cn_k1.5kc");
  std::vector<std::string> rows;
  while (std::getline(amp, row)) rows.push_back(row);
  CHECK(rows.size() == 5);
  std::vector<double> last;
  std::stringstream ls(rows.back());
  for (std::string cell; std::getline(ls, cell, ',');) last.push_back(std::stod(cell));
  REQUIRE(last.size() == 7);
  CHECK(last[0] == 0.5);
  CHECK(last[1] == doctest::Approx(0.0).scale(1.0));
  CHECK(last[2] == doctest::Approx(-1.0));
  CHECK(last[3] == doctest::Approx(-2.0));
  CHECK(last[5] == doctest::Approx(0.0).scale(1.0));
  CHECK(fs::exists(s / "amp.manifest.json"));

  REQUIRE(run({"heatmap", "--in", s / "fd/frame_0000.csv", "--out", s / "h.svg"}) == cli::kOk);
  CHECK(well_formed_xml(slurp(s / "h.svg")));
  CHECK(run({"heatmap", "--in", s / "amp.csv", "--out", s / "bad.svg"}) == cli::kInput);
}

TEST_CASE("md-run, convert, bin, fit, cost-curve and msd chain") {
  Scratch s("chain");
  REQUIRE(run({"md-run", "--n-he", "60", "--n-ar", "60", "--box", "1000", "--steps", "400", "--stride", "40",
               "--seed", "3", "--out", s / "md.traj"}) == cli::kOk);
  const auto man = load(s / "md.manifest.json");
  CHECK(man["command"] == "md-run");
  CHECK(man["seed"] == 3);
  CHECK(man["tool_version"] == kVersion);
  CHECK(man.contains("wall_time_s"));

  REQUIRE(run({"convert", "--in", s / "md.traj", "--out", s / "md.lammpstrj"}) == cli::kOk);
  REQUIRE(run({"convert", "--in", s / "md.lammpstrj", "--out", s / "back.traj"}) == cli::kOk);
  const auto a = read_native(s / "md.traj");
  const auto b = read_native(s / "back.traj");
  CHECK(a.ids == b.ids);
  CHECK(a.frames.size() == b.frames.size());
  CHECK(a.frames.back().positions[5].x == doctest::Approx(b.frames.back().positions[5].x).epsilon(1e-15));

  REQUIRE(run({"bin", "--traj", s / "md.lammpstrj", "--N", "5", "--out", s / "bin"}) == cli::kOk);
  const auto binned = load(s / "bin/binned.json");
  CHECK(binned["frame_times_fs"].size() == 11);
  CHECK(fs::exists(s / "bin/counts_0010.csv"));
  CHECK(fs::exists(s / "bin/U_0010.csv"));
  CHECK(fs::exists(s / "bin/manifest.json"));
  const auto back = read_binned_dir(s / "bin");
  CHECK(back.series.frames.size() == 11);
  CHECK(back.series.normalization_max == binned["M"].get<int>());

  REQUIRE(run({"fit", "--binned", s / "bin", "--d0", "0.01", "--init-from-frame0", "--out", s / "fit/report.json"}) ==
          cli::kOk);
  const auto rep = load(s / "fit/report.json");
  for (const char* key : {"d_opt_nd", "d_opt_cm2_s", "cost", "iterations", "ci95", "converged", "cost_trace"})
    CHECK(rep.contains(key));
  CHECK(rep["d_opt_nd"].get<double>() > 0.0);
  CHECK(fs::exists(s / "fit/report.manifest.json"));

  REQUIRE(run({"cost-curve", "--binned", s / "bin", "--d-min", "1e-3", "--d-max", "1", "--points", "5", "--out",
               s / "cc.csv"}) == cli::kOk);
  std::ifstream cc(s / "cc.csv");
  int lines = 0;
  for (std::string l; std::getline(cc, l);) ++lines;
  CHECK(lines == 6);

  REQUIRE(run({"msd", "--traj", s / "md.traj", "--out", s / "msd.json", "--series", s / "msd.csv"}) == cli::kOk);
  const auto msd = load(s / "msd.json");
  CHECK(msd["d_cm2_s"].get<double>() > 0.0);
  REQUIRE(run({"msd", "--traj", s / "md.traj", "--convention", "3d", "--out", s / "msd3.json"}) == cli::kOk);
  CHECK(load(s / "msd3.json")["d_cm2_s"].get<double>() ==
        doctest::Approx(msd["d_cm2_s"].get<double>() * 4.0 / 6.0));
}

TEST_CASE("config file values sit between flags and defaults") {
  Scratch s("config");
  {
    std::ofstream cfg(s / "run.ini");
    cfg << "[fd-run]\nN=8\nsteps=4\nstride=2\n";
  }
  REQUIRE(run({"--config", s / "run.ini", "fd-run", "--N", "12", "--out", s / "fd"}) == cli::kOk);
  const auto series = load(s / "fd/series.json");
  CHECK(series["N"] == 12);
  CHECK(series["frames"].size() == 3);
}

TEST_CASE("reproduce on the desk preset") {
  Scratch s("reproduce");
  REQUIRE(run({"reproduce", "--scale", "desk", "--seeds", "1", "--N", "20", "--out", s / "a"}) == cli::kOk);
  for (const char* f : {"table.csv", "per_seed.csv", "report.json", "manifest.json", "seed_1/md/manifest.json",
                        "seed_1/msd/manifest.json", "seed_1/bin_N20/manifest.json", "seed_1/fit_N20/manifest.json",
                        "seed_1/fit_N20/report.json"})
    CHECK_MESSAGE(fs::exists(s.dir / "a" / f), f);
  const auto rep = load(s / "a/report.json");
  CHECK(rep["rows"].size() == 1);
  CHECK(rep["rows"][0]["N"] == 20);

  REQUIRE(run({"reproduce", "--scale", "desk", "--seeds", "1", "--N", "20", "--out", s / "b"}) == cli::kOk);
  CHECK(slurp(s / "a/table.csv") == slurp(s / "b/table.csv"));
  CHECK(slurp(s / "a/report.json") == slurp(s / "b/report.json"));
  CHECK(slurp(s / "a/per_seed.csv") == slurp(s / "b/per_seed.csv"));
}
