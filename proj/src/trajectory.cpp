#include "gasdiff/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string_view>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gasdiff/error.hpp"

namespace gasdiff {

std::size_t Trajectory::count(Species s) const {
  return static_cast<std::size_t>(std::count(species.begin(), species.end(), s));
}

void Trajectory::validate() const {
  if (species.size() != ids.size()) throw InputError("trajectory species/id tables differ in length");
  for (std::size_t f = 0; f < frames.size(); ++f) {
    if (frames[f].positions.size() != ids.size() || frames[f].velocities.size() != ids.size())
      throw InputError(fmt::format("frame {} has a different particle count", f));
    if (f > 0 && frames[f].timestep <= frames[f - 1].timestep)
      throw InputError(fmt::format("frame timesteps not strictly increasing at frame {}", f));
  }
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view tok, std::size_t line, std::string_view what) {
  T v{};
  const char* b = tok.data();
  const char* e = tok.data() + tok.size();
  if (!tok.empty() && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  bool ok = ec == std::errc() && ptr == e && b != e;
  if constexpr (std::is_floating_point_v<T>) ok = ok && std::isfinite(v);
  if (!ok)
    throw ParseError(ParseErrorKind::NonNumeric, line,
                     fmt::format("expected a number for {}, got '{}'", what, tok));
  return v;
}

// Line reader that tracks 1-based line numbers.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    if (peeked_) {
      line = std::move(*peeked_);
      peeked_.reset();
      ++line_no_;
      return true;
    }
    if (!std::getline(in_, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no_;
    return true;
  }
  const std::string* peek() {
    if (!peeked_) {
      std::string l;
      if (!std::getline(in_, l)) return nullptr;
      if (!l.empty() && l.back() == '\r') l.pop_back();
      peeked_ = std::move(l);
    }
    return &*peeked_;
  }
  std::size_t line() const noexcept { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
  std::optional<std::string> peeked_;
};

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

}  // namespace

// ---- native format -----------------------------------------------------------

void write_native(std::ostream& out, const Trajectory& t) {
  t.validate();
  fmt::print(out, "#gasdiff-trajectory 1\n");
  fmt::print(out, "#units {}\n", t.units);
  fmt::print(out, "#box {:.17g}\n", t.box.side());
  fmt::print(out, "#dt {:.17g}\n", t.dt_fs);
  fmt::print(out, "#seed {}\n", t.seed);
  fmt::print(out, "#n_particles {}\n", t.particle_count());
  fmt::print(out, "#n_he {}\n", t.count(Species::He));
  fmt::print(out, "#n_ar {}\n", t.count(Species::Ar));
  fmt::print(out, "#has_velocities {}\n", t.has_velocities ? 1 : 0);
  fmt::print(out, "#unwrapped {}\n", t.unwrapped ? 1 : 0);
  fmt::print(out, "#frames {}\n", t.frames.size());
  for (const auto& f : t.frames) {
    fmt::print(out, "FRAME {} {:.17g}\n", f.timestep, f.time_fs);
    for (std::size_t i = 0; i < t.ids.size(); ++i)
      fmt::print(out, "{} {} {:.17g} {:.17g} {:.17g} {:.17g}\n", t.ids[i], to_string(t.species[i]),
                 f.positions[i].x, f.positions[i].y, f.velocities[i].x, f.velocities[i].y);
  }
}

void write_native(const std::string& path, const Trajectory& t) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  write_native(out, t);
}

Trajectory read_native(std::istream& in) {
  LineReader r(in);
  std::string line;
  if (!r.next(line) || line != "#gasdiff-trajectory 1")
    throw ParseError(ParseErrorKind::MalformedHeader, 1, "missing '#gasdiff-trajectory 1' magic line");

  Trajectory t;
  std::optional<double> box;
  std::optional<std::size_t> n_particles, n_frames, n_he, n_ar;
  while (const std::string* p = r.peek()) {
    if (!starts_with(*p, "#")) break;
    r.next(line);
    const auto tok = split(std::string_view(line).substr(1));
    if (tok.size() != 2)
      throw ParseError(ParseErrorKind::MalformedHeader, r.line(), "header lines are '#key value'");
    const auto key = tok[0];
    const auto val = tok[1];
    if (key == "units") t.units = std::string(val);
    else if (key == "box") box = parse_number<double>(val, r.line(), "box");
    else if (key == "dt") t.dt_fs = parse_number<double>(val, r.line(), "dt");
    else if (key == "seed") t.seed = parse_number<std::uint64_t>(val, r.line(), "seed");
    else if (key == "n_particles") n_particles = parse_number<std::size_t>(val, r.line(), "n_particles");
    else if (key == "n_he") n_he = parse_number<std::size_t>(val, r.line(), "n_he");
    else if (key == "n_ar") n_ar = parse_number<std::size_t>(val, r.line(), "n_ar");
    else if (key == "has_velocities") t.has_velocities = parse_number<int>(val, r.line(), "has_velocities") != 0;
    else if (key == "unwrapped") t.unwrapped = parse_number<int>(val, r.line(), "unwrapped") != 0;
    else if (key == "frames") n_frames = parse_number<std::size_t>(val, r.line(), "frames");
    else
      throw ParseError(ParseErrorKind::MalformedHeader, r.line(), fmt::format("unknown header key '{}'", key));
  }
  if (!box || !n_particles || !n_frames)
    throw ParseError(ParseErrorKind::MalformedHeader, r.line(), "header needs #box, #n_particles and #frames");
  if (!(*box > 0.0)) throw ParseError(ParseErrorKind::MalformedHeader, 0, "box side must be positive");
  t.box = SimBox(*box);
  if (n_he && n_ar && *n_he + *n_ar != *n_particles)
    throw ParseError(ParseErrorKind::CountMismatch, 0,
                     fmt::format("n_he + n_ar = {} but n_particles = {}", *n_he + *n_ar, *n_particles));

  const std::size_t np = *n_particles;
  while (r.next(line)) {
    if (line.empty()) continue;
    const auto head = split(line);
    if (head.size() != 3 || head[0] != "FRAME")
      throw ParseError(ParseErrorKind::MalformedHeader, r.line(), "expected 'FRAME <timestep> <time_fs>'");
    if (t.frames.size() == *n_frames)
      throw ParseError(ParseErrorKind::CountMismatch, r.line(),
                       fmt::format("more frames than the {} declared", *n_frames));
    TrajectoryFrame f;
    f.timestep = parse_number<long>(head[1], r.line(), "timestep");
    f.time_fs = parse_number<double>(head[2], r.line(), "time");
    if (!t.frames.empty() && f.timestep <= t.frames.back().timestep)
      throw ParseError(ParseErrorKind::MalformedHeader, r.line(), "frame timesteps must increase");
    const bool first = t.frames.empty();
    for (std::size_t i = 0; i < np; ++i) {
      if (!r.next(line))
        throw ParseError(ParseErrorKind::Truncated, r.line(),
                         fmt::format("frame {} ends after {} of {} rows", t.frames.size(), i, np));
      const auto tok = split(line);
      if (tok.size() != 6 || tok[0] == "FRAME")
        throw ParseError(ParseErrorKind::Truncated, r.line(), "expected 'id species x y vx vy'");
      const long id = parse_number<long>(tok[0], r.line(), "id");
      Species sp;
      try {
        sp = parse_species(tok[1]);
      } catch (const InputError&) {
        throw ParseError(ParseErrorKind::UnknownType, r.line(), fmt::format("unknown species '{}'", tok[1]));
      }
      if (first) {
        t.ids.push_back(id);
        t.species.push_back(sp);
      } else if (t.ids[i] != id || t.species[i] != sp) {
        throw ParseError(ParseErrorKind::CountMismatch, r.line(), "particle table differs from frame 0");
      }
      f.positions.push_back({parse_number<double>(tok[2], r.line(), "x"), parse_number<double>(tok[3], r.line(), "y")});
      f.velocities.push_back({parse_number<double>(tok[4], r.line(), "vx"), parse_number<double>(tok[5], r.line(), "vy")});
    }
    t.frames.push_back(std::move(f));
  }
  if (t.frames.size() != *n_frames)
    throw ParseError(ParseErrorKind::Truncated, r.line(),
                     fmt::format("file holds {} frames, header declares {}", t.frames.size(), *n_frames));
  if (!t.frames.empty() && ((n_he && t.count(Species::He) != *n_he) || (n_ar && t.count(Species::Ar) != *n_ar)))
    throw ParseError(ParseErrorKind::CountMismatch, 0, "species counts differ from the header");
  return t;
}

Trajectory read_native(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(ParseErrorKind::Io, 0, "cannot open " + path);
  return read_native(in);
}

// ---- LAMMPS text dumps ---------------------------------------------------------

TypeMap default_type_map() { return {{1, Species::He}, {2, Species::Ar}}; }

TypeMap parse_type_map(const std::string& spec) {
  TypeMap map;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError(fmt::format("type map entry '{}' is not type=Species", item));
    int type = 0;
    auto key = std::string_view(item).substr(0, eq);
    while (!key.empty() && key.front() == ' ') key.remove_prefix(1);
    while (!key.empty() && key.back() == ' ') key.remove_suffix(1);
    if (std::from_chars(key.data(), key.data() + key.size(), type).ec != std::errc())
      throw UsageError(fmt::format("bad type id in '{}'", item));
    try {
      auto name = std::string_view(item).substr(eq + 1);
      while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
      while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
      map[type] = parse_species(name);
    } catch (const InputError& e) {
      throw UsageError(e.what());
    }
  }
  if (map.empty()) throw UsageError("empty type map");
  return map;
}

namespace {

struct AtomColumns {
  int id = -1, type = -1, x = -1, y = -1, vx = -1, vy = -1, ix = -1, iy = -1;
  bool scaled = false;
  bool unwrapped = false;
  std::size_t count = 0;
};

AtomColumns map_columns(const std::vector<std::string_view>& header, std::size_t line) {
  // header = "ITEM:" "ATOMS" col...
  AtomColumns c;
  c.count = header.size() - 2;
  int xkind = -1, ykind = -1;  // 0 x, 1 xs, 2 xu, 3 xsu
  for (std::size_t k = 2; k < header.size(); ++k) {
    const int col = static_cast<int>(k - 2);
    const auto name = header[k];
    if (name == "id") c.id = col;
    else if (name == "type") c.type = col;
    else if (name == "vx") c.vx = col;
    else if (name == "vy") c.vy = col;
    else if (name == "ix") c.ix = col;
    else if (name == "iy") c.iy = col;
    else if (name == "x" || name == "xs" || name == "xu" || name == "xsu") {
      if (c.x >= 0) throw ParseError(ParseErrorKind::UnknownColumns, line, "more than one x column");
      c.x = col;
      xkind = name == "x" ? 0 : name == "xs" ? 1 : name == "xu" ? 2 : 3;
    } else if (name == "y" || name == "ys" || name == "yu" || name == "ysu") {
      if (c.y >= 0) throw ParseError(ParseErrorKind::UnknownColumns, line, "more than one y column");
      c.y = col;
      ykind = name == "y" ? 0 : name == "ys" ? 1 : name == "yu" ? 2 : 3;
    }
  }
  if (c.id < 0 || c.type < 0 || c.x < 0 || c.y < 0)
    throw ParseError(ParseErrorKind::UnknownColumns, line, "ATOMS header needs id, type and x/y coordinate columns");
  if (xkind != ykind)
    throw ParseError(ParseErrorKind::UnknownColumns, line, "x and y coordinate styles differ");
  c.scaled = xkind == 1 || xkind == 3;
  c.unwrapped = xkind >= 2 || (c.ix >= 0 && c.iy >= 0);
  return c;
}

void expect_item(LineReader& r, std::string& line, std::string_view item) {
  if (!r.next(line))
    throw ParseError(ParseErrorKind::MissingSection, r.line() + 1,
                     fmt::format("missing 'ITEM: {}' (end of file)", item));
  if (!starts_with(line, fmt::format("ITEM: {}", item)))
    throw ParseError(ParseErrorKind::MissingSection, r.line(),
                     fmt::format("missing 'ITEM: {}', found '{}'", item, line.substr(0, 40)));
}

std::pair<double, double> read_bounds(LineReader& r, std::string& line, const char* axis) {
  if (!r.next(line))
    throw ParseError(ParseErrorKind::Truncated, r.line() + 1, fmt::format("missing {} box bounds", axis));
  const auto tok = split(line);
  if (tok.size() < 2)
    throw ParseError(ParseErrorKind::Truncated, r.line(), fmt::format("{} bounds need lo and hi", axis));
  const double lo = parse_number<double>(tok[0], r.line(), "box bound");
  const double hi = parse_number<double>(tok[1], r.line(), "box bound");
  if (!(hi > lo)) throw ParseError(ParseErrorKind::MalformedHeader, r.line(), "box bounds need hi > lo");
  return {lo, hi};
}

}  // namespace

Trajectory parse_lammps_dump(std::istream& in, const TypeMap& types, double dt_fs) {
  LineReader r(in);
  std::string line;
  Trajectory t;
  t.units = "real";
  t.dt_fs = dt_fs;
  bool have_box = false;
  double xlo = 0, ylo = 0, side = 0;

  // Skip leading blank lines; an empty input is a missing TIMESTEP.
  while (const std::string* p = r.peek()) {
    if (!split(*p).empty()) break;
    r.next(line);
  }
  if (!r.peek()) throw ParseError(ParseErrorKind::MissingSection, 1, "missing 'ITEM: TIMESTEP' (empty input)");

  while (r.peek()) {
    if (split(*r.peek()).empty()) {
      r.next(line);
      continue;
    }
    expect_item(r, line, "TIMESTEP");
    if (!r.next(line)) throw ParseError(ParseErrorKind::Truncated, r.line() + 1, "missing timestep value");
    const auto ts_tok = split(line);
    if (ts_tok.size() != 1) throw ParseError(ParseErrorKind::NonNumeric, r.line(), "timestep line must hold one integer");
    const long timestep = parse_number<long>(ts_tok[0], r.line(), "timestep");
    if (!t.frames.empty() && timestep <= t.frames.back().timestep)
      throw ParseError(ParseErrorKind::MalformedHeader, r.line(), "timesteps must increase between frames");

    expect_item(r, line, "NUMBER OF ATOMS");
    if (!r.next(line)) throw ParseError(ParseErrorKind::Truncated, r.line() + 1, "missing atom count");
    const auto n_tok = split(line);
    if (n_tok.size() != 1) throw ParseError(ParseErrorKind::NonNumeric, r.line(), "atom count line must hold one integer");
    const auto n_atoms = parse_number<std::size_t>(n_tok[0], r.line(), "atom count");

    expect_item(r, line, "BOX BOUNDS");
    if (line.find("xy") != std::string::npos)
      throw ParseError(ParseErrorKind::Unsupported, r.line(), "triclinic boxes are not supported");
    const auto [fxlo, fxhi] = read_bounds(r, line, "x");
    const auto [fylo, fyhi] = read_bounds(r, line, "y");
    if (const std::string* p = r.peek(); p && !starts_with(*p, "ITEM:")) read_bounds(r, line, "z");
    const double lx = fxhi - fxlo, ly = fyhi - fylo;
    if (std::abs(lx - ly) > 1e-9 * lx)
      throw ParseError(ParseErrorKind::Unsupported, r.line(), fmt::format("box is not square ({} x {})", lx, ly));
    if (!have_box) {
      xlo = fxlo;
      ylo = fylo;
      side = lx;
      t.box = SimBox(side);
      have_box = true;
    } else if (std::abs(lx - side) > 1e-9 * side || std::abs(fxlo - xlo) > 1e-9 * side ||
               std::abs(fylo - ylo) > 1e-9 * side) {
      throw ParseError(ParseErrorKind::Unsupported, r.line(), "box changes between frames");
    }

    expect_item(r, line, "ATOMS");
    const std::size_t header_line = r.line();
    const auto cols = map_columns(split(line), header_line);
    const bool has_vel = cols.vx >= 0 && cols.vy >= 0;
    if (t.frames.empty()) {
      t.has_velocities = has_vel;
      t.unwrapped = cols.unwrapped;
    } else if (t.has_velocities != has_vel || t.unwrapped != cols.unwrapped) {
      throw ParseError(ParseErrorKind::UnknownColumns, header_line, "column layout changes between frames");
    }

    struct Row {
      long id;
      Species sp;
      Vec2 pos, vel;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i < n_atoms; ++i) {
      if (!r.next(line))
        throw ParseError(ParseErrorKind::Truncated, r.line() + 1,
                         fmt::format("ATOMS section ends after {} of {} rows", i, n_atoms));
      const auto tok = split(line);
      if (!tok.empty() && tok[0] == "ITEM:")
        throw ParseError(ParseErrorKind::Truncated, r.line(),
                         fmt::format("ATOMS section ends after {} of {} rows", i, n_atoms));
      if (tok.size() != cols.count)
        throw ParseError(ParseErrorKind::CountMismatch, r.line(),
                         fmt::format("row has {} fields, ATOMS header lists {}", tok.size(), cols.count));
      Row row{};
      row.id = parse_number<long>(tok[cols.id], r.line(), "id");
      const int type = parse_number<int>(tok[cols.type], r.line(), "type");
      const auto it = types.find(type);
      if (it == types.end())
        throw ParseError(ParseErrorKind::UnknownType, r.line(), fmt::format("atom type {} has no species mapping", type));
      row.sp = it->second;
      double x = parse_number<double>(tok[cols.x], r.line(), "x");
      double y = parse_number<double>(tok[cols.y], r.line(), "y");
      if (cols.scaled) {
        x *= side;
        y *= side;
      } else {
        x -= xlo;
        y -= ylo;
      }
      if (cols.ix >= 0 && cols.iy >= 0) {
        x += side * parse_number<int>(tok[cols.ix], r.line(), "ix");
        y += side * parse_number<int>(tok[cols.iy], r.line(), "iy");
      }
      row.pos = {x, y};
      if (has_vel)
        row.vel = {parse_number<double>(tok[cols.vx], r.line(), "vx"),
                   parse_number<double>(tok[cols.vy], r.line(), "vy")};
      rows.push_back(row);
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].id == rows[i - 1].id)
        throw ParseError(ParseErrorKind::CountMismatch, header_line, fmt::format("duplicate atom id {}", rows[i].id));

    TrajectoryFrame f;
    f.timestep = timestep;
    f.time_fs = static_cast<double>(timestep) * dt_fs;
    if (t.frames.empty()) {
      for (const auto& row : rows) {
        t.ids.push_back(row.id);
        t.species.push_back(row.sp);
      }
    } else {
      if (rows.size() != t.ids.size())
        throw ParseError(ParseErrorKind::CountMismatch, header_line,
                         fmt::format("frame has {} atoms, first frame had {}", rows.size(), t.ids.size()));
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].id != t.ids[i] || rows[i].sp != t.species[i])
          throw ParseError(ParseErrorKind::CountMismatch, header_line, "atom ids or types differ from the first frame");
    }
    for (const auto& row : rows) {
      f.positions.push_back(row.pos);
      f.velocities.push_back(row.vel);
    }
    t.frames.push_back(std::move(f));
  }
  return t;
}

Trajectory parse_lammps_dump(const std::string& path, const TypeMap& types, double dt_fs) {
  std::ifstream in(path);
  if (!in) throw ParseError(ParseErrorKind::Io, 0, "cannot open " + path);
  return parse_lammps_dump(in, types, dt_fs);
}

void write_lammps_dump(std::ostream& out, const Trajectory& t, const TypeMap& types) {
  t.validate();
  auto type_of = [&](Species s) {
    for (const auto& [type, sp] : types)
      if (sp == s) return type;
    throw UsageError(fmt::format("type map has no entry for {}", to_string(s)));
  };
  const char* coords = t.unwrapped ? "xu yu" : "x y";
  for (const auto& f : t.frames) {
    fmt::print(out, "ITEM: TIMESTEP\n{}\nITEM: NUMBER OF ATOMS\n{}\n", f.timestep, t.ids.size());
    fmt::print(out, "ITEM: BOX BOUNDS pp pp pp\n0 {0:.17g}\n0 {0:.17g}\n-0.5 0.5\n", t.box.side());
    fmt::print(out, "ITEM: ATOMS id type {}{}\n", coords, t.has_velocities ? " vx vy" : "");
    for (std::size_t i = 0; i < t.ids.size(); ++i) {
      fmt::print(out, "{} {} {:.17g} {:.17g}", t.ids[i], type_of(t.species[i]), f.positions[i].x, f.positions[i].y);
      if (t.has_velocities) fmt::print(out, " {:.17g} {:.17g}", f.velocities[i].x, f.velocities[i].y);
      out << '\n';
    }
  }
}

}  // namespace gasdiff
