#include "gasdiff/core.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gasdiff/error.hpp"

namespace gasdiff {

GridSpec::GridSpec(int d, int n) : d_(d), n_(n) {
  if (d != 1 && d != 2) throw UsageError(fmt::format("grid dimension must be 1 or 2, got {}", d));
  if (n < 2) throw UsageError(fmt::format("grid needs N >= 2, got {}", n));
}

std::size_t GridSpec::size() const noexcept {
  return d_ == 1 ? static_cast<std::size_t>(n_) : static_cast<std::size_t>(n_) * n_;
}

ScalarField::ScalarField(GridSpec grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(GridSpec grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw InputError(fmt::format("field has {} values, grid needs {}", values_.size(), grid_.size()));
}

bool ScalarField::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double field_mass(const ScalarField& f) {
  auto v = f.values();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double field_energy(const ScalarField& f) {
  auto v = f.values();
  return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

void UnitScale::validate() const {
  if (!(box_length_cm > 0.0) || !(time_unit_s > 0.0))
    throw UsageError(fmt::format("unit scale must be positive (box {} cm, time unit {} s)",
                                 box_length_cm, time_unit_s));
}

double UnitScale::diffusion_factor() const {
  validate();
  return box_length_cm * box_length_cm / time_unit_s;
}

double nd_to_physical_D(double d_nd, const UnitScale& scale) { return d_nd * scale.diffusion_factor(); }

double physical_to_nd_D(double d_cm2_s, const UnitScale& scale) {
  return d_cm2_s / scale.diffusion_factor();
}

void write_field_csv(std::ostream& out, const ScalarField& f, double t) {
  const auto& g = f.grid();
  fmt::print(out, "# N={} d={} t={:.17g}\n", g.n(), g.dim(), t);
  const int rows = g.dim() == 2 ? g.n() : 1;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < g.n(); ++c) {
      const double v = g.dim() == 2 ? f.at(r, c) : f.at(c);
      fmt::print(out, c == 0 ? "{:.17g}" : ",{:.17g}", v);
    }
    out << '\n';
  }
}

void write_field_csv(const std::string& path, const ScalarField& f, double t) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  write_field_csv(out, f, t);
}

namespace {

double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(ParseErrorKind::NonNumeric, line, fmt::format("bad number '{}'", s));
  }
}

}  // namespace

TimedField read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(ParseErrorKind::MalformedHeader, 1, "empty field file");
  int n = 0, d = 0;
  double t = 0.0;
  {
    char tbuf[64] = {};
    if (std::sscanf(line.c_str(), "# N=%d d=%d t=%63s", &n, &d, tbuf) != 3)
      throw ParseError(ParseErrorKind::MalformedHeader, 1, "expected '# N=<N> d=<d> t=<time>'");
    t = parse_double(tbuf, 1);
  }
  if ((d != 1 && d != 2) || n < 2)
    throw ParseError(ParseErrorKind::MalformedHeader, 1, fmt::format("invalid N={} d={}", n, d));
  GridSpec grid(d, n);
  std::vector<double> values;
  values.reserve(grid.size());
  const int rows = d == 2 ? n : 1;
  for (int r = 0; r < rows; ++r) {
    if (!std::getline(in, line))
      throw ParseError(ParseErrorKind::Truncated, static_cast<std::size_t>(r) + 2, "missing field row");
    std::stringstream ss(line);
    std::string cell;
    int count = 0;
    while (std::getline(ss, cell, ',')) {
      values.push_back(parse_double(cell, static_cast<std::size_t>(r) + 2));
      ++count;
    }
    if (count != n)
      throw ParseError(ParseErrorKind::CountMismatch, static_cast<std::size_t>(r) + 2,
                       fmt::format("row has {} values, expected {}", count, n));
  }
  return {ScalarField(grid, std::move(values)), t};
}

TimedField read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(ParseErrorKind::Io, 0, "cannot open " + path);
  return read_field_csv(in);
}

}  // namespace gasdiff
