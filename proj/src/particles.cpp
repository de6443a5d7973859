#include "gasdiff/particles.hpp"

#include <fmt/format.h>

#include "gasdiff/error.hpp"

namespace gasdiff {

const char* to_string(Species s) { return s == Species::He ? "He" : "Ar"; }

Species parse_species(std::string_view name) {
  if (name == "He" || name == "he") return Species::He;
  if (name == "Ar" || name == "ar") return Species::Ar;
  throw InputError(fmt::format("unknown species '{}'", name));
}

SimBox::SimBox(double side) : side_(side) {
  if (!(side > 0.0)) throw UsageError(fmt::format("box side must be positive, got {}", side));
}

void SimBox::check_cutoff(double r_cut) const {
  if (!(side_ > 2.0 * r_cut))
    throw UsageError(fmt::format("box side {} A must exceed twice the cutoff ({} A)", side_, r_cut));
}

}  // namespace gasdiff
