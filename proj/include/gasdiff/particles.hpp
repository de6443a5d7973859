#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace gasdiff {

// LAMMPS "real" units throughout: Angstrom, fs, kcal/mol, g/mol, K.

/// Boltzmann constant, kcal/(mol K).
inline constexpr double kBoltzmann = 0.001987;
/// Acceleration in A/fs^2 produced by 1 kcal/(mol A) acting on 1 g/mol.
inline constexpr double kAccelConversion = 4.184e-4;
/// Lennard-Jones cutoff for every pair type, A.
inline constexpr double kCutoff = 20.0;

enum class Species : std::uint8_t { He, Ar };

/// Molar mass, g/mol.
constexpr double species_mass(Species s) { return s == Species::He ? 4.003 : 39.948; }
const char* to_string(Species s);
Species parse_species(std::string_view name);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend Vec2 operator+(Vec2 a, Vec2 b) { return a += b; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return a -= b; }
  friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend bool operator==(Vec2, Vec2) = default;
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
};

/// Square periodic box [0, side)^2.
class SimBox {
 public:
  explicit SimBox(double side = 5e4);

  double side() const noexcept { return side_; }

  /// Shift dx by a multiple of side into [-side/2, side/2). Valid for |dx| < 2 side.
  double minimum_image(double dx) const noexcept {
    if (dx >= 0.5 * side_) dx -= side_;
    else if (dx < -0.5 * side_) dx += side_;
    return dx;
  }
  Vec2 minimum_image(Vec2 d) const noexcept { return {minimum_image(d.x), minimum_image(d.y)}; }

  /// Map any coordinate into [0, side).
  double wrap(double x) const noexcept {
    double w = x - side_ * std::floor(x / side_);
    return w >= side_ ? 0.0 : w;
  }
  Vec2 wrap(Vec2 p) const noexcept { return {wrap(p.x), wrap(p.y)}; }

  /// Throws unless side > 2 r_cut.
  void check_cutoff(double r_cut) const;

 private:
  double side_;
};

}  // namespace gasdiff
