#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace gasdiff {

/// Uniform periodic grid on the unit square (d=2) or unit interval (d=1).
/// Values live at cell centres x_j = (j + 1/2) h, the same cells that
/// binning counts particles into.
class GridSpec {
 public:
  GridSpec(int d, int n);

  int dim() const noexcept { return d_; }
  int n() const noexcept { return n_; }
  double h() const noexcept { return 1.0 / n_; }
  std::size_t size() const noexcept;

  /// Row-major flat index, j = j1 * N + j2 for d=2.
  std::size_t index(int j1, int j2 = 0) const noexcept {
    return d_ == 1 ? static_cast<std::size_t>(j1)
                   : static_cast<std::size_t>(j1) * n_ + j2;
  }
  double cell_center(int j) const noexcept { return (j + 0.5) / n_; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int d_;
  int n_;
};

/// Concentration values on a GridSpec at one time level.
class ScalarField {
 public:
  explicit ScalarField(GridSpec grid, double fill = 0.0);
  ScalarField(GridSpec grid, std::vector<double> values);

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  std::vector<double>&& take() && { return std::move(values_); }

  double& operator[](std::size_t j) noexcept { return values_[j]; }
  double operator[](std::size_t j) const noexcept { return values_[j]; }
  double& at(int j1, int j2 = 0) noexcept { return values_[grid_.index(j1, j2)]; }
  double at(int j1, int j2 = 0) const noexcept { return values_[grid_.index(j1, j2)]; }

  bool all_finite() const noexcept;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// Mean value (1/N^d) sum_j f_j, the discrete total mass on the unit domain.
double field_mass(const ScalarField& f);

/// Discrete energy sum_j f_j^2.
double field_energy(const ScalarField& f);

/// Physical scale of the nondimensional unit square and time unit.
struct UnitScale {
  double box_length_cm = 5e-4;
  double time_unit_s = 1e-9;

  void validate() const;
  /// Conversion factor from nondimensional D (unit^2 / time unit) to cm^2/s.
  double diffusion_factor() const;
  double fs_to_nd_time(double t_fs) const { return t_fs * 1e-15 / time_unit_s; }
};

double nd_to_physical_D(double d_nd, const UnitScale& scale);
double physical_to_nd_D(double d_cm2_s, const UnitScale& scale);

/// Field CSV: `# N=<N> d=<d> t=<time>` then N rows of N values (d=2) or one
/// row (d=1). Values are printed with 17 significant digits.
void write_field_csv(std::ostream& out, const ScalarField& f, double t);
void write_field_csv(const std::string& path, const ScalarField& f, double t);

struct TimedField {
  ScalarField field;
  double time;
};

TimedField read_field_csv(std::istream& in);
TimedField read_field_csv(const std::string& path);

}  // namespace gasdiff
