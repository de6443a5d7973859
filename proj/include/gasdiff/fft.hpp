#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "gasdiff/core.hpp"

namespace gasdiff {

/// Unnormalized forward / normalized inverse complex DFT on a GridSpec,
/// backed by FFTW. Plans are shared per grid shape; executing them is
/// thread-safe, so one FftPlan may be used from several threads at once.
class FftPlan {
 public:
  explicit FftPlan(const GridSpec& grid);

  const GridSpec& grid() const noexcept { return grid_; }

  /// uhat_m = sum_j u_j exp(-2 pi i m.j / N)
  void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const;
  /// u_j = N^-d sum_m uhat_m exp(2 pi i m.j / N)
  void inverse(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const;

  std::vector<std::complex<double>> forward_real(const ScalarField& f) const;
  /// Inverse transform keeping the real part.
  ScalarField inverse_real(std::span<const std::complex<double>> spectrum) const;

  struct Plans;

 private:
  GridSpec grid_;
  std::shared_ptr<const Plans> plans_;
};

}  // namespace gasdiff
