#include "gasdiff/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace gasdiff {

struct FftPlan::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  Plans() = default;
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
  ~Plans() {
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
  }
};

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::shared_ptr<const FftPlan::Plans> plans_for(const GridSpec& grid) {
  static std::map<std::pair<int, int>, std::shared_ptr<const FftPlan::Plans>> cache;
  std::lock_guard lock(planner_mutex());
  const auto key = std::make_pair(grid.dim(), grid.n());
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  auto plans = std::make_shared<FftPlan::Plans>();
  std::vector<std::complex<double>> a(grid.size()), b(grid.size());
  auto* pa = reinterpret_cast<fftw_complex*>(a.data());
  auto* pb = reinterpret_cast<fftw_complex*>(b.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (grid.dim() == 1) {
    plans->fwd = fftw_plan_dft_1d(grid.n(), pa, pb, FFTW_FORWARD, flags);
    plans->inv = fftw_plan_dft_1d(grid.n(), pa, pb, FFTW_BACKWARD, flags);
  } else {
    plans->fwd = fftw_plan_dft_2d(grid.n(), grid.n(), pa, pb, FFTW_FORWARD, flags);
    plans->inv = fftw_plan_dft_2d(grid.n(), grid.n(), pa, pb, FFTW_BACKWARD, flags);
  }
  cache.emplace(key, plans);
  return plans;
}

fftw_complex* as_fftw(std::span<std::complex<double>> s) {
  return reinterpret_cast<fftw_complex*>(s.data());
}

// FFTW's new-array execute takes non-const input even for out-of-place plans.
fftw_complex* as_fftw(std::span<const std::complex<double>> s) {
  return reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(s.data()));
}

}  // namespace

FftPlan::FftPlan(const GridSpec& grid) : grid_(grid), plans_(plans_for(grid)) {}

void FftPlan::forward(std::span<const std::complex<double>> in,
                      std::span<std::complex<double>> out) const {
  fftw_execute_dft(plans_->fwd, as_fftw(in), as_fftw(out));
}

void FftPlan::inverse(std::span<const std::complex<double>> in,
                      std::span<std::complex<double>> out) const {
  fftw_execute_dft(plans_->inv, as_fftw(in), as_fftw(out));
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (auto& v : out) v *= scale;
}

std::vector<std::complex<double>> FftPlan::forward_real(const ScalarField& f) const {
  std::vector<std::complex<double>> in(f.values().begin(), f.values().end());
  std::vector<std::complex<double>> out(in.size());
  forward(in, out);
  return out;
}

ScalarField FftPlan::inverse_real(std::span<const std::complex<double>> spectrum) const {
  std::vector<std::complex<double>> out(spectrum.size());
  inverse(spectrum, out);
  std::vector<double> values(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) values[i] = out[i].real();
  return ScalarField(grid_, std::move(values));
}

}  // namespace gasdiff
