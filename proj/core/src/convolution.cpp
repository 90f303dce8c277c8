#include "ioprobe/convolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <memory>
#include <mutex>
#include <vector>

#include "ioprobe/error.hpp"

namespace ioprobe {

namespace {

// The FFTW planner keeps global state; execution of distinct plans is re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
using PlanPtr = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

std::size_t fft_size(std::size_t n) {
  std::size_t m = 1;
  while (m < 2 * n) m <<= 1;
  return m;
}

}  // namespace

void convolve_direct(std::span<const double> g, std::span<const double> u, std::span<double> y,
                     bool accumulate) {
  const std::size_t n = y.size();
  if (g.size() != n || u.size() != n) throw DimensionError("convolve: length mismatch");
  if (!accumulate) std::fill(y.begin(), y.end(), 0.0);
  // Column sweep: y[k:] += g[k] * u[:n-k]; contiguous and vectorizable.
  for (std::size_t k = 0; k < n; ++k) {
    const double gk = g[k];
    if (gk == 0.0) continue;
    double* __restrict out = y.data() + k;
    const double* __restrict in = u.data();
    const std::size_t len = n - k;
    for (std::size_t t = 0; t < len; ++t) out[t] += gk * in[t];
  }
}

void convolve_fft(std::span<const double> g, std::span<const double> u, std::span<double> y,
                  bool accumulate) {
  const std::size_t n = y.size();
  if (g.size() != n || u.size() != n) throw DimensionError("convolve: length mismatch");
  const std::size_t m = fft_size(n);
  const std::size_t bins = m / 2 + 1;

  std::unique_ptr<double, FftwFree> a(static_cast<double*>(fftw_malloc(sizeof(double) * m)));
  std::unique_ptr<double, FftwFree> b(static_cast<double*>(fftw_malloc(sizeof(double) * m)));
  std::unique_ptr<fftw_complex, FftwFree> fa(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));
  std::unique_ptr<fftw_complex, FftwFree> fb(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));

  PlanPtr pa, pb, inv;
  {
    std::lock_guard lock(planner_mutex());
    pa.reset(fftw_plan_dft_r2c_1d(static_cast<int>(m), a.get(), fa.get(), FFTW_ESTIMATE));
    pb.reset(fftw_plan_dft_r2c_1d(static_cast<int>(m), b.get(), fb.get(), FFTW_ESTIMATE));
    inv.reset(fftw_plan_dft_c2r_1d(static_cast<int>(m), fa.get(), a.get(), FFTW_ESTIMATE));
  }
  std::fill(a.get(), a.get() + m, 0.0);
  std::fill(b.get(), b.get() + m, 0.0);
  std::copy(g.begin(), g.end(), a.get());
  std::copy(u.begin(), u.end(), b.get());
  fftw_execute(pa.get());
  fftw_execute(pb.get());
  for (std::size_t i = 0; i < bins; ++i) {
    const std::complex<double> x(fa.get()[i][0], fa.get()[i][1]);
    const std::complex<double> z(fb.get()[i][0], fb.get()[i][1]);
    const auto p = x * z;
    fa.get()[i][0] = p.real();
    fa.get()[i][1] = p.imag();
  }
  fftw_execute(inv.get());
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t t = 0; t < n; ++t) {
    const double v = a.get()[t] * scale;
    y[t] = accumulate ? y[t] + v : v;
  }
}

void convolve(std::span<const double> g, std::span<const double> u, std::span<double> y,
              bool accumulate) {
  if (y.size() <= kDirectConvolutionLimit) {
    convolve_direct(g, u, y, accumulate);
  } else {
    convolve_fft(g, u, y, accumulate);
  }
}

}  // namespace ioprobe
