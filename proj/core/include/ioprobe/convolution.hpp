#pragma once

#include <cstddef>
#include <span>

namespace ioprobe {

/// Above this horizon toeplitz_apply switches from the direct sum to FFT.
inline constexpr std::size_t kDirectConvolutionLimit = 2048;

/// y[t] (+)= sum_{k=0}^{t} g[k] u[t-k], t < y.size(). All spans have equal length.
void convolve_direct(std::span<const double> g, std::span<const double> u, std::span<double> y,
                     bool accumulate);

/// Same truncated causal convolution via FFTW.
void convolve_fft(std::span<const double> g, std::span<const double> u, std::span<double> y,
                  bool accumulate);

/// Dispatches on length against kDirectConvolutionLimit.
void convolve(std::span<const double> g, std::span<const double> u, std::span<double> y,
              bool accumulate);

}  // namespace ioprobe
