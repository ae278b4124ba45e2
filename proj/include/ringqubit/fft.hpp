#pragma once

#include <complex>
#include <span>
#include <vector>

// Thin RAII wrappers over FFTW (estimate planning, so results are reproducible).
namespace ringqubit::fft {

// Unnormalised real-to-complex transform; returns n/2 + 1 bins.
std::vector<std::complex<double>> rfft(std::span<const double> x);

// In-place unnormalised 2D transform of a row-major rows x cols array.
// sign = -1 forward, +1 backward.
void fft2(std::vector<std::complex<double>>& data, int rows, int cols, int sign);

const char* backend_version();

}  // namespace ringqubit::fft
