#pragma once

#include <complex>
#include <vector>

namespace curldec {

// Discrete Fourier transforms backed by FFTW (any length, not just powers
// of two). Results are deterministic across runs.
std::vector<std::complex<double>> fft(const std::vector<std::complex<double>>& x);
std::vector<std::complex<double>> ifft(const std::vector<std::complex<double>>& x);

// Forward transform of a real signal, zero padded or truncated to n points.
std::vector<std::complex<double>> fft_real(const std::vector<double>& x, std::size_t n);

}  // namespace curldec
