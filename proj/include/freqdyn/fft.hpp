#ifndef FREQDYN_FFT_HPP
#define FREQDYN_FFT_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace freqdyn::fft {

/// Real-input FFT: returns the n/2+1 non-negative-frequency bins.
std::vector<std::complex<double>> rfft(std::span<const double> x);

/// Inverse of rfft for a Hermitian half-spectrum; returns n real samples,
/// normalized so irfft(rfft(x), x.size()) == x.
std::vector<double> irfft(std::span<const std::complex<double>> half, std::size_t n);

} // namespace freqdyn::fft

#endif
