#include "freqdyn/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace freqdyn::fft {

namespace {

// FFTW plan creation is not thread-safe; execution via the new-array API is.
// FFTW_ESTIMATE keeps plan selection (and thus rounding) deterministic.
std::mutex plan_mutex;

fftw_plan r2c_plan(std::size_t n) {
    static std::map<std::size_t, fftw_plan> cache;
    std::lock_guard lock(plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> in(n);
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                       reinterpret_cast<fftw_complex*>(out.data()),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(n, p);
    return p;
}

fftw_plan c2r_plan(std::size_t n) {
    static std::map<std::size_t, fftw_plan> cache;
    std::lock_guard lock(plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<std::complex<double>> in(n / 2 + 1);
    std::vector<double> out(n);
    fftw_plan p = fftw_plan_dft_c2r_1d(static_cast<int>(n),
                                       reinterpret_cast<fftw_complex*>(in.data()), out.data(),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(n, p);
    return p;
}

} // namespace

std::vector<std::complex<double>> rfft(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0)
        throw std::invalid_argument("rfft: empty input");
    std::vector<double> in(x.begin(), x.end());
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_execute_dft_r2c(r2c_plan(n), in.data(), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

std::vector<double> irfft(std::span<const std::complex<double>> half, std::size_t n) {
    if (n == 0 || half.size() != n / 2 + 1)
        throw std::invalid_argument("irfft: half spectrum size must be n/2+1");
    // FFTW's c2r destroys its input; work on a copy.
    std::vector<std::complex<double>> in(half.begin(), half.end());
    std::vector<double> out(n);
    fftw_execute_dft_c2r(c2r_plan(n), reinterpret_cast<fftw_complex*>(in.data()), out.data());
    const double scale = 1.0 / static_cast<double>(n);
    for (double& v : out) v *= scale;
    return out;
}

} // namespace freqdyn::fft
