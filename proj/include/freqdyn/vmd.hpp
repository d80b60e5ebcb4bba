#ifndef FREQDYN_VMD_HPP
#define FREQDYN_VMD_HPP

#include "freqdyn/timeseries.hpp"

#include <cstdint>
#include <vector>

namespace freqdyn {

enum class VmdInit { Uniform, Zero, Random };

struct VmdConfig {
    int n_modes = 3;          // number of extracted modes
    double alpha = 2000.0;    // data-fidelity balancing parameter
    double tau = 0.0;         // Lagrangian ascent step; 0 = noise-slack mode
    double tol = 1e-7;        // convergence tolerance on relative spectral update
    int max_iters = 500;
    VmdInit init = VmdInit::Uniform;
    std::uint64_t seed = 0;   // used by VmdInit::Random
};

struct VmdResult {
    std::vector<TimeSeries> modes;      // ascending center frequency
    std::vector<double> center_freqs_hz;
    TimeSeries residual;                // input − Σ modes
    int iterations = 0;
    bool converged = false;
    double final_delta = 0.0;           // last Σ_k ‖Δû_k‖²/‖û_k‖²
};

/// Decomposes a gap-free series into band-limited modes by solving the
/// variational problem in the spectral domain with an alternating direction
/// method of multipliers. Per iteration each mode receives a Wiener-filter
/// update û_k = (f̂ − Σ_{i≠k}û_i + λ̂/2) / (1 + 2α(f − f_k)²) on the
/// non-negative half spectrum, its center is moved to the spectral energy
/// centroid, and (for tau > 0) the multiplier ascends by tau·(f̂ − Σû).
/// The input is mirror-extended to twice its length before the FFT and the
/// central half retained after inversion. Frequencies are handled in Hz.
///
/// Non-convergence within max_iters is reported via VmdResult::converged,
/// never thrown. An all-zero input throws (center update undefined).
VmdResult vmd_decompose(const TimeSeries& series, const VmdConfig& config);

struct DecompositionSplit {
    TimeSeries qss;       // lowest-center mode: the quasi-steady-state track
    TimeSeries dynamic;   // input − qss: local fluctuation incl. residual
};

/// qss + dynamic == input exactly, sample for sample.
DecompositionSplit split_qss_dynamic(const TimeSeries& series, const VmdConfig& config);

} // namespace freqdyn

#endif
