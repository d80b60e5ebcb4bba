#include "freqdyn/vmd.hpp"

#include "freqdyn/fft.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace freqdyn {

namespace {

void check_config(const VmdConfig& cfg) {
    if (cfg.n_modes < 1) throw std::invalid_argument("vmd: n_modes must be >= 1");
    if (!(cfg.alpha > 0.0)) throw std::invalid_argument("vmd: alpha must be > 0");
    if (cfg.tau < 0.0) throw std::invalid_argument("vmd: tau must be >= 0");
    if (!(cfg.tol > 0.0)) throw std::invalid_argument("vmd: tol must be > 0");
    if (cfg.max_iters < 1) throw std::invalid_argument("vmd: max_iters must be >= 1");
}

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

std::vector<double> init_centers(const VmdConfig& cfg, double nyquist_hz) {
    const int k = cfg.n_modes;
    std::vector<double> w(static_cast<std::size_t>(k), 0.0);
    switch (cfg.init) {
        case VmdInit::Zero:
            break;
        case VmdInit::Uniform:
            if (k > 1)
                for (int i = 0; i < k; ++i)
                    w[static_cast<std::size_t>(i)] =
                        0.5 * nyquist_hz * static_cast<double>(i) / static_cast<double>(k - 1);
            break;
        case VmdInit::Random: {
            std::uint64_t state = cfg.seed;
            for (auto& v : w) v = 0.5 * nyquist_hz * uniform01(state);
            std::sort(w.begin(), w.end());
            break;
        }
    }
    return w;
}

/// One Wiener update of mode k on the active bins; returns the relative-change
/// contribution, moves the center to the spectral energy centroid and reports
/// the mode's post-update spectral energy.
template <bool WithLambda>
double update_mode(std::size_t nbins, double freq_step, double two_alpha, double& omega,
                   double& energy, const double* f_re, const double* f_im, double* sum_re,
                   double* sum_im, const double* lam_re, const double* lam_im, double* u_re,
                   double* u_im) {
    const double wk = omega;
    double dnum = 0.0, dden = 0.0, wnum = 0.0, wden = 0.0;
    for (std::size_t i = 0; i < nbins; ++i) {
        double nr = f_re[i] - sum_re[i] + u_re[i];
        double ni = f_im[i] - sum_im[i] + u_im[i];
        if constexpr (WithLambda) {
            nr += 0.5 * lam_re[i];
            ni += 0.5 * lam_im[i];
        }
        const double df = static_cast<double>(i) * freq_step - wk;
        const double inv = 1.0 / (1.0 + two_alpha * df * df);
        nr *= inv;
        ni *= inv;
        const double er = nr - u_re[i];
        const double ei = ni - u_im[i];
        dnum += er * er + ei * ei;
        dden += u_re[i] * u_re[i] + u_im[i] * u_im[i];
        sum_re[i] += er;
        sum_im[i] += ei;
        u_re[i] = nr;
        u_im[i] = ni;
        const double m2 = nr * nr + ni * ni;
        wnum += static_cast<double>(i) * m2;
        wden += m2;
    }
    if (wden > 0.0) omega = freq_step * wnum / wden;
    energy = wden;
    if (dden > 0.0) return dnum / dden;
    return dnum > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

} // namespace

VmdResult vmd_decompose(const TimeSeries& series, const VmdConfig& config) {
    check_config(config);
    if (series.has_gaps())
        throw std::runtime_error("vmd: series has gaps; fill_gaps first");
    const std::size_t n = series.size();
    const std::size_t k_modes = static_cast<std::size_t>(config.n_modes);
    if (n < 8 * k_modes)
        throw std::invalid_argument("vmd: need at least 8 samples per mode");
    const double peak = std::accumulate(series.values.begin(), series.values.end(), 0.0,
                                        [](double m, double v) { return std::max(m, std::abs(v)); });
    if (peak == 0.0)
        throw std::invalid_argument("vmd: all-zero input; center-frequency update undefined");

    // Mirror extension: reflect half the signal at each end.
    const std::size_t h1 = n / 2;
    const std::size_t h2 = n - h1;
    std::vector<double> mirror;
    mirror.reserve(2 * n);
    for (std::size_t i = 0; i < h1; ++i) mirror.push_back(series.values[h1 - 1 - i]);
    mirror.insert(mirror.end(), series.values.begin(), series.values.end());
    for (std::size_t i = 0; i < h2; ++i) mirror.push_back(series.values[n - 1 - i]);
    const std::size_t T = 2 * n;

    const auto fhat = fft::rfft(mirror);
    const std::size_t nbins = T / 2;   // active bins: DC up to (not incl.) Nyquist
    const double rate_hz = series.rate.hz();
    const double freq_step = rate_hz / static_cast<double>(T);
    const double nyquist_hz = rate_hz / 2.0;

    // Reseed thresholds reference the AC content only, so they are invariant
    // to constant offsets (DC must influence mode 0 alone).
    std::vector<double> f_re(nbins), f_im(nbins);
    double ac_peak = 0.0, ac_energy = 0.0;
    for (std::size_t i = 0; i < nbins; ++i) {
        f_re[i] = fhat[i].real();
        f_im[i] = fhat[i].imag();
        if (i > 0) {
            const double m2 = f_re[i] * f_re[i] + f_im[i] * f_im[i];
            ac_energy += m2;
            ac_peak = std::max(ac_peak, m2);
        }
    }
    ac_peak = std::sqrt(ac_peak);

    std::vector<std::vector<double>> u_re(k_modes, std::vector<double>(nbins, 0.0));
    std::vector<std::vector<double>> u_im(k_modes, std::vector<double>(nbins, 0.0));
    std::vector<double> sum_re(nbins, 0.0), sum_im(nbins, 0.0);
    std::vector<double> lam_re, lam_im;
    const bool with_lambda = config.tau > 0.0;
    if (with_lambda) {
        lam_re.assign(nbins, 0.0);
        lam_im.assign(nbins, 0.0);
    }

    std::vector<double> omega = init_centers(config, nyquist_hz);
    const double two_alpha = 2.0 * config.alpha;
    const double collision_tol = 1.5 * freq_step;
    const double reseed_floor = 1e-6 * ac_peak;

    VmdResult result;
    std::vector<double> mode_energy(k_modes, 0.0);
    double delta = std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= config.max_iters; ++iter) {
        delta = 0.0;
        for (std::size_t k = 0; k < k_modes; ++k) {
            if (with_lambda)
                delta += update_mode<true>(nbins, freq_step, two_alpha, omega[k], mode_energy[k],
                                           f_re.data(), f_im.data(), sum_re.data(), sum_im.data(),
                                           lam_re.data(), lam_im.data(), u_re[k].data(), u_im[k].data());
            else
                delta += update_mode<false>(nbins, freq_step, two_alpha, omega[k], mode_energy[k],
                                            f_re.data(), f_im.data(), sum_re.data(), sum_im.data(),
                                            nullptr, nullptr, u_re[k].data(), u_im[k].data());
        }

        // Degenerate-center safeguards. Sparse spectra under zero/uniform
        // inits can leave a spectral feature orphaned: either two centers
        // coincide, or a near-empty mode hovers on another mode's leakage
        // skirt while the residual still holds a dominant peak. Re-seed such
        // modes onto the strongest unclaimed residual peak. All thresholds
        // are relative to AC content, so the rules are scale- and
        // offset-invariant and never fire on healthy band-filling modes.
        auto best_unclaimed_bin = [&](std::size_t skip_mode) {
            double best_mag2 = 0.0;
            std::size_t best_bin = 0;
            for (std::size_t i = 0; i < nbins; ++i) {
                const double rr = f_re[i] - sum_re[i];
                const double ri = f_im[i] - sum_im[i];
                const double m2 = rr * rr + ri * ri;
                if (m2 <= best_mag2) continue;
                const double f = static_cast<double>(i) * freq_step;
                bool clear = true;
                for (std::size_t j = 0; j < k_modes; ++j)
                    if (j != skip_mode && std::abs(f - omega[j]) < collision_tol) { clear = false; break; }
                if (clear) {
                    best_mag2 = m2;
                    best_bin = i;
                }
            }
            return std::make_pair(best_bin, best_mag2);
        };
        for (std::size_t k = 1; k < k_modes; ++k) {
            bool collides = false;
            for (std::size_t j = 0; j < k; ++j)
                if (std::abs(omega[k] - omega[j]) < collision_tol) { collides = true; break; }
            if (!collides) continue;
            const auto [bin, mag2] = best_unclaimed_bin(k);
            if (std::sqrt(mag2) >= reseed_floor)
                omega[k] = static_cast<double>(bin) * freq_step;
        }
        std::size_t weakest = 0;
        for (std::size_t k = 1; k < k_modes; ++k)
            if (mode_energy[k] < mode_energy[weakest]) weakest = k;
        const auto [bin, mag2] = best_unclaimed_bin(weakest);
        if (std::sqrt(mag2) >= reseed_floor && mag2 > 10.0 * mode_energy[weakest])
            omega[weakest] = static_cast<double>(bin) * freq_step;

        if (with_lambda) {
            for (std::size_t i = 0; i < nbins; ++i) {
                lam_re[i] += config.tau * (f_re[i] - sum_re[i]);
                lam_im[i] += config.tau * (f_im[i] - sum_im[i]);
            }
        }

        result.iterations = iter;
        if (delta < config.tol) {
            result.converged = true;
            break;
        }
    }
    result.final_delta = delta;

    std::vector<std::size_t> order(k_modes);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return omega[a] < omega[b]; });

    std::vector<double> recon(n, 0.0);
    std::vector<std::complex<double>> half(T / 2 + 1);
    for (std::size_t rank = 0; rank < k_modes; ++rank) {
        const std::size_t k = order[rank];
        for (std::size_t i = 0; i < nbins; ++i) half[i] = {u_re[k][i], u_im[k][i]};
        half[T / 2] = 0.0;
        const auto full = fft::irfft(half, T);
        std::vector<double> mode_vals(full.begin() + static_cast<std::ptrdiff_t>(h1),
                                      full.begin() + static_cast<std::ptrdiff_t>(h1 + n));
        for (std::size_t i = 0; i < n; ++i) recon[i] += mode_vals[i];
        result.center_freqs_hz.push_back(omega[k]);
        result.modes.push_back(make_series(series.start_epoch_ms, series.rate, std::move(mode_vals)));
    }

    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) resid[i] = series.values[i] - recon[i];
    result.residual = make_series(series.start_epoch_ms, series.rate, std::move(resid));
    return result;
}

DecompositionSplit split_qss_dynamic(const TimeSeries& series, const VmdConfig& config) {
    VmdResult r = vmd_decompose(series, config);
    DecompositionSplit split;
    split.qss = std::move(r.modes.front());
    std::vector<double> dyn(series.size());
    for (std::size_t i = 0; i < series.size(); ++i)
        dyn[i] = series.values[i] - split.qss.values[i];
    split.dynamic = make_series(series.start_epoch_ms, series.rate, std::move(dyn));
    return split;
}

} // namespace freqdyn
