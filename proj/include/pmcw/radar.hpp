#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmcw/phase_code.hpp"
#include "pmcw/rng.hpp"
#include "pmcw/types.hpp"

namespace pmcw {

constexpr double speed_of_light = 299792458.0;

// Burst timing of the victim radar: K chips of T_c seconds per burst, N
// bursts per CPI, burst repetition interval T (back-to-back bursts by
// default, T = K * T_c, the continuous-wave case).
struct WaveformTiming {
    double f_c = 0.0;
    double T_c = 0.0;
    std::size_t K = 0;
    std::size_t N = 0;
    double T = 0.0;

    WaveformTiming(double carrier_hz, double chip_s, std::size_t chips, std::size_t bursts,
                   double burst_interval_s = 0.0)
        : f_c(carrier_hz), T_c(chip_s), K(chips), N(bursts),
          T(burst_interval_s > 0.0 ? burst_interval_s : chip_s * static_cast<double>(chips)) {
        if (!(f_c > 0.0)) throw std::invalid_argument("WaveformTiming: f_c must be > 0");
        if (!(T_c > 0.0)) throw std::invalid_argument("WaveformTiming: T_c must be > 0");
        if (K < 2) throw std::invalid_argument("WaveformTiming: K must be >= 2");
        if (N < 1) throw std::invalid_argument("WaveformTiming: N must be >= 1");
        if (T < T_c * static_cast<double>(K) * (1.0 - 1e-12))
            throw std::invalid_argument("WaveformTiming: T must be >= K * T_c");
    }

    double range_bin_size() const { return speed_of_light * T_c / 2.0; }
    double doppler_bin_size() const { return 1.0 / (static_cast<double>(N) * T); } // Hz
};

// Point target seen two-way. The absolute echo phase (carrier times delay) is
// absorbed into the complex amplitude, as is any link-budget constant.
struct TargetParams {
    double range = 0.0;     // m
    double velocity = 0.0;  // m/s, positive toward the radar
    cdouble amplitude = 1.0;

    TargetParams(double range_m, double velocity_mps, cdouble amp = 1.0)
        : range(range_m), velocity(velocity_mps), amplitude(amp) {
        if (range < 0.0) throw std::invalid_argument("TargetParams: range must be >= 0");
        if (std::abs(velocity) >= speed_of_light / 100.0)
            throw std::invalid_argument("TargetParams: velocity must be non-relativistic");
    }

    double doppler_hz(const WaveformTiming& t) const {
        return (2.0 * velocity / speed_of_light) * t.f_c;
    }
    // floor() of the two-way delay in chips; fractional-chip delays are not modeled
    long delay_bins(const WaveformTiming& t) const {
        return static_cast<long>(std::floor(2.0 * range / speed_of_light / t.T_c));
    }
};

// Interfering radar heard one-way (direct path), transmitting code y.
struct InterfererParams {
    double separation = 0.0; // m
    double velocity = 0.0;   // m/s relative, positive closing
    cdouble amplitude = 1.0;

    InterfererParams(double separation_m, double velocity_mps, cdouble amp = 1.0)
        : separation(separation_m), velocity(velocity_mps), amplitude(amp) {
        if (separation < 0.0) throw std::invalid_argument("InterfererParams: separation must be >= 0");
        if (std::abs(velocity) >= speed_of_light / 100.0)
            throw std::invalid_argument("InterfererParams: velocity must be non-relativistic");
    }

    double doppler_hz(const WaveformTiming& t) const {
        return (velocity / speed_of_light) * t.f_c;
    }
    long delay_bins(const WaveformTiming& t) const {
        return static_cast<long>(std::floor(separation / speed_of_light / t.T_c));
    }
};

struct Scenario {
    WaveformTiming timing;
    std::vector<TargetParams> targets; // the stock scene has one
    std::optional<InterfererParams> interferer;
    double noise_variance = 0.0; // per complex sample
    std::uint64_t noise_seed = 0;

    Scenario(WaveformTiming t, std::vector<TargetParams> tg = {},
             std::optional<InterfererParams> in = std::nullopt, double sigma2 = 0.0,
             std::uint64_t seed = 0)
        : timing(t), targets(std::move(tg)), interferer(std::move(in)), noise_variance(sigma2),
          noise_seed(seed) {
        if (noise_variance < 0.0)
            throw std::invalid_argument("Scenario: noise_variance must be >= 0");
    }
};

// Complex range-Doppler map: rows m are range bins, columns p raw DFT Doppler
// bins (exports re-order to a centered axis for display).
struct RangeDopplerMap {
    Matrix data;
    double range_bin_size = 0.0;   // m per row
    double doppler_bin_size = 0.0; // Hz per Doppler bin
};

// D_n(x) = sin(n*pi*x) / (pi*x), the slow-time DFT envelope of an off-grid
// Doppler tone; D_n(0) = n by the removable-singularity limit.
inline double dirichlet(int n, double x) {
    if (n < 1) throw std::invalid_argument("dirichlet: n must be >= 1");
    if (x == 0.0) return static_cast<double>(n);
    const double pi = two_pi / 2.0;
    return std::sin(static_cast<double>(n) * pi * x) / (pi * x);
}

// Raw K x N fast/slow-time samples of one echo:
//   out(m, n) = amplitude * e^{j*2*pi*(fhat*m + ftil*n)} * code[(m - delay) mod K]
// fhat is the Doppler phase advance per chip (f_d * T_c), ftil per burst
// (f_d * T). Circular code repetition makes the delay wrap mod K.
inline Matrix sample_echo(const PhaseCode& code, long delay_bins, double fhat, double ftil,
                          cdouble amplitude, const WaveformTiming& timing) {
    if (code.size() != timing.K)
        throw std::invalid_argument("sample_echo: code length does not match timing.K");
    const long k = static_cast<long>(timing.K);
    if (delay_bins < 0 || delay_bins >= k)
        throw std::invalid_argument("sample_echo: delay_bins out of range [0, K)");
    const cvec& c = code.entries();
    Matrix out(timing.K, timing.N);
    for (long m = 0; m < k; ++m) {
        const cdouble chip = c[static_cast<std::size_t>(((m - delay_bins) % k + k) % k)];
        const double am = two_pi * fhat * static_cast<double>(m);
        const cdouble fast(std::cos(am), std::sin(am));
        const cdouble row_base = amplitude * fast * chip;
        for (std::size_t n = 0; n < timing.N; ++n) {
            const double an = two_pi * ftil * static_cast<double>(n);
            out(m, n) = row_base * cdouble(std::cos(an), std::sin(an));
        }
    }
    return out;
}

// Adds circularly symmetric complex Gaussian noise, per-sample variance
// sigma2 (each part sigma2 / 2). Counter-based: sample (r, c) depends only on
// (seed, flat index), so results are reproducible and order independent.
inline Matrix add_noise(const Matrix& samples, double sigma2, std::uint64_t seed) {
    if (sigma2 < 0.0) throw std::invalid_argument("add_noise: sigma2 must be >= 0");
    if (sigma2 == 0.0) return samples;
    const double scale = std::sqrt(sigma2);
    CounterRng rng(seed, /*stream=*/0xad015e);
    Matrix out = samples;
    cdouble* d = out.data();
    const std::size_t total = out.rows() * out.cols();
    for (std::size_t i = 0; i < total; ++i) d[i] += scale * rng.complex_gaussian(i);
    return out;
}

// The victim's correlator, per slow-time column:
//   out(m, n) = sum_k conj(x_k) * received((k + m) mod K, n)
// Circular, matching the periodic transmission model.
inline Matrix correlate_range(const Matrix& received, const PhaseCode& x) {
    if (received.rows() != x.size())
        throw std::invalid_argument("correlate_range: row count does not match code length");
    const std::size_t k = x.size();
    const std::size_t n = received.cols();
    const cvec& xe = x.entries();
    Matrix out(k, n);
    for (std::size_t m = 0; m < k; ++m) {
        for (std::size_t col = 0; col < n; ++col) {
            cdouble acc = 0.0;
            for (std::size_t i = 0; i < k; ++i)
                acc += std::conj(xe[i]) * received((i + m) % k, col);
            out(m, col) = acc;
        }
    }
    return out;
}

// Slow-time DFT per range row: out(m, p) = sum_n in(m, n) * e^{-j*2*pi*n*p/N}.
// Twiddles come from an exact mod-N table so bin q of a pure tone e^{j*2*pi*q*n/N}
// sums with exactly matched angles.
inline RangeDopplerMap range_doppler(const Matrix& profiles, const WaveformTiming& timing) {
    const std::size_t n = profiles.cols();
    if (n != timing.N || profiles.rows() != timing.K)
        throw std::invalid_argument("range_doppler: profile dimensions do not match timing");
    cvec twiddle(n);
    for (std::size_t q = 0; q < n; ++q) {
        const double a = -two_pi * static_cast<double>(q) / static_cast<double>(n);
        twiddle[q] = {std::cos(a), std::sin(a)};
    }
    RangeDopplerMap map{Matrix(profiles.rows(), n), timing.range_bin_size(),
                        timing.doppler_bin_size()};
    for (std::size_t m = 0; m < profiles.rows(); ++m) {
        for (std::size_t p = 0; p < n; ++p) {
            cdouble acc = 0.0;
            for (std::size_t t = 0; t < n; ++t) acc += profiles(m, t) * twiddle[(t * p) % n];
            map.data(m, p) = acc;
        }
    }
    return map;
}

// Full victim receive chain: target echoes (code x, two-way Doppler) plus
// interferer leakage (code y, one-way Doppler) plus noise, correlated against
// x and DFT-processed. Absent pieces contribute zero.
inline RangeDopplerMap simulate(const PhaseCode& x, const PhaseCode& y, const Scenario& sc) {
    const WaveformTiming& t = sc.timing;
    if (x.size() != t.K || y.size() != t.K)
        throw std::invalid_argument("simulate: code length does not match scenario timing.K");
    Matrix rx(t.K, t.N);
    const long k = static_cast<long>(t.K);
    for (const TargetParams& tg : sc.targets) {
        const double fd = tg.doppler_hz(t);
        const long delay = ((tg.delay_bins(t) % k) + k) % k;
        rx += sample_echo(x, delay, fd * t.T_c, fd * t.T, tg.amplitude, t);
    }
    if (sc.interferer) {
        const InterfererParams& in = *sc.interferer;
        const double fd = in.doppler_hz(t);
        const long delay = ((in.delay_bins(t) % k) + k) % k;
        rx += sample_echo(y, delay, fd * t.T_c, fd * t.T, in.amplitude, t);
    }
    rx = add_noise(rx, sc.noise_variance, sc.noise_seed);
    return range_doppler(correlate_range(rx, x), t);
}

// Relative radar-equation amplitude helpers (free normalization chosen so the
// stock two-vehicle scene shows the interference ridge well above noise):
// two-way amplitude falls as R^-2 and equals 1 at 20 m; one-way as R^-1 and
// equals 4 at 200 m.
inline double reference_target_amplitude(double range_m) {
    if (!(range_m > 0.0))
        throw std::invalid_argument("reference_target_amplitude: range must be > 0");
    return (20.0 / range_m) * (20.0 / range_m);
}

inline double reference_interferer_amplitude(double separation_m) {
    if (!(separation_m > 0.0))
        throw std::invalid_argument("reference_interferer_amplitude: separation must be > 0");
    return 800.0 / separation_m;
}

} // namespace pmcw
