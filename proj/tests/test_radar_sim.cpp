#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include <pmcw/correlation.hpp>
#include <pmcw/radar.hpp>
#include <pmcw/rng.hpp>
#include <pmcw/solver.hpp>

using namespace pmcw;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = two_pi / 2.0;

// Quadratic-phase code with perfect periodic autocorrelation for even K.
PhaseCode quadratic_phase_code(std::size_t k) {
    std::vector<double> ph(k);
    for (std::size_t i = 0; i < k; ++i)
        ph[i] = -pi * static_cast<double>(i * i) / static_cast<double>(k);
    return PhaseCode(std::move(ph));
}

double map_energy(const Matrix& m) {
    double e = 0.0;
    for (const cdouble& v : m.storage()) e += std::norm(v);
    return e;
}

std::pair<std::size_t, std::size_t> argmax_cell(const Matrix& m) {
    std::size_t bi = 0, bj = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (std::abs(m(i, j)) > best) {
                best = std::abs(m(i, j));
                bi = i;
                bj = j;
            }
    return {bi, bj};
}

} // namespace

TEST_CASE("timing validates and derives bin sizes", "[radar]") {
    const WaveformTiming t(79e9, 6.66e-9, 50, 140);
    CHECK_THAT(t.T, WithinRel(50 * 6.66e-9, 1e-15));
    CHECK_THAT(t.range_bin_size(), WithinRel(speed_of_light * 6.66e-9 / 2.0, 1e-15));
    CHECK_THAT(t.doppler_bin_size(), WithinRel(1.0 / (140.0 * t.T), 1e-12));

    CHECK_THROWS_AS(WaveformTiming(0.0, 1e-9, 4, 2), std::invalid_argument);
    CHECK_THROWS_AS(WaveformTiming(1e9, -1e-9, 4, 2), std::invalid_argument);
    CHECK_THROWS_AS(WaveformTiming(1e9, 1e-9, 0, 2), std::invalid_argument);
    CHECK_THROWS_AS(WaveformTiming(1e9, 1e-9, 4, 0), std::invalid_argument);
    // explicit burst interval must cover the whole code
    CHECK_THROWS_AS(WaveformTiming(1e9, 1e-9, 4, 2, 3e-9), std::invalid_argument);
    CHECK_NOTHROW(WaveformTiming(1e9, 1e-9, 4, 2, 5e-9));
}

TEST_CASE("target parameters derive Doppler and delay as stated", "[radar]") {
    const WaveformTiming t(79e9, 6.66e-9, 50, 140);
    const TargetParams tg(20.0, 30.0);
    CHECK_THAT(tg.doppler_hz(t), WithinRel(2.0 * 30.0 / speed_of_light * 79e9, 1e-12));
    CHECK(tg.delay_bins(t) == 20); // floor(133.4 ns / 6.66 ns)

    const InterfererParams in(200.0, -20.0, 4.0);
    CHECK_THAT(in.doppler_hz(t), WithinRel(-20.0 / speed_of_light * 79e9, 1e-12));
    CHECK(in.delay_bins(t) == 100);

    CHECK_THROWS_AS(TargetParams(-1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(TargetParams(10.0, speed_of_light / 50.0), std::invalid_argument);
    CHECK_THROWS_AS(InterfererParams(-1.0, 0.0), std::invalid_argument);
}

TEST_CASE("reference amplitudes normalize to the stock geometry", "[radar]") {
    CHECK_THAT(reference_target_amplitude(20.0), WithinAbs(1.0, 1e-15));
    CHECK_THAT(reference_interferer_amplitude(200.0), WithinAbs(4.0, 1e-15));
    CHECK_THROWS_AS(reference_target_amplitude(0.0), std::invalid_argument);
    CHECK_THROWS_AS(reference_interferer_amplitude(-5.0), std::invalid_argument);
}

TEST_CASE("dirichlet kernel frozen values", "[radar]") {
    CHECK(dirichlet(140, 0.0) == 140.0);
    CHECK_THAT(dirichlet(4, 0.25), WithinAbs(0.0, 1e-12));
    CHECK_THAT(dirichlet(3, 0.1), WithinRel(std::sin(0.3 * pi) / (0.1 * pi), 1e-12));
}

TEST_CASE("echo of an undelayed static all-ones code is all ones", "[radar]") {
    const WaveformTiming t(1e9, 1e-6, 4, 2);
    const Matrix e = sample_echo(PhaseCode({0, 0, 0, 0}), 0, 0.0, 0.0, 1.0, t);
    REQUIRE(e.rows() == 4);
    REQUIRE(e.cols() == 2);
    for (const cdouble& v : e.storage()) CHECK_THAT(std::abs(v - cdouble(1.0)), WithinAbs(0.0, 1e-15));
}

TEST_CASE("echo delay circularly rotates the code down the column", "[radar]") {
    const WaveformTiming t(1e9, 1e-6, 4, 3);
    const PhaseCode code = random_code(4, 50, 0);
    const Matrix e = sample_echo(code, 1, 0.0, 0.0, 1.0, t);
    const cvec& c = code.entries();
    // column is [c3, c0, c1, c2] repeated across bursts
    for (std::size_t n = 0; n < 3; ++n) {
        CHECK(e(0, n) == c[3]);
        CHECK(e(1, n) == c[0]);
        CHECK(e(2, n) == c[1]);
        CHECK(e(3, n) == c[2]);
    }
}

TEST_CASE("echo entry matches the scalar phase formula", "[radar]") {
    const WaveformTiming t(1e9, 1e-6, 4, 2);
    const PhaseCode code = random_code(4, 51, 0);
    const Matrix e = sample_echo(code, 2, 0.1, 0.05, 2.0, t);
    const cdouble expected =
        2.0 * std::exp(cdouble(0.0, two_pi * (0.1 * 3 + 0.05 * 1))) * code.entries()[1];
    CHECK_THAT(std::abs(e(3, 1) - expected), WithinAbs(0.0, 1e-12));
}

TEST_CASE("echo rejects delays outside one code period", "[radar]") {
    const WaveformTiming t(1e9, 1e-6, 4, 2);
    const PhaseCode code = random_code(4, 52, 0);
    CHECK_THROWS_AS(sample_echo(code, -1, 0, 0, 1.0, t), std::invalid_argument);
    CHECK_THROWS_AS(sample_echo(code, 4, 0, 0, 1.0, t), std::invalid_argument);
}

TEST_CASE("zero-variance noise is the identity", "[radar]") {
    Matrix m(3, 3);
    m(1, 2) = {0.5, -0.25};
    const Matrix out = add_noise(m, 0.0, 123);
    for (std::size_t i = 0; i < 9; ++i) CHECK(out.storage()[i] == m.storage()[i]);
}

TEST_CASE("noise hits the requested variance and is seed-deterministic", "[radar]") {
    Matrix zeros(1000, 1000);
    const Matrix a = add_noise(zeros, 1e-2, 7);
    const Matrix b = add_noise(zeros, 1e-2, 7);
    const Matrix c = add_noise(zeros, 1e-2, 8);
    CHECK(a.storage() == b.storage());
    CHECK(a.storage() != c.storage());

    double var = 0.0;
    for (const cdouble& v : a.storage()) var += std::norm(v);
    var /= 1e6;
    CHECK(var > 1e-2 * 0.98);
    CHECK(var < 1e-2 * 1.02);

    double mean_re = 0.0;
    for (const cdouble& v : a.storage()) mean_re += v.real();
    CHECK_THAT(mean_re / 1e6, WithinAbs(0.0, 5e-4));
}

TEST_CASE("correlating a clean echo puts K at the delay row", "[radar]") {
    const WaveformTiming t(1e9, 1e-6, 8, 3);
    const PhaseCode x = random_code(8, 60, 0);
    const Matrix echo = sample_echo(x, 5, 0.0, 0.0, 1.0, t);
    const Matrix prof = correlate_range(echo, x);
    for (std::size_t n = 0; n < 3; ++n) {
        CHECK_THAT(std::abs(prof(5, n)), WithinRel(8.0, 1e-12));
        // other rows hold the code's circular autocorrelation values
        for (std::size_t m = 0; m < 8; ++m) {
            const long lag = static_cast<long>(m) - 5;
            const double expect = std::abs(cross_correlation(x, x, lag, 0.0));
            CHECK_THAT(std::abs(prof(m, n)), WithinAbs(expect, 1e-9));
        }
    }
}

TEST_CASE("all-ones against all-ones correlates to K everywhere", "[radar]") {
    const PhaseCode ones({0, 0, 0, 0});
    Matrix rec(4, 2);
    for (std::size_t i = 0; i < 8; ++i) rec.data()[i] = 1.0;
    const Matrix prof = correlate_range(rec, ones);
    for (const cdouble& v : prof.storage()) CHECK_THAT(std::abs(v - cdouble(4.0)), WithinAbs(0.0, 1e-12));
}

TEST_CASE("correlation matches the direct double loop", "[radar]") {
    const std::size_t k = 8, n = 5;
    const PhaseCode x = random_code(k, 61, 0);
    CounterRng rng(62, 1);
    Matrix rec(k, n);
    std::size_t ctr = 0;
    for (std::size_t i = 0; i < k * n; ++i) {
        const double re = 2.0 * rng.uniform(ctr++) - 1.0;
        const double im = 2.0 * rng.uniform(ctr++) - 1.0;
        rec.data()[i] = {re, im};
    }

    const Matrix prof = correlate_range(rec, x);
    for (std::size_t m = 0; m < k; ++m)
        for (std::size_t col = 0; col < n; ++col) {
            cdouble acc = 0.0;
            for (std::size_t i = 0; i < k; ++i)
                acc += std::conj(x.entries()[i]) * rec((i + m) % k, col);
            CHECK_THAT(std::abs(prof(m, col) - acc), WithinAbs(0.0, 1e-10));
        }

    Matrix wrong(k + 1, n);
    CHECK_THROWS_AS(correlate_range(wrong, x), std::invalid_argument);
}

TEST_CASE("constant slow-time input concentrates in the zero bin", "[radar]") {
    const WaveformTiming t(1e9, 1e-6, 3, 16);
    Matrix prof(3, 16);
    for (std::size_t n = 0; n < 16; ++n) prof(1, n) = {0.7, -0.1};
    const RangeDopplerMap map = range_doppler(prof, t);
    CHECK_THAT(std::abs(map.data(1, 0) - cdouble(0.7 * 16, -0.1 * 16)), WithinAbs(0.0, 1e-12));
    for (std::size_t p = 1; p < 16; ++p) CHECK_THAT(std::abs(map.data(1, p)), WithinAbs(0.0, 1e-10));
    CHECK(map.range_bin_size == t.range_bin_size());
    CHECK(map.doppler_bin_size == t.doppler_bin_size());
}

TEST_CASE("an integer-frequency tone lands in a single bin", "[radar]") {
    const std::size_t n = 32;
    const WaveformTiming t(1e9, 1e-6, 2, n);
    Matrix prof(2, n);
    const std::size_t q = 5;
    for (std::size_t j = 0; j < n; ++j) {
        const double a = two_pi * static_cast<double>(q * j) / static_cast<double>(n);
        prof(0, j) = {std::cos(a), std::sin(a)};
    }
    const RangeDopplerMap map = range_doppler(prof, t);
    CHECK_THAT(std::abs(map.data(0, q)), WithinRel(static_cast<double>(n), 1e-12));
    for (std::size_t p = 0; p < n; ++p)
        if (p != q) CHECK_THAT(std::abs(map.data(0, p)), WithinAbs(0.0, 1e-9));
}

TEST_CASE("the slow-time transform preserves energy up to the factor N", "[radar]") {
    const std::size_t k = 4, n = 24;
    const WaveformTiming t(1e9, 1e-6, k, n);
    CounterRng rng(63, 2);
    Matrix prof(k, n);
    std::size_t ctr = 0;
    for (std::size_t i = 0; i < k * n; ++i) {
        const double re = 2.0 * rng.uniform(ctr++) - 1.0;
        const double im = 2.0 * rng.uniform(ctr++) - 1.0;
        prof.data()[i] = {re, im};
    }
    const RangeDopplerMap map = range_doppler(prof, t);
    CHECK_THAT(map_energy(map.data), WithinRel(static_cast<double>(n) * map_energy(prof), 1e-12));
}

TEST_CASE("an off-grid tone spreads with the expected kernel near its peak", "[radar]") {
    const std::size_t k = 8, n = 64;
    const WaveformTiming t(1e9, 1e-6, k, n);
    const PhaseCode x = random_code(k, 64, 0);
    const double ftil = 3.3 / static_cast<double>(n);
    const cdouble amp = 1.5;
    const Matrix prof = correlate_range(sample_echo(x, 3, 0.0, ftil, amp, t), x);
    const RangeDopplerMap map = range_doppler(prof, t);
    // main-lobe neighborhood; farther out the discrete transform follows the
    // periodic kernel rather than this aperiodic one
    for (std::size_t p = 2; p <= 5; ++p) {
        const double theta = ftil - static_cast<double>(p) / static_cast<double>(n);
        const double expect =
            std::abs(amp) * static_cast<double>(k) * std::abs(dirichlet(static_cast<int>(n), theta));
        CHECK_THAT(std::abs(map.data(3, p)), WithinRel(expect, 1e-2));
    }
}

TEST_CASE("a static target peaks at its delay row and zero Doppler", "[radar]") {
    const WaveformTiming t(79e9, 50e-9, 16, 32);
    // range 60 m -> two-way 120 m -> floor(120 / (c * 50ns)) = 8 chips
    Scenario sc(t, {TargetParams(60.0, 0.0, 0.8)});
    const PhaseCode x = random_code(16, 65, 0);
    const PhaseCode y = random_code(16, 65, 1);
    const RangeDopplerMap map = simulate(x, y, sc);
    const auto [mi, pj] = argmax_cell(map.data);
    CHECK(mi == 8);
    CHECK(pj == 0);
    CHECK_THAT(std::abs(map.data(mi, pj)), WithinRel(0.8 * 16.0 * 32.0, 1e-9));
}

TEST_CASE("identical codes make the interference ridge peak at the interferer delay",
          "[radar]") {
    const WaveformTiming t(79e9, 50e-9, 16, 32);
    Scenario sc(t, {}, InterfererParams(45.0, 0.0, 2.0)); // 45/(c*50ns) -> 3 chips
    const PhaseCode x = random_code(16, 66, 0);
    const RangeDopplerMap map = simulate(x, x, sc);
    const auto [mi, pj] = argmax_cell(map.data);
    CHECK(mi == 3);
    CHECK(pj == 0);
}

TEST_CASE("the receive chain is linear in scene contents", "[radar]") {
    const WaveformTiming t(79e9, 50e-9, 16, 24);
    const PhaseCode x = random_code(16, 67, 0);
    const PhaseCode y = random_code(16, 67, 1);
    Scenario both(t, {TargetParams(60.0, 25.0, 0.7)}, InterfererParams(45.0, -12.0, 2.5));
    Scenario target_only(t, {TargetParams(60.0, 25.0, 0.7)});
    Scenario interf_only(t, {}, InterfererParams(45.0, -12.0, 2.5));

    const RangeDopplerMap a = simulate(x, y, both);
    const RangeDopplerMap b = simulate(x, y, target_only);
    const RangeDopplerMap c = simulate(x, y, interf_only);

    double peak = 0.0;
    for (const cdouble& v : a.data.storage()) peak = std::max(peak, std::abs(v));
    for (std::size_t i = 0; i < a.data.rows(); ++i)
        for (std::size_t j = 0; j < a.data.cols(); ++j)
            CHECK_THAT(std::abs(a.data(i, j) - (b.data(i, j) + c.data(i, j))),
                       WithinAbs(0.0, 1e-9 * peak));
}

TEST_CASE("interferer rows reproduce the cross-correlation magnitudes exactly", "[radar]") {
    const std::size_t k = 16, n = 6;
    const WaveformTiming t(79e9, 50e-9, k, n);
    const PhaseCode x = random_code(k, 68, 0);
    const PhaseCode y = random_code(k, 68, 1);
    const cdouble alpha{2.0, 0.5};
    const long delay = 5;

    const Matrix prof = correlate_range(sample_echo(y, delay, 0.0, 0.0, alpha, t), x);
    for (std::size_t m = 0; m < k; ++m) {
        const double expect =
            std::abs(alpha) * std::abs(cross_correlation(x, y, static_cast<long>(m) - delay, 0.0));
        const double scale = std::max(1.0, expect);
        for (std::size_t col = 0; col < n; ++col)
            CHECK_THAT(std::abs(std::abs(prof(m, col)) - expect) / scale, WithinAbs(0.0, 1e-9));
    }
}

TEST_CASE("motion bleeds energy into range sidelobes even for a perfect code", "[radar]") {
    const std::size_t k = 16, n = 32;
    const WaveformTiming t(79e9, 50e-9, k, n);
    const PhaseCode x = quadratic_phase_code(k);

    // premise: the code really has vanishing zero-Doppler autocorrelation sidelobes
    for (long lag = 1; lag < static_cast<long>(k); ++lag)
        CHECK(std::abs(cross_correlation(x, x, lag, 0.0)) < 1e-6);

    const auto sidelobe_energy = [&](double velocity) {
        Scenario sc(t, {TargetParams(60.0, velocity, 1.0)});
        const RangeDopplerMap map = simulate(x, x, sc);
        const auto [mi, pj] = argmax_cell(map.data);
        double e = 0.0;
        for (std::size_t m = 0; m < k; ++m)
            if (m != mi) e += std::norm(map.data(m, pj));
        const double peak = std::norm(map.data(mi, pj));
        return e / peak;
    };

    CHECK(sidelobe_energy(0.0) < 1e-20);
    CHECK(sidelobe_energy(30.0) > 1e-10);
}

TEST_CASE("an empty scene stays exactly zero through the chain", "[radar]") {
    const WaveformTiming t(79e9, 50e-9, 8, 16);
    Scenario sc(t);
    const RangeDopplerMap map = simulate(random_code(8, 69, 0), random_code(8, 69, 1), sc);
    for (const cdouble& v : map.data.storage()) CHECK(v == cdouble(0.0));
}

TEST_CASE("scenario rejects negative noise variance", "[radar]") {
    const WaveformTiming t(79e9, 50e-9, 8, 16);
    CHECK_THROWS_AS(Scenario(t, {}, std::nullopt, -1.0), std::invalid_argument);
}
