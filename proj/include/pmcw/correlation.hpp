#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "pmcw/design_grid.hpp"
#include "pmcw/phase_code.hpp"
#include "pmcw/types.hpp"

namespace pmcw {

// Doppler steering vector: entry k is e^{j*2*pi*k*f}, f in cycles per chip.
inline cvec steering_vector(double f, std::size_t k) {
    if (k < 1) throw std::invalid_argument("steering_vector: K must be >= 1");
    cvec v(k);
    v[0] = 1.0;
    for (std::size_t i = 1; i < k; ++i) {
        const double a = two_pi * f * static_cast<double>(i);
        v[i] = {std::cos(a), std::sin(a)};
    }
    return v;
}

// out[k] = y[(k + l) mod K]; any integer l, reduced once on entry. Matches
// multiplying by the circulant block shift matrix for l in [0, K).
inline cvec circular_shift(const cvec& y, long l) {
    const long k = static_cast<long>(y.size());
    if (k == 0) throw std::invalid_argument("circular_shift: empty input");
    const long s = ((l % k) + k) % k;
    cvec out(y.size());
    for (long i = 0; i < k; ++i) out[i] = y[(i + s) % k];
    return out;
}

// r_xy^l(f) = sum_k conj(x_k) * y_{(k+l) mod K} * e^{j*2*pi*k*f}
// The shifted-and-modulated cross-correlation both the designer and the
// simulator are built on.
inline cdouble cross_correlation(const PhaseCode& x, const PhaseCode& y, long l, double f) {
    if (x.size() != y.size())
        throw std::invalid_argument("cross_correlation: incompatible codes (K = " +
                                    std::to_string(x.size()) + " vs " +
                                    std::to_string(y.size()) + ")");
    const std::size_t k = x.size();
    const long s = ((l % static_cast<long>(k)) + static_cast<long>(k)) % static_cast<long>(k);
    const cvec& xe = x.entries();
    const cvec& ye = y.entries();
    cdouble acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double a = two_pi * f * static_cast<double>(i);
        const cdouble rot(std::cos(a), std::sin(a));
        acc += std::conj(xe[i]) * ye[(i + s) % k] * rot;
    }
    return acc;
}

// Objective of the co-design problem: sum over the grid of |r_xy^l(f_p)|^2.
// Evaluated per Doppler point with the steering factor folded into x once,
// so the inner shift loop is pure multiply-add.
inline double interference_objective(const PhaseCode& x, const PhaseCode& y,
                                     const DesignGrid& grid) {
    if (x.size() != y.size())
        throw std::invalid_argument("interference_objective: incompatible codes (K = " +
                                    std::to_string(x.size()) + " vs " +
                                    std::to_string(y.size()) + ")");
    const std::size_t k = x.size();
    grid.check_against(k);
    const cvec& xe = x.entries();
    const cvec& ye = y.entries();
    double j = 0.0;
    cvec w(k);
    for (int p = -grid.P; p <= grid.P; ++p) {
        const cvec steer = steering_vector(grid.frequency(p), k);
        for (std::size_t i = 0; i < k; ++i) w[i] = std::conj(xe[i]) * steer[i];
        for (int l = -grid.L; l <= grid.L; ++l) {
            const std::size_t s = static_cast<std::size_t>(
                ((l % static_cast<long>(k)) + static_cast<long>(k)) % static_cast<long>(k));
            cdouble acc = 0.0;
            for (std::size_t i = 0; i < k; ++i) acc += w[i] * ye[(i + s) % k];
            j += std::norm(acc);
        }
    }
    return j;
}

} // namespace pmcw
