#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace pmcw {

// Suppression grid for the design objective: circular shifts l in [-L, L]
// crossed with normalized Doppler points f_p = p * doppler_spacing for
// p in [-P, P]. Spacing is in cycles per chip.
struct DesignGrid {
    int L = 0;
    int P = 0;
    double doppler_spacing = 0.0;

    DesignGrid(int shift_range, int doppler_range, double spacing)
        : L(shift_range), P(doppler_range), doppler_spacing(spacing) {
        if (L < 0)
            throw std::invalid_argument("DesignGrid: L must be >= 0, got " + std::to_string(L));
        if (P < 0)
            throw std::invalid_argument("DesignGrid: P must be >= 0, got " + std::to_string(P));
        if (!std::isfinite(spacing) || spacing < 0.0)
            throw std::invalid_argument("DesignGrid: doppler_spacing must be finite and >= 0");
        if (spacing * P >= 0.5)
            throw std::invalid_argument(
                "DesignGrid: doppler_spacing * P must stay below 0.5 (unambiguous band), got " +
                std::to_string(spacing * P));
    }

    double frequency(int p) const { return p * doppler_spacing; }

    int shift_count() const { return 2 * L + 1; }
    int doppler_count() const { return 2 * P + 1; }
    int term_count() const { return shift_count() * doppler_count(); }

    // Shifts outside [0, K-1] are circularly redundant; enforced wherever a
    // code length is in hand.
    void check_against(std::size_t k) const {
        if (static_cast<std::size_t>(L) > k - 1)
            throw std::invalid_argument("DesignGrid: L = " + std::to_string(L) +
                                        " exceeds K - 1 = " + std::to_string(k - 1));
    }
};

} // namespace pmcw
