#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "pmcw/types.hpp"

namespace pmcw {

// Unimodular code of K chips, stored as phase angles in [0, 2*pi).
// Immutable after construction; entries() is the complex view e^{j*theta_k}.
class PhaseCode {
public:
    explicit PhaseCode(std::vector<double> phases) : phases_(std::move(phases)) {
        if (phases_.size() < 2)
            throw std::invalid_argument("PhaseCode: need at least 2 chips, got " +
                                        std::to_string(phases_.size()));
        for (auto& p : phases_) {
            if (!std::isfinite(p))
                throw std::invalid_argument("PhaseCode: phase must be finite");
            p = wrap_angle(p);
        }
        entries_.reserve(phases_.size());
        for (double p : phases_) entries_.emplace_back(std::cos(p), std::sin(p));
    }

    // Construct from complex chips; each must already sit on the unit circle
    // (tolerance 1e-12), the stored phase is its argument. The given entries
    // are kept verbatim rather than re-derived from the phases: values like
    // exact -1 or i would otherwise pick up a ~1e-16 sin/cos residue, which
    // matters when correlations are meant to cancel exactly.
    static PhaseCode from_entries(const cvec& z) {
        std::vector<double> ph(z.size());
        for (std::size_t k = 0; k < z.size(); ++k) {
            const double mag = std::abs(z[k]);
            if (std::abs(mag - 1.0) > 1e-12)
                throw std::invalid_argument(
                    "PhaseCode: entry " + std::to_string(k) + " has modulus " +
                    std::to_string(mag) + ", not unimodular");
            ph[k] = std::atan2(z[k].imag(), z[k].real());
        }
        PhaseCode code(std::move(ph));
        code.entries_ = z;
        return code;
    }

    std::size_t size() const { return phases_.size(); }
    const std::vector<double>& phases() const { return phases_; }
    const cvec& entries() const { return entries_; }

    bool operator==(const PhaseCode& o) const { return phases_ == o.phases_; }

    static double wrap_angle(double a) {
        a = std::fmod(a, two_pi);
        if (a < 0.0) a += two_pi;
        if (a >= two_pi) a = 0.0; // fmod can land exactly on 2*pi after the add
        return a;
    }

private:
    std::vector<double> phases_;
    cvec entries_;
};

} // namespace pmcw
