#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pmcw/correlation.hpp"
#include "pmcw/design_grid.hpp"
#include "pmcw/phase_code.hpp"
#include "pmcw/radar.hpp"

namespace pmcw {

struct Detection {
    std::size_t range_bin = 0;
    std::size_t doppler_bin = 0; // raw DFT bin
    double magnitude_db = 0.0;   // relative to the map peak, <= 0
};

struct DetectionReport {
    std::vector<Detection> detections;
    double threshold_db = 0.0;
    std::optional<std::pair<std::size_t, std::size_t>> ground_truth;
};

// Design objective in dB, normalized per grid point and per chip:
// 10*log10(J / ((2L+1)(2P+1)K)). The normalization puts the x = y, l = 0
// self-correlation level at 10*log10(K). An exactly zero objective maps to
// the -infinity sentinel.
inline double interference_power_db(const PhaseCode& x, const PhaseCode& y,
                                    const DesignGrid& grid) {
    const double j = interference_objective(x, y, grid);
    if (j == 0.0) return -std::numeric_limits<double>::infinity();
    const double cells = static_cast<double>(grid.term_count()) * static_cast<double>(x.size());
    return 10.0 * std::log10(j / cells);
}

// All local maxima of |map| within threshold_db of the global peak.
// Local max on the 8-neighborhood: the Doppler axis wraps (DFT is periodic),
// the range axis does not (missing neighbors are skipped); ties count, so
// equal twin peaks are both reported. Sorted by magnitude descending, then by
// (range_bin, doppler_bin). An all-zero map yields no detections.
inline DetectionReport threshold_detect(const RangeDopplerMap& map, double threshold_db) {
    if (!(threshold_db < 0.0))
        throw std::invalid_argument("threshold_detect: threshold_dB must be < 0 (relative to peak)");
    const std::size_t k = map.data.rows();
    const std::size_t n = map.data.cols();
    if (k == 0 || n == 0) throw std::invalid_argument("threshold_detect: empty map");

    std::vector<double> mag(k * n);
    double peak = 0.0;
    for (std::size_t m = 0; m < k; ++m)
        for (std::size_t p = 0; p < n; ++p) {
            const double v = std::abs(map.data(m, p));
            mag[m * n + p] = v;
            peak = std::max(peak, v);
        }

    DetectionReport report;
    report.threshold_db = threshold_db;
    if (peak == 0.0) return report;

    for (std::size_t m = 0; m < k; ++m) {
        for (std::size_t p = 0; p < n; ++p) {
            const double v = mag[m * n + p];
            const double db = 20.0 * std::log10(v / peak); // v = 0 falls below any threshold
            if (!(db >= threshold_db)) continue;
            bool is_max = true;
            for (int dm = -1; dm <= 1 && is_max; ++dm) {
                const long mi = static_cast<long>(m) + dm;
                if (mi < 0 || mi >= static_cast<long>(k)) continue;
                for (int dp = -1; dp <= 1; ++dp) {
                    if (dm == 0 && dp == 0) continue;
                    const std::size_t pi = static_cast<std::size_t>(
                        (static_cast<long>(p) + dp + static_cast<long>(n)) % static_cast<long>(n));
                    if (mag[static_cast<std::size_t>(mi) * n + pi] > v) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) report.detections.push_back({m, p, db});
        }
    }

    std::sort(report.detections.begin(), report.detections.end(),
              [](const Detection& a, const Detection& b) {
                  if (a.magnitude_db != b.magnitude_db) return a.magnitude_db > b.magnitude_db;
                  if (a.range_bin != b.range_bin) return a.range_bin < b.range_bin;
                  return a.doppler_bin < b.doppler_bin;
              });
    return report;
}

} // namespace pmcw
