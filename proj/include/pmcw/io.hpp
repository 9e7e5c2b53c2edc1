#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmcw/metrics.hpp"
#include "pmcw/phase_code.hpp"
#include "pmcw/radar.hpp"
#include "pmcw/solver.hpp"
#include "pmcw/types.hpp"

namespace pmcw {

using json = nlohmann::json;

// ---- small helpers ----

inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// dB of a magnitude with an explicit floor standing in for -infinity in
// tabular output.
inline double magnitude_db_floored(double v, double floor_db = -400.0) {
    if (v <= 0.0) return floor_db;
    return std::max(20.0 * std::log10(v), floor_db);
}

// JSON cannot carry infinities; the sentinels become strings.
inline json db_to_json(double v) {
    if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
    return v;
}

// Centered Doppler display index for raw DFT bin p: [-N/2, N/2) for even N,
// [-(N-1)/2, (N-1)/2] for odd.
inline long centered_doppler_bin(std::size_t p, std::size_t n) {
    const long half = static_cast<long>((n + 1) / 2);
    const long pl = static_cast<long>(p);
    return pl < half ? pl : pl - static_cast<long>(n);
}

inline std::string read_entire_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

// ---- phase code serialization ----
// Text format: header line `# pmcw-code K=<K>`, then one phase angle (radians)
// per line at full double precision. Also supported: a bare JSON array of
// angles (chosen by .json extension).

inline std::string code_to_text(const PhaseCode& code) {
    std::ostringstream out;
    out << "# pmcw-code K=" << code.size() << "\n";
    for (double p : code.phases()) out << format_full(p) << "\n";
    return out.str();
}

inline PhaseCode code_from_text(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string header;
    if (!std::getline(in, header))
        throw std::runtime_error("malformed code file (empty): " + origin);
    const std::string prefix = "# pmcw-code K=";
    if (header.rfind(prefix, 0) != 0)
        throw std::runtime_error("malformed code file (bad header): " + origin);
    std::size_t k = 0;
    try {
        k = std::stoul(header.substr(prefix.size()));
    } catch (const std::exception&) {
        throw std::runtime_error("malformed code file (bad K in header): " + origin);
    }
    std::vector<double> phases;
    phases.reserve(k);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            std::size_t used = 0;
            const double v = std::stod(line, &used);
            while (used < line.size() && std::isspace(static_cast<unsigned char>(line[used]))) ++used;
            if (used != line.size()) throw std::invalid_argument("trailing junk");
            phases.push_back(v);
        } catch (const std::exception&) {
            throw std::runtime_error("malformed code file (bad phase line '" + line + "'): " + origin);
        }
    }
    if (phases.size() != k)
        throw std::runtime_error("malformed code file (header says K=" + std::to_string(k) +
                                 " but found " + std::to_string(phases.size()) + " phases): " + origin);
    return PhaseCode(std::move(phases));
}

inline std::string code_to_json_text(const PhaseCode& code) {
    json arr = json::array();
    for (double p : code.phases()) arr.push_back(p);
    return arr.dump();
}

inline PhaseCode read_code_file(const std::string& path) {
    const std::string text = read_entire_file(path);
    if (std::filesystem::path(path).extension() == ".json") {
        json j;
        try {
            j = json::parse(text);
        } catch (const std::exception& e) {
            throw std::runtime_error("malformed code file (" + std::string(e.what()) + "): " + path);
        }
        if (!j.is_array())
            throw std::runtime_error("malformed code file (expected JSON array): " + path);
        std::vector<double> phases;
        for (const auto& v : j) {
            if (!v.is_number())
                throw std::runtime_error("malformed code file (non-numeric entry): " + path);
            phases.push_back(v.get<double>());
        }
        return PhaseCode(std::move(phases));
    }
    return code_from_text(text, path);
}

// ---- design trace ----

inline std::string trace_to_csv(const DesignTrace& trace) {
    std::ostringstream out;
    out << "outer_iter,J,inner_iters_x,inner_iters_y\n";
    for (std::size_t s = 0; s < trace.objective_per_outer.size(); ++s) {
        int tx = 0;
        int ty = 0;
        if (s > 0) {
            tx = trace.inner_iteration_counts[s - 1].first;
            ty = trace.inner_iteration_counts[s - 1].second;
        }
        out << s << "," << format_full(trace.objective_per_outer[s]) << "," << tx << "," << ty
            << "\n";
    }
    return out.str();
}

// ---- range-Doppler map exports ----
// CSV: column 0 is the row's range in meters, remaining columns are
// magnitudes in dB over the centered Doppler axis; the header carries the
// radial velocity (m/s, two-way convention) of each Doppler column.

inline std::string rd_map_to_csv(const RangeDopplerMap& map, const WaveformTiming& timing) {
    const std::size_t k = map.data.rows();
    const std::size_t n = map.data.cols();
    std::ostringstream out;
    out << "range_m";
    for (std::size_t c = 0; c < n; ++c) {
        const long pc = static_cast<long>(c) - static_cast<long>(n / 2);
        const double vel = static_cast<double>(pc) * map.doppler_bin_size * speed_of_light /
                           (2.0 * timing.f_c);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", vel);
        out << "," << buf;
    }
    out << "\n";
    for (std::size_t m = 0; m < k; ++m) {
        out << format_full(static_cast<double>(m) * map.range_bin_size);
        for (std::size_t c = 0; c < n; ++c) {
            const std::size_t p = (c + n - n / 2) % n; // centered column -> raw bin
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.6f",
                          magnitude_db_floored(std::abs(map.data(m, p))));
            out << "," << buf;
        }
        out << "\n";
    }
    return out.str();
}

// 8-bit PGM heatmap, min/max normalized over floored dB values; rows are
// range bins, columns the centered Doppler axis. The comment line records
// the dB range so absolute levels can be recovered.
inline std::string rd_map_to_pgm(const RangeDopplerMap& map) {
    const std::size_t k = map.data.rows();
    const std::size_t n = map.data.cols();
    std::vector<double> db(k * n);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < k; ++m)
        for (std::size_t c = 0; c < n; ++c) {
            const std::size_t p = (c + n - n / 2) % n;
            const double v = magnitude_db_floored(std::abs(map.data(m, p)));
            db[m * n + c] = v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    std::ostringstream out;
    out << "P5\n# dB range [" << format_full(lo) << ", " << format_full(hi)
        << "], rows = range bins, cols = centered Doppler bins\n"
        << n << " " << k << "\n255\n";
    const double span = hi - lo;
    for (std::size_t i = 0; i < db.size(); ++i) {
        const double t = span > 0.0 ? (db[i] - lo) / span : 0.0;
        out.put(static_cast<char>(static_cast<unsigned char>(std::lround(t * 255.0))));
    }
    return out.str();
}

// ---- detection report ----

inline json detections_to_json(const DetectionReport& report, std::size_t doppler_bins) {
    json j;
    j["threshold_db"] = report.threshold_db;
    if (report.ground_truth)
        j["ground_truth"] = {{"range_bin", report.ground_truth->first},
                             {"doppler_bin", report.ground_truth->second}};
    else
        j["ground_truth"] = nullptr;
    json dets = json::array();
    for (const Detection& d : report.detections) {
        dets.push_back({{"range_bin", d.range_bin},
                        {"doppler_bin", d.doppler_bin},
                        {"doppler_bin_centered", centered_doppler_bin(d.doppler_bin, doppler_bins)},
                        {"magnitude_db", d.magnitude_db}});
    }
    j["detections"] = std::move(dets);
    return j;
}

// ---- scenario files ----
// JSON with fields mirroring Scenario. Amplitudes may be a real number, a
// [re, im] pair, or omitted, in which case the radar-equation reference
// scaling supplies them from geometry.

inline cdouble parse_amplitude(const json& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw std::runtime_error("scenario: field '" + where +
                             ".amplitude' must be a number or [re, im] pair");
}

inline double require_number(const json& j, const std::string& field, const std::string& where) {
    if (!j.contains(field) || !j[field].is_number())
        throw std::runtime_error("scenario: missing or non-numeric field '" + where + field + "'");
    return j[field].get<double>();
}

inline Scenario parse_scenario(const json& j) {
    if (!j.contains("timing") || !j["timing"].is_object())
        throw std::runtime_error("scenario: missing object field 'timing'");
    const json& jt = j["timing"];
    const double fc = require_number(jt, "f_c", "timing.");
    const double tc = require_number(jt, "T_c", "timing.");
    const double kf = require_number(jt, "K", "timing.");
    const double nf = require_number(jt, "N", "timing.");
    const double t = jt.contains("T") ? require_number(jt, "T", "timing.") : 0.0;
    WaveformTiming timing(fc, tc, static_cast<std::size_t>(kf), static_cast<std::size_t>(nf), t);

    std::vector<TargetParams> targets;
    if (j.contains("targets")) {
        if (!j["targets"].is_array())
            throw std::runtime_error("scenario: field 'targets' must be an array");
        for (const auto& jt2 : j["targets"]) {
            const double r = require_number(jt2, "range", "targets[].");
            const double v = require_number(jt2, "velocity", "targets[].");
            const cdouble amp = jt2.contains("amplitude")
                                    ? parse_amplitude(jt2["amplitude"], "targets[]")
                                    : cdouble(reference_target_amplitude(r), 0.0);
            targets.emplace_back(r, v, amp);
        }
    }
    std::optional<InterfererParams> interferer;
    if (j.contains("interferer") && !j["interferer"].is_null()) {
        const json& ji = j["interferer"];
        const double r = require_number(ji, "separation", "interferer.");
        const double v = require_number(ji, "velocity", "interferer.");
        const cdouble amp = ji.contains("amplitude")
                                ? parse_amplitude(ji["amplitude"], "interferer")
                                : cdouble(reference_interferer_amplitude(r), 0.0);
        interferer.emplace(r, v, amp);
    }
    const double sigma2 = j.contains("noise_variance")
                              ? require_number(j, "noise_variance", "")
                              : 0.0;
    const std::uint64_t seed = j.contains("noise_seed")
                                   ? j["noise_seed"].get<std::uint64_t>()
                                   : 0;
    return Scenario(timing, std::move(targets), std::move(interferer), sigma2, seed);
}

inline Scenario read_scenario_file(const std::string& path) {
    json j;
    try {
        j = json::parse(read_entire_file(path));
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed scenario file (" + std::string(e.what()) + "): " + path);
    }
    return parse_scenario(j);
}

inline json scenario_to_json(const Scenario& sc) {
    json j;
    j["timing"] = {{"f_c", sc.timing.f_c},
                   {"T_c", sc.timing.T_c},
                   {"K", sc.timing.K},
                   {"N", sc.timing.N},
                   {"T", sc.timing.T}};
    json targets = json::array();
    for (const TargetParams& t : sc.targets)
        targets.push_back({{"range", t.range},
                           {"velocity", t.velocity},
                           {"amplitude", {t.amplitude.real(), t.amplitude.imag()}}});
    j["targets"] = std::move(targets);
    if (sc.interferer)
        j["interferer"] = {{"separation", sc.interferer->separation},
                           {"velocity", sc.interferer->velocity},
                           {"amplitude",
                            {sc.interferer->amplitude.real(), sc.interferer->amplitude.imag()}}};
    else
        j["interferer"] = nullptr;
    j["noise_variance"] = sc.noise_variance;
    j["noise_seed"] = sc.noise_seed;
    return j;
}

} // namespace pmcw
