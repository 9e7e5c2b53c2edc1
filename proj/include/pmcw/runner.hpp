#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "pmcw/io.hpp"
#include "pmcw/metrics.hpp"
#include "pmcw/radar.hpp"
#include "pmcw/solver.hpp"

namespace pmcw {

enum class RunMode { design, simulate, evaluate, reproduce };

inline RunMode parse_run_mode(const std::string& s) {
    if (s == "design") return RunMode::design;
    if (s == "simulate") return RunMode::simulate;
    if (s == "evaluate") return RunMode::evaluate;
    if (s == "reproduce-paper") return RunMode::reproduce;
    throw std::invalid_argument(
        "mode must be one of design, simulate, evaluate, reproduce-paper; got '" + s + "'");
}

inline std::string run_mode_name(RunMode m) {
    switch (m) {
        case RunMode::design: return "design";
        case RunMode::simulate: return "simulate";
        case RunMode::evaluate: return "evaluate";
        case RunMode::reproduce: return "reproduce-paper";
    }
    return "?";
}

// Everything a run needs, resolved from config file plus flag overrides
// before any computation starts.
struct RunConfig {
    RunMode mode = RunMode::design;
    std::string out_dir = "out";

    // grid
    std::size_t K = 50;
    int L = -1;                    // -1: default to K - 1
    int P = 4;
    double doppler_spacing = -1.0; // < 0: derive from v_max and timing
    double v_max = 70.0;           // m/s, one-way band edge for the grid

    // timing used for spacing derivation and the stock scene
    double f_c = 79e9;
    double T_c = 6.66e-9;
    std::size_t N = 140;

    SolverConfig solver;
    std::uint64_t noise_seed = 0;
    double threshold_db = -20.0;

    std::string scenario_path;
    std::string x_path;
    std::string y_path;

    int sweep = 0; // > 0: fan out that many independently seeded runs
};

// Normalized one-way Doppler reach (v_max/c) f_c T_c, split into P grid steps.
inline double derived_doppler_spacing(const RunConfig& cfg) {
    if (cfg.doppler_spacing >= 0.0) return cfg.doppler_spacing;
    if (cfg.P == 0) return 0.0;
    const double fhat_max = (cfg.v_max / speed_of_light) * cfg.f_c * cfg.T_c;
    return fhat_max / static_cast<double>(cfg.P);
}

inline DesignGrid resolve_grid(const RunConfig& cfg) {
    const int l = cfg.L >= 0 ? cfg.L : static_cast<int>(cfg.K) - 1;
    return DesignGrid(l, cfg.P, derived_doppler_spacing(cfg));
}

// The shipped two-vehicle scene: 79 GHz victim, 50 x 140 CPI, one 20 m /
// 30 m/s target, one interfering radar 200 m out closing at -20 m/s,
// unit-variance-0.01 noise. Amplitudes follow the reference scaling.
inline Scenario two_vehicle_scenario(const RunConfig& cfg) {
    WaveformTiming timing(cfg.f_c, cfg.T_c, cfg.K, cfg.N);
    std::vector<TargetParams> targets{
        TargetParams(20.0, 30.0, reference_target_amplitude(20.0))};
    InterfererParams interferer(200.0, -20.0, reference_interferer_amplitude(200.0));
    return Scenario(timing, std::move(targets), interferer, 1e-2, cfg.noise_seed);
}

// Expected map peak for a single target: range row is its wrapped delay,
// Doppler bin the nearest integer to the per-burst frequency times N.
inline std::pair<std::size_t, std::size_t> expected_target_bin(const TargetParams& tg,
                                                               const WaveformTiming& t) {
    const long k = static_cast<long>(t.K);
    const long row = ((tg.delay_bins(t) % k) + k) % k;
    const double bins = tg.doppler_hz(t) * t.T * static_cast<double>(t.N);
    const long nn = static_cast<long>(t.N);
    const long p = ((std::lround(bins) % nn) + nn) % nn;
    return {static_cast<std::size_t>(row), static_cast<std::size_t>(p)};
}

// Collects outputs in memory and writes them all at the end, so a failing run
// leaves no partial artifact set behind.
class OutputStager {
public:
    explicit OutputStager(std::string dir) : dir_(std::move(dir)) {}

    void add(const std::string& name, std::string content) {
        files_.emplace_back(name, std::move(content));
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(files_.size());
        for (const auto& [n, c] : files_) out.push_back(n);
        return out;
    }

    void commit() {
        namespace fs = std::filesystem;
        fs::create_directories(dir_);
        std::vector<fs::path> written;
        try {
            for (const auto& [name, content] : files_) {
                const fs::path p = fs::path(dir_) / name;
                write_text_file(p.string(), content);
                written.push_back(p);
            }
        } catch (...) {
            for (const auto& p : written) {
                std::error_code ec;
                fs::remove(p, ec);
            }
            throw;
        }
    }

private:
    std::string dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

inline json manifest_base(const RunConfig& cfg, const DesignGrid* grid) {
    json j;
    j["mode"] = run_mode_name(cfg.mode);
    j["out_dir"] = cfg.out_dir;
    if (grid)
        j["grid"] = {{"K", cfg.K},
                     {"L", grid->L},
                     {"P", grid->P},
                     {"doppler_spacing", grid->doppler_spacing},
                     {"v_max", cfg.v_max}};
    j["solver"] = {{"epsilon", cfg.solver.epsilon},
                   {"inner_tol", cfg.solver.inner_tol},
                   {"max_outer", cfg.solver.max_outer},
                   {"max_inner", cfg.solver.max_inner},
                   {"loading_margin", cfg.solver.loading_margin},
                   {"seed", cfg.solver.seed},
                   {"update_order", cfg.solver.update_order == UpdateOrder::gauss_seidel
                                        ? "gauss-seidel"
                                        : "jacobi"},
                   {"matrix_free", cfg.solver.matrix_free}};
    j["noise_seed"] = cfg.noise_seed;
    j["threshold_db"] = cfg.threshold_db;
    return j;
}

inline double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Trace sanity checked before anything is written; a violation is a bug, not
// a result, and must fail the run.
inline void assert_trace_sane(const DesignTrace& trace, const SolverConfig& solver) {
    if (solver.update_order != UpdateOrder::gauss_seidel) return; // no descent guarantee
    const double slack = 1e-9 * trace.initial_objective;
    for (std::size_t s = 1; s < trace.objective_per_outer.size(); ++s)
        if (trace.objective_per_outer[s] > trace.objective_per_outer[s - 1] + slack)
            throw std::runtime_error("internal invariant violated: objective increased at outer " +
                                     std::to_string(s));
}

inline json run_design(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.solver.validate();
    if (cfg.K < 2) throw std::invalid_argument("K must be >= 2");
    const DesignGrid grid = resolve_grid(cfg);
    grid.check_against(cfg.K);

    const PhaseCode x0 = random_code(cfg.K, cfg.solver.seed, 0);
    const PhaseCode y0 = random_code(cfg.K, cfg.solver.seed, 1);
    CodesignResult res = codesign(x0, y0, grid, cfg.solver);
    assert_trace_sane(res.trace, cfg.solver);

    json summary;
    summary["K"] = cfg.K;
    summary["initial_objective"] = res.trace.initial_objective;
    summary["final_objective"] = res.trace.final_objective;
    summary["improvement_db"] =
        db_to_json(res.trace.initial_objective > 0.0 && res.trace.final_objective > 0.0
                       ? 10.0 * std::log10(res.trace.initial_objective / res.trace.final_objective)
                       : std::numeric_limits<double>::infinity());
    summary["outer_iterations"] = res.trace.objective_per_outer.size() - 1;
    summary["converged"] = res.trace.converged;
    summary["wall_time_s"] = elapsed_s(t0);

    OutputStager stage(cfg.out_dir);
    stage.add("x.code", code_to_text(res.x));
    stage.add("y.code", code_to_text(res.y));
    stage.add("trace.csv", trace_to_csv(res.trace));
    stage.add("summary.json", summary.dump(2) + "\n");
    json manifest = manifest_base(cfg, &grid);
    manifest["outputs"] = stage.names();
    manifest["outputs"].push_back("manifest.json");
    manifest["wall_time_s"] = elapsed_s(t0);
    stage.add("manifest.json", manifest.dump(2) + "\n");
    stage.commit();
    return manifest;
}

inline json run_simulate(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.scenario_path.empty()) throw std::invalid_argument("scenario_path is required for simulate");
    if (cfg.x_path.empty()) throw std::invalid_argument("x_path is required for simulate");
    if (cfg.y_path.empty()) throw std::invalid_argument("y_path is required for simulate");
    Scenario sc = read_scenario_file(cfg.scenario_path);
    sc.noise_seed = cfg.noise_seed;
    const PhaseCode x = read_code_file(cfg.x_path);
    const PhaseCode y = read_code_file(cfg.y_path);
    if (x.size() != sc.timing.K || y.size() != sc.timing.K)
        throw std::invalid_argument("dimension mismatch: codes have K = " +
                                    std::to_string(x.size()) + " / " + std::to_string(y.size()) +
                                    " but scenario timing.K = " + std::to_string(sc.timing.K));

    const RangeDopplerMap map = simulate(x, y, sc);
    DetectionReport report = threshold_detect(map, cfg.threshold_db);
    if (sc.targets.size() == 1)
        report.ground_truth = expected_target_bin(sc.targets.front(), sc.timing);

    OutputStager stage(cfg.out_dir);
    stage.add("rd_map.csv", rd_map_to_csv(map, sc.timing));
    stage.add("rd_map.pgm", rd_map_to_pgm(map));
    stage.add("detections.json", detections_to_json(report, sc.timing.N).dump(2) + "\n");
    json manifest = manifest_base(cfg, nullptr);
    manifest["scenario"] = scenario_to_json(sc);
    manifest["codes"] = {{"x", cfg.x_path}, {"y", cfg.y_path}};
    manifest["outputs"] = stage.names();
    manifest["outputs"].push_back("manifest.json");
    manifest["wall_time_s"] = elapsed_s(t0);
    stage.add("manifest.json", manifest.dump(2) + "\n");
    stage.commit();
    return manifest;
}

inline json run_evaluate(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.x_path.empty()) throw std::invalid_argument("x_path is required for evaluate");
    if (cfg.y_path.empty()) throw std::invalid_argument("y_path is required for evaluate");
    const PhaseCode x = read_code_file(cfg.x_path);
    const PhaseCode y = read_code_file(cfg.y_path);
    if (x.size() != y.size())
        throw std::invalid_argument("dimension mismatch: codes have K = " +
                                    std::to_string(x.size()) + " / " + std::to_string(y.size()));
    RunConfig resolved = cfg;
    resolved.K = x.size();
    const DesignGrid grid = resolve_grid(resolved);
    grid.check_against(x.size());

    json eval;
    eval["K"] = x.size();
    eval["objective"] = interference_objective(x, y, grid);
    eval["interference_power_db"] = db_to_json(interference_power_db(x, y, grid));
    json per_shift = json::array();
    for (int l = -grid.L; l <= grid.L; ++l) {
        double worst = 0.0;
        for (int p = -grid.P; p <= grid.P; ++p)
            worst = std::max(worst, std::abs(cross_correlation(x, y, l, grid.frequency(p))));
        per_shift.push_back({{"l", l}, {"max_abs_correlation", worst}});
    }
    eval["per_shift"] = std::move(per_shift);

    OutputStager stage(cfg.out_dir);
    stage.add("evaluation.json", eval.dump(2) + "\n");
    json manifest = manifest_base(resolved, &grid);
    manifest["codes"] = {{"x", cfg.x_path}, {"y", cfg.y_path}};
    manifest["outputs"] = stage.names();
    manifest["outputs"].push_back("manifest.json");
    manifest["wall_time_s"] = elapsed_s(t0);
    stage.add("manifest.json", manifest.dump(2) + "\n");
    stage.commit();
    return manifest;
}

// End-to-end two-vehicle comparison: design a pair, then put the random
// initial pair and the designed pair through the identical simulation, and
// report the interference-ridge levels and detections side by side.
inline json run_reproduce(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.solver.validate();
    if (cfg.K < 2) throw std::invalid_argument("K must be >= 2");
    const DesignGrid grid = resolve_grid(cfg);
    grid.check_against(cfg.K);
    const Scenario sc = two_vehicle_scenario(cfg);

    const PhaseCode x0 = random_code(cfg.K, cfg.solver.seed, 0);
    const PhaseCode y0 = random_code(cfg.K, cfg.solver.seed, 1);
    CodesignResult res = codesign(x0, y0, grid, cfg.solver);
    assert_trace_sane(res.trace, cfg.solver);

    const RangeDopplerMap map_random = simulate(x0, y0, sc);
    const RangeDopplerMap map_designed = simulate(res.x, res.y, sc);

    DetectionReport det_random = threshold_detect(map_random, cfg.threshold_db);
    DetectionReport det_designed = threshold_detect(map_designed, cfg.threshold_db);
    const auto truth = expected_target_bin(sc.targets.front(), sc.timing);
    det_random.ground_truth = truth;
    det_designed.ground_truth = truth;

    // Interference-only passes (no target, no noise) isolate the ridge the
    // design is meant to push down.
    Scenario interference_only = sc;
    interference_only.targets.clear();
    interference_only.noise_variance = 0.0;
    const RangeDopplerMap ridge_random = simulate(x0, y0, interference_only);
    const RangeDopplerMap ridge_designed = simulate(res.x, res.y, interference_only);
    const auto peak_db = [](const RangeDopplerMap& m) {
        double peak = 0.0;
        for (const auto& v : m.data.storage()) peak = std::max(peak, std::abs(v));
        return magnitude_db_floored(peak);
    };

    const auto count_false = [&](const DetectionReport& r) {
        std::size_t falses = 0;
        for (const Detection& d : r.detections)
            if (!(d.range_bin == truth.first && d.doppler_bin == truth.second)) ++falses;
        return falses;
    };
    const auto has_truth = [&](const DetectionReport& r) {
        for (const Detection& d : r.detections)
            if (d.range_bin == truth.first && d.doppler_bin == truth.second) return true;
        return false;
    };

    json comparison;
    comparison["objective_random"] = res.trace.initial_objective;
    comparison["objective_designed"] = res.trace.final_objective;
    comparison["improvement_db"] = db_to_json(
        res.trace.final_objective > 0.0
            ? 10.0 * std::log10(res.trace.initial_objective / res.trace.final_objective)
            : std::numeric_limits<double>::infinity());
    comparison["interference_power_db_random"] = db_to_json(interference_power_db(x0, y0, grid));
    comparison["interference_power_db_designed"] =
        db_to_json(interference_power_db(res.x, res.y, grid));
    comparison["interference_ridge_peak_db_random"] = peak_db(ridge_random);
    comparison["interference_ridge_peak_db_designed"] = peak_db(ridge_designed);
    comparison["target_bin"] = {{"range_bin", truth.first}, {"doppler_bin", truth.second}};
    comparison["detections_random"] = det_random.detections.size();
    comparison["detections_designed"] = det_designed.detections.size();
    comparison["false_alarms_random"] = count_false(det_random);
    comparison["false_alarms_designed"] = count_false(det_designed);
    comparison["target_detected_random"] = has_truth(det_random);
    comparison["target_detected_designed"] = has_truth(det_designed);

    OutputStager stage(cfg.out_dir);
    stage.add("x_random.code", code_to_text(x0));
    stage.add("y_random.code", code_to_text(y0));
    stage.add("x_designed.code", code_to_text(res.x));
    stage.add("y_designed.code", code_to_text(res.y));
    stage.add("trace.csv", trace_to_csv(res.trace));
    stage.add("rd_map_random.csv", rd_map_to_csv(map_random, sc.timing));
    stage.add("rd_map_random.pgm", rd_map_to_pgm(map_random));
    stage.add("rd_map_designed.csv", rd_map_to_csv(map_designed, sc.timing));
    stage.add("rd_map_designed.pgm", rd_map_to_pgm(map_designed));
    stage.add("detections_random.json", detections_to_json(det_random, sc.timing.N).dump(2) + "\n");
    stage.add("detections_designed.json",
              detections_to_json(det_designed, sc.timing.N).dump(2) + "\n");
    stage.add("comparison.json", comparison.dump(2) + "\n");
    json manifest = manifest_base(cfg, &grid);
    manifest["scenario"] = scenario_to_json(sc);
    manifest["outputs"] = stage.names();
    manifest["outputs"].push_back("manifest.json");
    manifest["wall_time_s"] = elapsed_s(t0);
    stage.add("manifest.json", manifest.dump(2) + "\n");
    stage.commit();
    return manifest;
}

inline json run_single(const RunConfig& cfg) {
    switch (cfg.mode) {
        case RunMode::design: return run_design(cfg);
        case RunMode::simulate: return run_simulate(cfg);
        case RunMode::evaluate: return run_evaluate(cfg);
        case RunMode::reproduce: return run_reproduce(cfg);
    }
    throw std::invalid_argument("mode is not set");
}

// Entry point used by the CLI: either one run, or a sweep of independently
// seeded runs in out_dir/run_NNN, fanned out over a small worker pool.
inline json run(const RunConfig& cfg) {
    if (cfg.sweep <= 0) return run_single(cfg);

    namespace fs = std::filesystem;
    std::vector<RunConfig> runs;
    for (int i = 0; i < cfg.sweep; ++i) {
        RunConfig c = cfg;
        c.sweep = 0;
        c.solver.seed = cfg.solver.seed + static_cast<std::uint64_t>(i);
        c.noise_seed = cfg.noise_seed + static_cast<std::uint64_t>(i);
        char name[16];
        std::snprintf(name, sizeof(name), "run_%03d", i);
        c.out_dir = (fs::path(cfg.out_dir) / name).string();
        runs.push_back(std::move(c));
    }

    const unsigned workers =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(runs.size())));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(runs.size());
    std::atomic<std::size_t> next{0};
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= runs.size()) return;
                try {
                    run_single(runs[i]);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    json manifest;
    manifest["mode"] = run_mode_name(cfg.mode);
    manifest["sweep"] = cfg.sweep;
    manifest["out_dir"] = cfg.out_dir;
    json subs = json::array();
    for (const auto& r : runs) subs.push_back(r.out_dir);
    manifest["runs"] = std::move(subs);
    write_text_file((fs::path(cfg.out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
    return manifest;
}

// Config-file loader; flags handled by the CLI override these values.
inline RunConfig load_run_config(const std::string& path) {
    json j;
    try {
        j = json::parse(read_entire_file(path));
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed config file (" + std::string(e.what()) + "): " + path);
    }
    RunConfig cfg;
    if (j.contains("mode")) cfg.mode = parse_run_mode(j["mode"].get<std::string>());
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
    if (j.contains("grid")) {
        const json& g = j["grid"];
        if (g.contains("K")) cfg.K = g["K"].get<std::size_t>();
        if (g.contains("L")) cfg.L = g["L"].get<int>();
        if (g.contains("P")) cfg.P = g["P"].get<int>();
        if (g.contains("doppler_spacing")) cfg.doppler_spacing = g["doppler_spacing"].get<double>();
        if (g.contains("v_max")) cfg.v_max = g["v_max"].get<double>();
    }
    if (j.contains("timing")) {
        const json& t = j["timing"];
        if (t.contains("f_c")) cfg.f_c = t["f_c"].get<double>();
        if (t.contains("T_c")) cfg.T_c = t["T_c"].get<double>();
        if (t.contains("N")) cfg.N = t["N"].get<std::size_t>();
    }
    if (j.contains("solver")) {
        const json& s = j["solver"];
        if (s.contains("epsilon")) cfg.solver.epsilon = s["epsilon"].get<double>();
        if (s.contains("inner_tol")) cfg.solver.inner_tol = s["inner_tol"].get<double>();
        if (s.contains("max_outer")) cfg.solver.max_outer = s["max_outer"].get<int>();
        if (s.contains("max_inner")) cfg.solver.max_inner = s["max_inner"].get<int>();
        if (s.contains("loading_margin"))
            cfg.solver.loading_margin = s["loading_margin"].get<double>();
        if (s.contains("seed")) cfg.solver.seed = s["seed"].get<std::uint64_t>();
        if (s.contains("update_order")) {
            const std::string o = s["update_order"].get<std::string>();
            if (o == "gauss-seidel") cfg.solver.update_order = UpdateOrder::gauss_seidel;
            else if (o == "jacobi") cfg.solver.update_order = UpdateOrder::jacobi;
            else throw std::invalid_argument("update_order must be gauss-seidel or jacobi");
        }
        if (s.contains("matrix_free")) cfg.solver.matrix_free = s["matrix_free"].get<bool>();
    }
    if (j.contains("scenario")) cfg.scenario_path = j["scenario"].get<std::string>();
    if (j.contains("codes")) {
        if (j["codes"].contains("x")) cfg.x_path = j["codes"]["x"].get<std::string>();
        if (j["codes"].contains("y")) cfg.y_path = j["codes"]["y"].get<std::string>();
    }
    if (j.contains("threshold_db")) cfg.threshold_db = j["threshold_db"].get<double>();
    if (j.contains("noise_seed")) cfg.noise_seed = j["noise_seed"].get<std::uint64_t>();
    if (j.contains("sweep")) cfg.sweep = j["sweep"].get<int>();
    return cfg;
}

} // namespace pmcw
