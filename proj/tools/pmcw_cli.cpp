#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include <pmcw/runner.hpp>

int main(int argc, char** argv) {
    CLI::App app{"PMCW slow-time code pair design and interference simulation"};

    std::string mode_s;
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::uint64_t noise_seed = 0;
    double threshold_db = 0.0;
    int sweep = 0;

    auto* mode_opt =
        app.add_option("--mode", mode_s, "one of design, simulate, evaluate, reproduce-paper");
    auto* config_opt = app.add_option("--config", config_path, "JSON config file");
    auto* out_opt = app.add_option("--out", out_dir, "output directory");
    auto* seed_opt = app.add_option("--seed", seed, "seed for the design initialization");
    auto* noise_seed_opt = app.add_option("--noise-seed", noise_seed, "seed for receiver noise");
    auto* threshold_opt = app.add_option("--threshold-db", threshold_db,
                                         "detection threshold relative to the map peak, in dB "
                                         "(must be negative)");
    auto* sweep_opt =
        app.add_option("--sweep", sweep, "fan out this many independently seeded runs");

    CLI11_PARSE(app, argc, argv);

    try {
        pmcw::RunConfig cfg;
        if (*config_opt) cfg = pmcw::load_run_config(config_path);
        if (*mode_opt)
            cfg.mode = pmcw::parse_run_mode(mode_s);
        else if (!*config_opt)
            throw std::invalid_argument("either --mode or --config is required");
        if (*out_opt) cfg.out_dir = out_dir;
        if (*seed_opt) cfg.solver.seed = seed;
        if (*noise_seed_opt) cfg.noise_seed = noise_seed;
        if (*threshold_opt) cfg.threshold_db = threshold_db;
        if (*sweep_opt) cfg.sweep = sweep;

        const pmcw::json manifest = pmcw::run(cfg);
        std::cout << manifest.dump(2) << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
