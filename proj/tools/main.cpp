#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hitl/experiment.hpp"
#include "hitl/io.hpp"

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::uint64_t> trials;
};

bool mode_matches(const std::string& subcommand, hitl::ExperimentMode mode) {
    using hitl::ExperimentMode;
    if (subcommand == "reward-map") return mode == ExperimentMode::reward_map;
    if (subcommand == "supervise") return mode == ExperimentMode::supervise;
    return mode != ExperimentMode::reward_map && mode != ExperimentMode::supervise;
}

// Flags override config fields before validation, so an override is checked
// exactly like a file value.
int run(const std::string& subcommand, const std::string& config_path, const Overrides& ov) {
    try {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(hitl::read_text_file(config_path));
        } catch (const nlohmann::json::parse_error& e) {
            std::cerr << "error: parse error: " << e.what() << "\n";
            return 2;
        }
        if (ov.seed) j["seed"] = *ov.seed;
        if (ov.out) j["out_dir"] = *ov.out;
        if (ov.trials) j["trials"] = *ov.trials;

        const auto cfg = hitl::parse_config(j);
        if (!mode_matches(subcommand, cfg.mode)) {
            std::cerr << "error: config mode \"" << hitl::mode_name(cfg.mode)
                      << "\" does not belong to the \"" << subcommand << "\" command\n";
            return 2;
        }
        hitl::run_experiment(cfg);
        return 0;
    } catch (const hitl::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const hitl::DegenerateSurfaceError& e) {
        std::cerr << "error: " << e.what() << "\n"
                  << "hint: raise the gamma_E range, strengthen inputs, or lower thresholds so at "
                     "least one cell decides correctly\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic decision models and the human-in-the-loop supervisory dispatcher"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "JSON experiment config")->required();
        cmd->add_option("--seed", ov.seed, "override config seed");
        cmd->add_option("--out", ov.out, "override output directory");
        cmd->add_option("--trials", ov.trials, "override trial count");
    };

    // HITL_WORKERS controls the worker count; results are identical at any value.
    add_common(app.add_subcommand(
        "simulate", "run one decision model (ddm, multicue-2afc, race, multicue-race, lip)"));
    add_common(
        app.add_subcommand("reward-map", "build the reward-rate surface over the gain plane"));
    add_common(
        app.add_subcommand("supervise", "run the closed-loop supervisory dispatch experiment"));

    CLI11_PARSE(app, argc, argv);

    return run(app.get_subcommands().front()->get_name(), config_path, ov);
}
