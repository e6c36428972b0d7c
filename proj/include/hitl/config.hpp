#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hitl/decision.hpp"
#include "hitl/reward_map.hpp"
#include "hitl/supervisor.hpp"

namespace hitl {

enum class ExperimentMode { ddm, multicue_2afc, race, multicue_race, lip, reward_map, supervise };

// Carries every validation failure found in one pass, never just the first.
struct ConfigError : std::runtime_error {
    explicit ConfigError(std::vector<std::string> found);
    std::vector<std::string> issues;
};

struct ExperimentConfig {
    ExperimentMode mode = ExperimentMode::ddm;
    std::uint64_t seed = 42;
    std::string out_dir = "out";
    std::size_t trials = 10000;
    Protocol protocol = Protocol::free_response;
    TimeGrid time_grid{1e-3, 10.0};

    // single-model simulation modes; also the base model of the surface
    std::optional<ModelConfig> model;

    // reward-map and supervise
    GainGrid gain_grid{{0.2, 2.0, 21}, {0.0, 1.0, 21}};
    std::size_t trials_per_cell = 2000;
    double ndt = 0.3;
    double rsi = 1.0;
    double region_level = 0.9;

    // supervise
    std::size_t n_tasks = 200;
    double task_lo = 0.75;
    double task_hi = 0.95;
    double drift_s0 = 0.05;
    double restore_alpha = 0.3;
    double restore_s1 = 0.01;
    std::optional<GainState> initial_gain;
    EngagementConfig engagement;

    // resolved canonical form; its digest is embedded in every artifact
    nlohmann::json canonical;
    std::string digest() const;
};

// Defaulted baseline of the gain-parameterized population model used when a
// reward-map or supervise config leaves `model` out.
LipConfig default_surface_model();

// Parse + validate a config object. Defaults fill absent fields only;
// present fields must validate, and all failures are reported together.
ExperimentConfig parse_config(const nlohmann::json& j);

// Reads the file, reports parse errors with byte positions, then validates.
ExperimentConfig load_config(const std::filesystem::path& path);

const char* mode_name(ExperimentMode mode);

}  // namespace hitl
