#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hitl/decision.hpp"
#include "hitl/gain.hpp"

namespace hitl {

// Inputs of the reward-rate formula RR = acc / (DT + NDT + RSI).
struct RewardInputs {
    double acc = 0.0;  // fraction correct, [0, 1]
    double DT = 0.0;   // mean decision time, s
    double NDT = 0.0;  // sensory and motor delays, s
    double RSI = 0.0;  // inter-trial interval, s
};

double reward_rate(const RewardInputs& inputs);

struct GridAxis {
    double min = 0.0;
    double max = 1.0;
    std::size_t n = 2;

    double at(std::size_t i) const {
        return min + (max - min) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    double step() const { return (max - min) / static_cast<double>(n - 1); }
};

struct GainGrid {
    GridAxis gamma_E;
    GridAxis gamma_I;

    std::size_t n_cells() const { return gamma_E.n * gamma_I.n; }
    // row-major over gamma_E, then gamma_I
    std::size_t cell_index(std::size_t ie, std::size_t ii) const { return ie * gamma_I.n + ii; }
    GainBounds bounds() const {
        return {gamma_E.min, gamma_E.max, gamma_I.min, gamma_I.max};
    }
    void validate() const;
};

struct DegenerateSurfaceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Normalized reward rate over the gain plane; max cell is exactly 1.
struct RewardSurface {
    GainGrid grid;
    std::vector<double> values;  // row-major, grid.cell_index layout
    std::size_t argmax_e = 0;
    std::size_t argmax_i = 0;
    std::size_t trials_per_cell = 0;
    std::uint64_t base_seed = 0;
    std::string config_digest;

    double value_at(std::size_t ie, std::size_t ii) const {
        return values[grid.cell_index(ie, ii)];
    }
    GainState argmax_state() const {
        return {grid.gamma_E.at(argmax_e), grid.gamma_I.at(argmax_i)};
    }
};

struct HighPerfRegion {
    GainState center;
    double level = 0.9;
    std::vector<std::pair<std::size_t, std::size_t>> members;  // (ie, ii) cells
    double effective_radius = 0.0;  // RMS member distance from center
};

// Monte-Carlo reward-rate surface on the gain-parameterized population model.
// Cell (ie, ii) substitutes the node gains into `base`, estimates free-response
// performance with trials drawn from streams
// (base_seed, cell_index * trials_per_cell + t), and maps accuracy and mean
// cycle time through reward_rate; timeout trials count as errors with
// DT = horizon. Values are divided by the maximum (ties broken toward the
// lowest (gamma_E, gamma_I) index). Cells are independent, so the build
// parallelizes without affecting the result.
RewardSurface compute_surface(const GainGrid& grid, const LipConfig& base, const TimeGrid& tgrid,
                              std::size_t trials_per_cell, double ndt, double rsi,
                              std::uint64_t base_seed);

// Level set of the surface at `level` (in (0, 1)) around the argmax.
HighPerfRegion locate_region(const RewardSurface& surface, double level);

// Bilinear interpolation between the four cells surrounding `state`.
double lookup(const RewardSurface& surface, const GainState& state);

// CSV export: header gamma_E,gamma_I,reward_rate, row-major over the grid.
std::string surface_csv(const RewardSurface& surface);
void write_surface_csv(const RewardSurface& surface, const std::filesystem::path& path);

// JSON sidecar with the grid spec, seed, trials per cell and config digest.
std::string surface_meta_json(const RewardSurface& surface);
void write_surface_meta(const RewardSurface& surface, const std::filesystem::path& path);

}  // namespace hitl
