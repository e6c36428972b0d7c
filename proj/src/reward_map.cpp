#include "hitl/reward_map.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "hitl/io.hpp"
#include "hitl/parallel.hpp"

namespace hitl {

double reward_rate(const RewardInputs& inputs) {
    if (!(inputs.acc >= 0.0 && inputs.acc <= 1.0))
        throw std::invalid_argument("reward_rate: acc must lie in [0, 1]");
    if (!(inputs.DT >= 0.0 && inputs.NDT >= 0.0 && inputs.RSI >= 0.0))
        throw std::invalid_argument("reward_rate: times must be >= 0");
    const double denom = inputs.DT + inputs.NDT + inputs.RSI;
    if (!(denom > 0.0)) throw std::invalid_argument("reward_rate: DT + NDT + RSI must be > 0");
    return inputs.acc / denom;
}

void GainGrid::validate() const {
    if (!(gamma_E.min < gamma_E.max) || !(gamma_I.min < gamma_I.max))
        throw std::invalid_argument("GainGrid: axis min must be < max");
    if (gamma_E.n < 2 || gamma_I.n < 2)
        throw std::invalid_argument("GainGrid: need at least 2 points per axis");
}

RewardSurface compute_surface(const GainGrid& grid, const LipConfig& base, const TimeGrid& tgrid,
                              std::size_t trials_per_cell, double ndt, double rsi,
                              std::uint64_t base_seed) {
    grid.validate();
    tgrid.validate();
    if (trials_per_cell < 100)
        throw std::invalid_argument("compute_surface: trials_per_cell must be >= 100");
    if (!(ndt >= 0.0 && rsi >= 0.0))
        throw std::invalid_argument("compute_surface: NDT and RSI must be >= 0");

    RewardSurface surface;
    surface.grid = grid;
    surface.values.assign(grid.n_cells(), 0.0);
    surface.trials_per_cell = trials_per_cell;
    surface.base_seed = base_seed;

    nlohmann::json digest_src = {
        {"leak", base.leak},          {"inputs", base.inputs},
        {"sigma", base.sigma},        {"thresholds", base.thresholds},
        {"correct", base.correct},    {"dt", tgrid.dt},
        {"horizon", tgrid.horizon},   {"ndt", ndt},
        {"rsi", rsi},                 {"trials_per_cell", trials_per_cell},
        {"grid",
         {{"gamma_E", {grid.gamma_E.min, grid.gamma_E.max, grid.gamma_E.n}},
          {"gamma_I", {grid.gamma_I.min, grid.gamma_I.max, grid.gamma_I.n}}}},
    };
    surface.config_digest = hex64(fnv1a64(digest_src.dump()));

    parallel_for_index(grid.n_cells(), [&](std::size_t cell) {
        const std::size_t ie = cell / grid.gamma_I.n;
        const std::size_t ii = cell % grid.gamma_I.n;
        LipConfig cfg = base;
        cfg.gamma_E = grid.gamma_E.at(ie);
        cfg.gamma_I = grid.gamma_I.at(ii);
        const auto stats =
            estimate_performance(cfg, tgrid, Protocol::free_response, trials_per_cell, base_seed,
                                 static_cast<std::uint64_t>(cell) * trials_per_cell);
        // timeouts enter the cycle time at the full horizon
        const double total_dt = stats.sum_dt_decided +
                                static_cast<double>(stats.n_timeout) * tgrid.horizon;
        const double mean_dt = total_dt / static_cast<double>(stats.n_trials);
        surface.values[cell] = reward_rate({stats.accuracy, mean_dt, ndt, rsi});
    });

    double max_v = 0.0;
    std::size_t max_cell = 0;
    for (std::size_t cell = 0; cell < surface.values.size(); ++cell) {
        if (surface.values[cell] > max_v) {
            max_v = surface.values[cell];
            max_cell = cell;
        }
    }
    if (!(max_v > 0.0))
        throw DegenerateSurfaceError(
            "compute_surface: no cell ever produced a correct decision; the surface is all zero");

    for (double& v : surface.values) v /= max_v;
    surface.argmax_e = max_cell / grid.gamma_I.n;
    surface.argmax_i = max_cell % grid.gamma_I.n;
    return surface;
}

HighPerfRegion locate_region(const RewardSurface& surface, double level) {
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("locate_region: level must lie in (0, 1)");

    HighPerfRegion region;
    region.center = surface.argmax_state();
    region.level = level;

    double sq_sum = 0.0;
    for (std::size_t ie = 0; ie < surface.grid.gamma_E.n; ++ie) {
        for (std::size_t ii = 0; ii < surface.grid.gamma_I.n; ++ii) {
            if (surface.value_at(ie, ii) >= level) {
                region.members.emplace_back(ie, ii);
                const GainState cell{surface.grid.gamma_E.at(ie), surface.grid.gamma_I.at(ii)};
                const double d = gain_distance(cell, region.center);
                sq_sum += d * d;
            }
        }
    }
    region.effective_radius = std::sqrt(sq_sum / static_cast<double>(region.members.size()));
    return region;
}

double lookup(const RewardSurface& surface, const GainState& state) {
    const auto& grid = surface.grid;
    auto frac_index = [](const GridAxis& axis, double v, std::size_t& i0, std::size_t& i1,
                         double& f) {
        const double x = std::clamp((v - axis.min) / axis.step(), 0.0,
                                    static_cast<double>(axis.n - 1));
        i0 = std::min(static_cast<std::size_t>(x), axis.n - 2);
        i1 = i0 + 1;
        f = x - static_cast<double>(i0);
    };
    std::size_t e0, e1, i0, i1;
    double fe, fi;
    frac_index(grid.gamma_E, state.gamma_E, e0, e1, fe);
    frac_index(grid.gamma_I, state.gamma_I, i0, i1, fi);
    const double v00 = surface.value_at(e0, i0);
    const double v01 = surface.value_at(e0, i1);
    const double v10 = surface.value_at(e1, i0);
    const double v11 = surface.value_at(e1, i1);
    return (1.0 - fe) * ((1.0 - fi) * v00 + fi * v01) + fe * ((1.0 - fi) * v10 + fi * v11);
}

std::string surface_csv(const RewardSurface& surface) {
    std::string out = "gamma_E,gamma_I,reward_rate\n";
    for (std::size_t ie = 0; ie < surface.grid.gamma_E.n; ++ie) {
        for (std::size_t ii = 0; ii < surface.grid.gamma_I.n; ++ii) {
            out += format_double(surface.grid.gamma_E.at(ie));
            out += ',';
            out += format_double(surface.grid.gamma_I.at(ii));
            out += ',';
            out += format_double(surface.value_at(ie, ii));
            out += '\n';
        }
    }
    return out;
}

void write_surface_csv(const RewardSurface& surface, const std::filesystem::path& path) {
    write_text_file(path, surface_csv(surface));
}

std::string surface_meta_json(const RewardSurface& surface) {
    nlohmann::json j = {
        {"grid",
         {{"gamma_E",
           {{"min", surface.grid.gamma_E.min},
            {"max", surface.grid.gamma_E.max},
            {"n", surface.grid.gamma_E.n}}},
          {"gamma_I",
           {{"min", surface.grid.gamma_I.min},
            {"max", surface.grid.gamma_I.max},
            {"n", surface.grid.gamma_I.n}}}}},
        {"seed", surface.base_seed},
        {"trials_per_cell", surface.trials_per_cell},
        {"config_digest", surface.config_digest},
        {"argmax", {{"gamma_E", surface.argmax_state().gamma_E},
                    {"gamma_I", surface.argmax_state().gamma_I}}},
    };
    return j.dump(2) + "\n";
}

void write_surface_meta(const RewardSurface& surface, const std::filesystem::path& path) {
    write_text_file(path, surface_meta_json(surface));
}

}  // namespace hitl
