#include "hitl/experiment.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

#include <json.hpp>

#include "hitl/io.hpp"
#include "hitl/parallel.hpp"
#include "hitl/svg.hpp"

namespace hitl {

namespace {

namespace fs = std::filesystem;

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::threshold: return "threshold";
        case Termination::interrogation: return "interrogation";
        case Termination::timeout: return "timeout";
    }
    return "timeout";
}

void run_simulation_mode(const ExperimentConfig& cfg) {
    const fs::path out(cfg.out_dir);

    // per-trial record, same streams as the aggregate pass
    std::vector<DecisionOutcome> outcomes(cfg.trials);
    parallel_for_index(cfg.trials, [&](std::size_t t) {
        RngStream rng(cfg.seed, t);
        outcomes[t] = simulate(*cfg.model, cfg.time_grid, rng, cfg.protocol);
    });

    std::string csv = "trial,choice,decision_time,termination\n";
    for (std::size_t t = 0; t < outcomes.size(); ++t) {
        const auto& o = outcomes[t];
        csv += std::to_string(t);
        csv += ',';
        csv += o.choice ? std::to_string(*o.choice) : std::string{};
        csv += ',';
        csv += format_double(o.decision_time);
        csv += ',';
        csv += termination_name(o.termination);
        csv += '\n';
    }
    write_text_file(out / "trials.csv", csv);

    const auto stats = estimate_performance(*cfg.model, cfg.time_grid, cfg.protocol, cfg.trials,
                                            cfg.seed);
    nlohmann::json summary = {
        {"mode", mode_name(cfg.mode)},
        {"seed", cfg.seed},
        {"config_digest", cfg.digest()},
        {"n_trials", stats.n_trials},
        {"accuracy", stats.accuracy},
        {"accuracy_se", stats.accuracy_se},
        {"mean_dt", std::isnan(stats.mean_dt) ? nlohmann::json(nullptr)
                                              : nlohmann::json(stats.mean_dt)},
        {"mean_dt_se", std::isnan(stats.mean_dt_se) ? nlohmann::json(nullptr)
                                                    : nlohmann::json(stats.mean_dt_se)},
        {"n_decided", stats.n_decided},
        {"n_timeout", stats.n_timeout},
    };
    write_text_file(out / "summary.json", summary.dump(2) + "\n");
    std::cout << "accuracy " << stats.accuracy << " (se " << stats.accuracy_se << "), mean DT "
              << stats.mean_dt << " s over " << stats.n_decided << " decided trials\n";
}

RewardSurface build_surface(const ExperimentConfig& cfg) {
    const auto& lip = std::get<LipConfig>(*cfg.model);
    const auto t0 = std::chrono::steady_clock::now();
    auto surface = compute_surface(cfg.gain_grid, lip, cfg.time_grid, cfg.trials_per_cell, cfg.ndt,
                                   cfg.rsi, cfg.seed);
    const auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "surface " << cfg.gain_grid.gamma_E.n << "x" << cfg.gain_grid.gamma_I.n << " ("
              << cfg.trials_per_cell << " trials/cell) built in " << dt << " s\n";
    return surface;
}

nlohmann::json region_json(const HighPerfRegion& region) {
    return {{"level", region.level},
            {"center", {{"gamma_E", region.center.gamma_E}, {"gamma_I", region.center.gamma_I}}},
            {"n_member_cells", region.members.size()},
            {"effective_radius", region.effective_radius}};
}

void run_reward_map_mode(const ExperimentConfig& cfg) {
    const fs::path out(cfg.out_dir);
    const auto surface = build_surface(cfg);
    write_surface_csv(surface, out / "surface.csv");
    write_surface_meta(surface, out / "surface_meta.json");
    const auto region = locate_region(surface, cfg.region_level);

    nlohmann::json summary = {
        {"mode", mode_name(cfg.mode)},
        {"seed", cfg.seed},
        {"config_digest", cfg.digest()},
        {"argmax", {{"gamma_E", surface.argmax_state().gamma_E},
                    {"gamma_I", surface.argmax_state().gamma_I}}},
        {"region", region_json(region)},
    };
    write_text_file(out / "summary.json", summary.dump(2) + "\n");
    std::cout << "argmax at gamma_E=" << surface.argmax_state().gamma_E
              << ", gamma_I=" << surface.argmax_state().gamma_I << "; region has "
              << region.members.size() << " cells, effective radius " << region.effective_radius
              << "\n";
}

void run_supervise_mode(const ExperimentConfig& cfg) {
    const fs::path out(cfg.out_dir);
    const auto surface = build_surface(cfg);
    write_surface_csv(surface, out / "surface.csv");
    write_surface_meta(surface, out / "surface_meta.json");
    const auto region = locate_region(surface, cfg.region_level);

    SupervisorConfig sup;
    sup.n_tasks = cfg.n_tasks;
    sup.task_lo = cfg.task_lo;
    sup.task_hi = cfg.task_hi;
    sup.initial = cfg.initial_gain;
    sup.dynamics = {region.center, cfg.gain_grid.bounds(), cfg.drift_s0, cfg.restore_alpha,
                    cfg.restore_s1};
    sup.engagement = cfg.engagement;

    const auto t0 = std::chrono::steady_clock::now();
    const auto summary = run(surface, region, sup, cfg.seed);
    const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "closed loop over " << summary.records.size() << " tasks in " << secs << " s\n";

    write_run_csv(summary, out / "run.csv");

    nlohmann::json sj = nlohmann::json::parse(run_summary_json(summary));
    sj["mode"] = mode_name(cfg.mode);
    sj["config_digest"] = cfg.digest();  // full experiment digest, not just the run block
    sj["region"] = region_json(region);
    write_text_file(out / "summary.json", sj.dump(2) + "\n");

    // Fig-style panels: trajectory over the surface, p0 series, p-bar series
    std::vector<std::pair<double, double>> trajectory;
    trajectory.reserve(summary.records.size() + 1);
    if (!summary.records.empty())
        trajectory.emplace_back(summary.records.front().gain_before.gamma_E,
                                summary.records.front().gain_before.gamma_I);
    std::vector<double> p0_series, pbar_series;
    for (const auto& r : summary.records) {
        trajectory.emplace_back(r.gain_after.gamma_E, r.gain_after.gamma_I);
        p0_series.push_back(r.p0);
        pbar_series.push_back(r.p_bar);
    }

    svg::HeatmapPlotSpec hspec;
    hspec.title = "gain trajectory over normalized reward rate";
    hspec.x_label = "gamma_E";
    hspec.y_label = "gamma_I";
    hspec.contour_level = cfg.region_level;
    write_text_file(out / "gain_trajectory.svg",
                    svg::heatmap_plot(surface.values, surface.grid.gamma_E.n,
                                      surface.grid.gamma_I.n, surface.grid.gamma_E.min,
                                      surface.grid.gamma_E.max, surface.grid.gamma_I.min,
                                      surface.grid.gamma_I.max, trajectory, hspec));

    svg::SeriesPlotSpec p0spec;
    p0spec.title = "human success rate p0";
    p0spec.x_label = "task";
    p0spec.y_label = "p0";
    write_text_file(out / "p0_series.svg", svg::series_plot(p0_series, p0spec));

    svg::SeriesPlotSpec pbspec;
    pbspec.title = "average success rate p-bar";
    pbspec.x_label = "task";
    pbspec.y_label = "p_bar";
    pbspec.color = "#c0392b";
    write_text_file(out / "p_bar_series.svg", svg::series_plot(pbar_series, pbspec));

    if (summary.mean_p_bar)
        std::cout << "mean p_bar " << *summary.mean_p_bar << ", var p_bar "
                  << (summary.var_p_bar ? *summary.var_p_bar : 0.0) << ", containment "
                  << (summary.containment ? *summary.containment : 0.0) << "\n";
}

}  // namespace

void run_experiment(const ExperimentConfig& config) {
    fs::create_directories(config.out_dir);
    switch (config.mode) {
        case ExperimentMode::ddm:
        case ExperimentMode::multicue_2afc:
        case ExperimentMode::race:
        case ExperimentMode::multicue_race:
        case ExperimentMode::lip:
            run_simulation_mode(config);
            break;
        case ExperimentMode::reward_map:
            run_reward_map_mode(config);
            break;
        case ExperimentMode::supervise:
            run_supervise_mode(config);
            break;
    }
}

}  // namespace hitl
