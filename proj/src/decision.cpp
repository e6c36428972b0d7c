#include "hitl/decision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

#include "hitl/parallel.hpp"

namespace hitl {

namespace {

// Shared leaky-competing-pool drift over a contiguous block:
//   out_i = S_i - k x_i - w sum_{j != i} x_j
void competing_drift(std::span<const double> x, std::span<const double> S, double k, double w,
                     std::span<double> out) {
    double total = 0.0;
    for (double v : x) total += v;
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = S[i] - k * x[i] - w * (total - x[i]);
}

int argmax_lowest(std::span<const double> x) {
    // first maximum wins, so exact ties resolve to the lowest index
    return static_cast<int>(std::max_element(x.begin(), x.end()) - x.begin());
}

// Criterion check on a pool-value vector. Returns the chosen pool once the
// rule fires.
std::optional<int> criterion_fired(std::span<const double> x, std::span<const double> thresholds,
                                   Criterion criterion, double margin) {
    switch (criterion) {
        case Criterion::absolute_threshold: {
            int best = -1;
            double best_over = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double over = x[i] - thresholds[i];
                if (over >= 0.0 && (best < 0 || over > best_over)) {
                    best = static_cast<int>(i);
                    best_over = over;
                }
            }
            if (best >= 0) return best;
            return std::nullopt;
        }
        case Criterion::max_vs_next: {
            double top = -std::numeric_limits<double>::infinity();
            double second = top;
            int top_i = 0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (x[i] > top) {
                    second = top;
                    top = x[i];
                    top_i = static_cast<int>(i);
                } else if (x[i] > second) {
                    second = x[i];
                }
            }
            if (top - second >= margin) return top_i;
            return std::nullopt;
        }
        case Criterion::max_vs_average: {
            double total = 0.0;
            for (double v : x) total += v;
            const int top_i = argmax_lowest(x);
            if (x[top_i] - total / static_cast<double>(x.size()) >= margin) return top_i;
            return std::nullopt;
        }
    }
    return std::nullopt;
}

double clamp_time(double t, const TimeGrid& grid) { return std::min(t, grid.horizon); }

DecisionOutcome outcome_from(const SdeResult& r, const TimeGrid& grid, Protocol protocol,
                             int interrogation_choice) {
    DecisionOutcome out;
    out.final_state = r.state;
    if (r.crossing) {
        out.choice = *r.crossing;
        out.decision_time = clamp_time(r.time, grid);
        out.termination = Termination::threshold;
    } else if (protocol == Protocol::interrogation) {
        out.choice = interrogation_choice;
        out.decision_time = grid.horizon;
        out.termination = Termination::interrogation;
    } else {
        out.choice = std::nullopt;
        out.decision_time = grid.horizon;
        out.termination = Termination::timeout;
    }
    return out;
}

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Monotone-time cursor over schedule intervals; O(1) per step.
struct ScheduleCursor {
    const Schedule* schedule;
    std::size_t idx = 0;

    int cue_at(double t) {
        const auto& ivs = schedule->intervals;
        while (idx + 1 < ivs.size() && t >= ivs[idx].t_end) ++idx;
        return ivs[idx].cue;
    }
};

}  // namespace

void DdmParams::validate() const {
    require(sigma >= 0.0, "DdmParams: sigma must be >= 0");
    require(lambda >= 0.0, "DdmParams: lambda must be >= 0");
    require(theta_B < x0 && x0 < theta_A, "DdmParams: need theta_B < x0 < theta_A");
    require(correct == 0 || correct == 1, "DdmParams: correct must be 0 or 1");
}

void MultiCue2afcParams::validate() const {
    require(!cues.empty(), "MultiCue2afcParams: need at least one cue");
    require(sigma >= 0.0, "MultiCue2afcParams: sigma must be >= 0");
    for (const auto& c : cues) require(c.lambda >= 0.0, "MultiCue2afcParams: lambda must be >= 0");
    require(theta_B < x0 && x0 < theta_A, "MultiCue2afcParams: need theta_B < x0 < theta_A");
    require(correct == 0 || correct == 1, "MultiCue2afcParams: correct must be 0 or 1");
}

double RaceConfig::resolved_margin() const {
    if (margin) return *margin;
    return 0.2 * *std::min_element(thresholds.begin(), thresholds.end());
}

void RaceConfig::validate() const {
    const std::size_t K = n_pools();
    require(K >= 2, "RaceConfig: need at least 2 pools");
    require(sigma.size() == K && thresholds.size() == K, "RaceConfig: per-pool sizes must match");
    require(leak >= 0.0 && inhibition >= 0.0, "RaceConfig: leak and inhibition must be >= 0");
    for (double s : sigma) require(s >= 0.0, "RaceConfig: sigma must be >= 0");
    for (double th : thresholds) require(th > 0.0, "RaceConfig: thresholds must be > 0");
    if (criterion != Criterion::absolute_threshold)
        require(resolved_margin() > 0.0, "RaceConfig: criterion margin must be > 0");
    require(correct >= 0 && static_cast<std::size_t>(correct) < K,
            "RaceConfig: correct pool out of range");
}

double MultiCueRaceConfig::resolved_margin() const {
    if (margin) return *margin;
    return 0.2 * *std::min_element(thresholds.begin(), thresholds.end());
}

void MultiCueRaceConfig::validate() const {
    const std::size_t K = n_pools();
    const std::size_t M = n_cues();
    require(K >= 2, "MultiCueRaceConfig: need at least 2 pools");
    require(M >= 1, "MultiCueRaceConfig: need at least one cue");
    for (const auto& row : inputs)
        require(row.size() == M, "MultiCueRaceConfig: inputs must be K rows of M cues");
    require(sigma.size() == K && thresholds.size() == K,
            "MultiCueRaceConfig: per-pool sizes must match");
    for (const auto& c : cues)
        require(c.leak >= 0.0 && c.inhibition >= 0.0,
                "MultiCueRaceConfig: leak and inhibition must be >= 0");
    for (double s : sigma) require(s >= 0.0, "MultiCueRaceConfig: sigma must be >= 0");
    for (double th : thresholds) require(th > 0.0, "MultiCueRaceConfig: thresholds must be > 0");
    if (criterion != Criterion::absolute_threshold)
        require(resolved_margin() > 0.0, "MultiCueRaceConfig: criterion margin must be > 0");
    require(correct >= 0 && static_cast<std::size_t>(correct) < K,
            "MultiCueRaceConfig: correct pool out of range");
}

void LipConfig::validate() const {
    const std::size_t K = n_pools();
    require(K >= 2, "LipConfig: need at least 2 pools");
    require(gamma_E > 0.0, "LipConfig: gamma_E must be > 0");
    require(gamma_I >= 0.0, "LipConfig: gamma_I must be >= 0");
    require(leak >= 0.0, "LipConfig: leak must be >= 0");
    require(sigma.size() == K && thresholds.size() == K, "LipConfig: per-pool sizes must match");
    for (double s : sigma) require(s >= 0.0, "LipConfig: sigma must be >= 0");
    for (double th : thresholds) require(th > 0.0, "LipConfig: thresholds must be > 0");
    require(correct >= 0 && static_cast<std::size_t>(correct) < K,
            "LipConfig: correct pool out of range");
}

DecisionOutcome simulate_ddm(const DdmParams& params, const TimeGrid& grid, RngStream& rng,
                             Protocol protocol) {
    params.validate();
    auto drift = [&params](const std::vector<double>& x, double, std::vector<double>& out) {
        out[0] = params.mu - params.lambda * x[0];
    };
    auto diffusion = [&params](const std::vector<double>&, double, std::vector<double>& out) {
        out[0] = params.sigma;
    };
    auto stop = [&params, protocol](const std::vector<double>& x, double) -> std::optional<int> {
        if (protocol != Protocol::free_response) return std::nullopt;
        if (x[0] >= params.theta_A) return 0;
        if (x[0] <= params.theta_B) return 1;
        return std::nullopt;
    };
    std::vector<RngStream> streams{rng.substream(0)};
    const auto r = integrate_sde(drift, diffusion, {params.x0}, grid,
                                 std::span<RngStream>(streams), stop);
    // interrogation: sign readout, exact zero resolves to the lowest index
    const int readout = r.state[0] < 0.0 ? 1 : 0;
    return outcome_from(r, grid, protocol, readout);
}

DecisionOutcome simulate_multicue_2afc(const MultiCue2afcParams& params, const TimeGrid& grid,
                                       RngStream& rng, Protocol protocol) {
    params.validate();
    params.schedule.validate(params.cues.size());
    if (params.schedule.horizon < grid.horizon - 1e-9)
        throw std::invalid_argument("simulate_multicue_2afc: invalid schedule, does not cover horizon");

    ScheduleCursor cursor{&params.schedule};
    auto drift = [&params, cursor](const std::vector<double>& x, double t,
                                   std::vector<double>& out) mutable {
        const auto& cue = params.cues[static_cast<std::size_t>(cursor.cue_at(t))];
        out[0] = cue.mu - cue.lambda * x[0];
    };
    auto diffusion = [&params](const std::vector<double>&, double, std::vector<double>& out) {
        out[0] = params.sigma;
    };
    auto stop = [&params, protocol](const std::vector<double>& x, double) -> std::optional<int> {
        if (protocol != Protocol::free_response) return std::nullopt;
        if (x[0] >= params.theta_A) return 0;
        if (x[0] <= params.theta_B) return 1;
        return std::nullopt;
    };
    std::vector<RngStream> streams{rng.substream(0)};
    const auto r = integrate_sde(drift, diffusion, {params.x0}, grid,
                                 std::span<RngStream>(streams), stop);
    const int readout = r.state[0] < 0.0 ? 1 : 0;
    return outcome_from(r, grid, protocol, readout);
}

namespace {

std::vector<RngStream> pool_streams(RngStream& rng, std::size_t n) {
    std::vector<RngStream> streams;
    streams.reserve(n);
    for (std::size_t i = 0; i < n; ++i) streams.push_back(rng.substream(i));
    return streams;
}

}  // namespace

DecisionOutcome simulate_race(const RaceConfig& config, const TimeGrid& grid, RngStream& rng,
                              Protocol protocol) {
    config.validate();
    const std::size_t K = config.n_pools();
    const double margin = config.resolved_margin();

    auto drift = [&config](const std::vector<double>& x, double, std::vector<double>& out) {
        competing_drift(x, config.inputs, config.leak, config.inhibition, out);
    };
    auto diffusion = [&config](const std::vector<double>&, double, std::vector<double>& out) {
        std::copy(config.sigma.begin(), config.sigma.end(), out.begin());
    };
    auto stop = [&config, margin, protocol](const std::vector<double>& x,
                                            double) -> std::optional<int> {
        if (protocol != Protocol::free_response) return std::nullopt;
        return criterion_fired(x, config.thresholds, config.criterion, margin);
    };

    auto streams = pool_streams(rng, K);
    const auto r = integrate_sde(drift, diffusion, std::vector<double>(K, 0.0), grid,
                                 std::span<RngStream>(streams), stop);
    return outcome_from(r, grid, protocol, argmax_lowest(r.state));
}

DecisionOutcome simulate_multicue_race(const MultiCueRaceConfig& config, const TimeGrid& grid,
                                       RngStream& rng, Protocol protocol) {
    config.validate();
    config.schedule.validate(config.n_cues());
    if (config.schedule.horizon < grid.horizon - 1e-9)
        throw std::invalid_argument("simulate_multicue_race: invalid schedule, does not cover horizon");

    const std::size_t K = config.n_pools();
    const std::size_t M = config.n_cues();

    // State layout is pool-major: x[i*M + m] holds pool i under cue m, so
    // pool i's streams line up with simulate_race when M == 1.
    std::vector<double> active_inputs(K);
    std::vector<double> block_x(K), block_out(K);
    ScheduleCursor cursor{&config.schedule};

    auto drift = [&, cursor](const std::vector<double>& x, double t,
                             std::vector<double>& out) mutable {
        const std::size_t m = static_cast<std::size_t>(cursor.cue_at(t));
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t i = 0; i < K; ++i) {
            block_x[i] = x[i * M + m];
            active_inputs[i] = config.inputs[i][m];
        }
        competing_drift(block_x, active_inputs, config.cues[m].leak, config.cues[m].inhibition,
                        block_out);
        for (std::size_t i = 0; i < K; ++i) out[i * M + m] = block_out[i];
    };

    ScheduleCursor diff_cursor{&config.schedule};
    auto diffusion = [&, diff_cursor](const std::vector<double>&, double t,
                                      std::vector<double>& out) mutable {
        const std::size_t m = static_cast<std::size_t>(diff_cursor.cue_at(t));
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t i = 0; i < K; ++i) out[i * M + m] = config.sigma[i];
    };

    const double margin = config.resolved_margin();
    std::vector<double> aggregates(K);
    auto aggregate = [&](const std::vector<double>& x) {
        for (std::size_t i = 0; i < K; ++i) {
            double s = 0.0;
            for (std::size_t m = 0; m < M; ++m) s += x[i * M + m];
            aggregates[i] = s;
        }
    };
    auto stop = [&](const std::vector<double>& x, double) -> std::optional<int> {
        if (protocol != Protocol::free_response) return std::nullopt;
        aggregate(x);
        return criterion_fired(aggregates, config.thresholds, config.criterion, margin);
    };

    auto streams = pool_streams(rng, K * M);
    const auto r = integrate_sde(drift, diffusion, std::vector<double>(K * M, 0.0), grid,
                                 std::span<RngStream>(streams), stop);
    aggregate(r.state);
    DecisionOutcome out = outcome_from(r, grid, protocol, argmax_lowest(aggregates));
    out.final_state = aggregates;  // report per-pool aggregates, matching the criterion
    return out;
}

DecisionOutcome simulate_lip(const LipConfig& config, const TimeGrid& grid, RngStream& rng,
                             Protocol protocol) {
    config.validate();
    const std::size_t K = config.n_pools();

    // Gain scales drive and noise together.
    std::vector<double> drive(K), noise(K);
    for (std::size_t j = 0; j < K; ++j) {
        drive[j] = config.gamma_E * config.inputs[j];
        noise[j] = config.gamma_E * config.sigma[j];
    }

    auto drift = [&config, &drive](const std::vector<double>& x, double, std::vector<double>& out) {
        competing_drift(x, drive, config.leak, config.gamma_I, out);
    };
    auto diffusion = [&noise](const std::vector<double>&, double, std::vector<double>& out) {
        std::copy(noise.begin(), noise.end(), out.begin());
    };
    auto stop = [&config, protocol](const std::vector<double>& x, double) -> std::optional<int> {
        if (protocol != Protocol::free_response) return std::nullopt;
        return criterion_fired(x, config.thresholds, Criterion::absolute_threshold, 0.0);
    };

    auto streams = pool_streams(rng, K);
    const auto r = integrate_sde(drift, diffusion, std::vector<double>(K, 0.0), grid,
                                 std::span<RngStream>(streams), stop);
    return outcome_from(r, grid, protocol, argmax_lowest(r.state));
}

DecisionOutcome simulate(const ModelConfig& config, const TimeGrid& grid, RngStream& rng,
                         Protocol protocol) {
    return std::visit(
        [&](const auto& c) -> DecisionOutcome {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, DdmParams>) return simulate_ddm(c, grid, rng, protocol);
            else if constexpr (std::is_same_v<T, MultiCue2afcParams>)
                return simulate_multicue_2afc(c, grid, rng, protocol);
            else if constexpr (std::is_same_v<T, RaceConfig>)
                return simulate_race(c, grid, rng, protocol);
            else if constexpr (std::is_same_v<T, MultiCueRaceConfig>)
                return simulate_multicue_race(c, grid, rng, protocol);
            else
                return simulate_lip(c, grid, rng, protocol);
        },
        config);
}

int correct_choice(const ModelConfig& config) {
    return std::visit([](const auto& c) { return c.correct; }, config);
}

PerformanceStats estimate_performance(const ModelConfig& config, const TimeGrid& grid,
                                      Protocol protocol, std::size_t n_trials,
                                      std::uint64_t base_seed, std::uint64_t stream_base) {
    if (n_trials < 1) throw std::invalid_argument("estimate_performance: n_trials must be >= 1");
    const int correct = correct_choice(config);

    // Fixed chunking; partials reduce in chunk order so the result is
    // independent of the worker count.
    constexpr std::size_t kChunk = 1024;
    const std::size_t n_chunks = (n_trials + kChunk - 1) / kChunk;

    struct Partial {
        std::size_t n_correct = 0;
        std::size_t n_decided = 0;
        std::size_t n_timeout = 0;
        double sum_dt = 0.0;
        double sum_dt2 = 0.0;
    };
    std::vector<Partial> partials(n_chunks);

    parallel_for_index(n_chunks, [&](std::size_t chunk) {
        const std::size_t begin = chunk * kChunk;
        const std::size_t end = std::min(begin + kChunk, n_trials);
        Partial p;
        double c_dt = 0.0, c_dt2 = 0.0;  // Kahan compensation
        for (std::size_t t = begin; t < end; ++t) {
            RngStream rng(base_seed, stream_base + t);
            const DecisionOutcome out = simulate(config, grid, rng, protocol);
            if (out.termination == Termination::timeout) {
                ++p.n_timeout;
                continue;
            }
            ++p.n_decided;
            if (out.choice && *out.choice == correct) ++p.n_correct;
            const double dt = out.decision_time;
            double y = dt - c_dt;
            double s = p.sum_dt + y;
            c_dt = (s - p.sum_dt) - y;
            p.sum_dt = s;
            y = dt * dt - c_dt2;
            s = p.sum_dt2 + y;
            c_dt2 = (s - p.sum_dt2) - y;
            p.sum_dt2 = s;
        }
        partials[chunk] = p;
    });

    PerformanceStats stats;
    stats.n_trials = n_trials;
    double sum_dt = 0.0, sum_dt2 = 0.0;
    for (const auto& p : partials) {
        stats.n_correct += p.n_correct;
        stats.n_decided += p.n_decided;
        stats.n_timeout += p.n_timeout;
        sum_dt += p.sum_dt;
        sum_dt2 += p.sum_dt2;
    }
    stats.sum_dt_decided = sum_dt;
    const double n = static_cast<double>(n_trials);
    stats.accuracy = static_cast<double>(stats.n_correct) / n;
    stats.accuracy_se = std::sqrt(stats.accuracy * (1.0 - stats.accuracy) / n);
    if (stats.n_decided > 0) {
        const double nd = static_cast<double>(stats.n_decided);
        stats.mean_dt = sum_dt / nd;
        if (stats.n_decided > 1) {
            const double var = std::max(0.0, (sum_dt2 - sum_dt * sum_dt / nd) / (nd - 1.0));
            stats.mean_dt_se = std::sqrt(var / nd);
        }
    } else {
        stats.mean_dt = std::numeric_limits<double>::quiet_NaN();
        stats.mean_dt_se = std::numeric_limits<double>::quiet_NaN();
    }
    return stats;
}

}  // namespace hitl
