#include "hitl/supervisor.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "hitl/io.hpp"

namespace hitl {

namespace {

// Stream ids for a supervisor run sit far above the surface-build ids so a
// shared seed never reuses a stream.
constexpr std::uint64_t kRunStreamBase = std::uint64_t{1} << 62;

struct SeriesStats {
    std::optional<double> mean;
    std::optional<double> var;
};

template <class Getter>
SeriesStats series_stats(const std::vector<TrialRecord>& records, Getter&& get) {
    SeriesStats s;
    const std::size_t n = records.size();
    if (n == 0) return s;
    double sum = 0.0;
    for (const auto& r : records) sum += get(r);
    const double mean = sum / static_cast<double>(n);
    s.mean = mean;
    if (n >= 2) {
        double sq = 0.0;
        for (const auto& r : records) {
            const double d = get(r) - mean;
            sq += d * d;
        }
        s.var = sq / static_cast<double>(n - 1);
    }
    return s;
}

}  // namespace

std::vector<Task> gen_tasks(std::size_t n, double lo, double hi, RngStream& rng) {
    if (!(0.0 < lo && lo <= hi && hi <= 1.0))
        throw std::invalid_argument("gen_tasks: invalid range, need 0 < lo <= hi <= 1");
    std::vector<Task> tasks;
    tasks.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        tasks.push_back({i, lo == hi ? lo : rng.uniform(lo, hi), {}});
    return tasks;
}

double autonomy_success(double simplicity) {
    if (!(simplicity > 0.0 && simplicity <= 1.0))
        throw std::invalid_argument("autonomy_success: simplicity must lie in (0, 1]");
    return 0.95 * simplicity;
}

double human_success(double simplicity, const GainState& state, const RewardSurface& surface) {
    if (!(simplicity > 0.0 && simplicity <= 1.0))
        throw std::invalid_argument("human_success: simplicity must lie in (0, 1]");
    return simplicity * lookup(surface, state);
}

double dispatch_probability(double p0, double p1) {
    if (!(p0 >= 0.0 && p0 <= 1.0 && p1 >= 0.0 && p1 <= 1.0))
        throw std::invalid_argument("dispatch_probability: probabilities must lie in [0, 1]");
    return (1.0 - p0) * p1;
}

double average_success(double p, double p0, double p1) {
    return (1.0 - p) * p0 + p * p1;
}

TrialRecord step(const GainState& state, const RewardSurface& surface, const Task& task,
                 RngStream& rng, const GainDynamics& dynamics, double step_scale) {
    TrialRecord rec;
    rec.task_id = task.id;
    rec.simplicity = task.simplicity;
    rec.gain_before = state;
    rec.p0 = human_success(task.simplicity, state, surface);
    rec.p1 = autonomy_success(task.simplicity);
    rec.p = dispatch_probability(rec.p0, rec.p1);
    rec.p_bar = average_success(rec.p, rec.p0, rec.p1);

    rec.assignment = rng.bernoulli(rec.p) ? Assignment::autonomy : Assignment::human;
    const double success_prob = rec.assignment == Assignment::human ? rec.p0 : rec.p1;
    rec.result = rng.bernoulli(success_prob) ? TaskResult::success : TaskResult::failure;

    if (rec.assignment == Assignment::human) {
        rec.gain_after = perturb_gain_assigned(state, dynamics.region_center, rng,
                                               step_scale * dynamics.s0, dynamics.bounds);
    } else {
        rec.gain_after = restore_gain_skipped(state, dynamics.region_center, rng, dynamics.alpha,
                                              dynamics.s1, dynamics.bounds);
    }
    return rec;
}

RunSummary run(const RewardSurface& surface, const HighPerfRegion& region,
               const SupervisorConfig& config, std::uint64_t seed) {
    RunSummary summary;
    summary.seed = seed;

    nlohmann::json digest_src = {
        {"n_tasks", config.n_tasks},
        {"task_lo", config.task_lo},
        {"task_hi", config.task_hi},
        {"s0", config.dynamics.s0},
        {"alpha", config.dynamics.alpha},
        {"s1", config.dynamics.s1},
        {"engagement", config.engagement.enabled},
        {"surface_digest", surface.config_digest},
        {"region_level", region.level},
    };
    summary.config_digest = hex64(fnv1a64(digest_src.dump()));

    RngStream task_rng(seed, kRunStreamBase);
    const auto tasks = gen_tasks(config.n_tasks, config.task_lo, config.task_hi, task_rng);

    GainState state = config.initial.value_or(config.dynamics.region_center);
    UtilityTrace trace{0.0, 0.0, config.engagement.tau_s, config.engagement.tau_l};
    LcMode mode = LcMode::phasic;
    double step_scale = 1.0;

    summary.records.reserve(tasks.size());
    std::size_t n_success = 0;
    std::size_t n_contained = 0;
    for (const auto& task : tasks) {
        RngStream rng(seed, kRunStreamBase + 1 + task.id);
        const TrialRecord rec = step(state, surface, task, rng, config.dynamics, step_scale);
        state = rec.gain_after;
        if (rec.result == TaskResult::success) ++n_success;
        if (gain_distance(rec.gain_after, region.center) <= 2.0 * region.effective_radius)
            ++n_contained;

        if (config.engagement.enabled) {
            const double reward = rec.result == TaskResult::success ? 1.0 : 0.0;
            trace = update_utilities(trace, reward, config.engagement.dt_per_task);
            mode = update_mode(mode, engagement_index(trace.u_s, trace.u_l),
                               config.engagement.theta_on, config.engagement.theta_off);
            step_scale = lc_step_multiplier(mode, true);
        }
        summary.records.push_back(rec);
    }

    const auto p0_stats = series_stats(summary.records, [](const TrialRecord& r) { return r.p0; });
    const auto pb_stats =
        series_stats(summary.records, [](const TrialRecord& r) { return r.p_bar; });
    summary.mean_p0 = p0_stats.mean;
    summary.var_p0 = p0_stats.var;
    summary.mean_p_bar = pb_stats.mean;
    summary.var_p_bar = pb_stats.var;
    if (!summary.records.empty()) {
        const double n = static_cast<double>(summary.records.size());
        summary.containment = static_cast<double>(n_contained) / n;
        summary.empirical_success = static_cast<double>(n_success) / n;
    }
    return summary;
}

std::string run_csv(const RunSummary& summary) {
    std::string out = "task,m,gamma_E,gamma_I,p0,p1,p,assignment,outcome,p_bar\n";
    for (const auto& r : summary.records) {
        out += std::to_string(r.task_id);
        out += ',';
        out += format_double(r.simplicity);
        out += ',';
        out += format_double(r.gain_before.gamma_E);
        out += ',';
        out += format_double(r.gain_before.gamma_I);
        out += ',';
        out += format_double(r.p0);
        out += ',';
        out += format_double(r.p1);
        out += ',';
        out += format_double(r.p);
        out += ',';
        out += r.assignment == Assignment::human ? "human" : "autonomy";
        out += ',';
        out += r.result == TaskResult::success ? "success" : "failure";
        out += ',';
        out += format_double(r.p_bar);
        out += '\n';
    }
    return out;
}

void write_run_csv(const RunSummary& summary, const std::filesystem::path& path) {
    write_text_file(path, run_csv(summary));
}

namespace {

nlohmann::json opt_json(const std::optional<double>& v) {
    if (v) return *v;
    return nullptr;
}

}  // namespace

std::string run_summary_json(const RunSummary& summary) {
    nlohmann::json j = {
        {"n_tasks", summary.records.size()},
        {"mean_p0", opt_json(summary.mean_p0)},
        {"var_p0", opt_json(summary.var_p0)},
        {"mean_p_bar", opt_json(summary.mean_p_bar)},
        {"var_p_bar", opt_json(summary.var_p_bar)},
        {"containment", opt_json(summary.containment)},
        {"empirical_success", opt_json(summary.empirical_success)},
        {"seed", summary.seed},
        {"config_digest", summary.config_digest},
    };
    return j.dump(2) + "\n";
}

void write_run_summary(const RunSummary& summary, const std::filesystem::path& path) {
    write_text_file(path, run_summary_json(summary));
}

}  // namespace hitl
