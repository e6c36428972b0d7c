#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hitl/gain.hpp"
#include "hitl/reward_map.hpp"

namespace hitl {

// One dispatched job. `simplicity` is in (0, 1]: 1 is the easiest task and
// scales both agents' success rates; the opaque payload carries whatever the
// caller wants to attach.
struct Task {
    std::size_t id = 0;
    double simplicity = 1.0;
    std::string payload;
};

enum class Assignment { human, autonomy };
enum class TaskResult { success, failure };

struct TrialRecord {
    std::size_t task_id = 0;
    double simplicity = 1.0;
    GainState gain_before;
    double p0 = 0.0;    // human success probability
    double p1 = 0.0;    // autonomy success probability
    double p = 0.0;     // probability of dispatching to autonomy, (1-p0) p1
    Assignment assignment = Assignment::human;
    TaskResult result = TaskResult::failure;
    GainState gain_after;
    double p_bar = 0.0;  // (1-p) p0 + p p1
};

// Gain drift/restoration parameters of the closed loop.
struct GainDynamics {
    GainState region_center;
    GainBounds bounds;
    double s0 = 0.05;   // outward-drift step when the human handles a task
    double alpha = 0.3; // pull rate toward the region when the human skips
    double s1 = 0.01;   // noise scale of the restoring step
};

// Optional LC engagement loop: task outcomes feed the utility traces and the
// resulting mode scales the outward-drift step. Off by default, which leaves
// the base closed-loop experiment untouched.
struct EngagementConfig {
    bool enabled = false;
    double tau_s = 2.0;
    double tau_l = 120.0;
    double theta_on = 0.3;
    double theta_off = 0.15;
    double dt_per_task = 1.0;  // nominal seconds of trace integration per task
};

struct RunSummary {
    std::vector<TrialRecord> records;
    std::optional<double> mean_p0;
    std::optional<double> var_p0;
    std::optional<double> mean_p_bar;
    std::optional<double> var_p_bar;
    std::optional<double> containment;        // fraction with |Γ - center| <= 2 x region radius
    std::optional<double> empirical_success;  // observed success fraction
    std::uint64_t seed = 0;
    std::string config_digest;
};

// i.i.d. Uniform[lo, hi] simplicities; requires 0 < lo <= hi <= 1.
std::vector<Task> gen_tasks(std::size_t n, double lo, double hi, RngStream& rng);

// p1(m) = 0.95 m.
double autonomy_success(double simplicity);

// p0(m, Γ) = m R(Γ), with R read from the surface by bilinear lookup.
double human_success(double simplicity, const GainState& state, const RewardSurface& surface);

// Probability of assigning the task to the computational model:
// p = (1 - p0) p1. The human keeps the complement p0 + (1-p0)(1-p1).
double dispatch_probability(double p0, double p1);

// Expected success under the dispatch rule: (1-p) p0 + p p1.
double average_success(double p, double p0, double p1);

// One closed-loop step: compute (p0, p1, p), draw the assignment and the
// outcome, then drift the gain outward (human handled the task) or restore
// it toward the region (task skipped). `step_scale` multiplies s0, the hook
// the LC mode uses.
TrialRecord step(const GainState& state, const RewardSurface& surface, const Task& task,
                 RngStream& rng, const GainDynamics& dynamics, double step_scale = 1.0);

struct SupervisorConfig {
    std::size_t n_tasks = 200;
    double task_lo = 0.75;
    double task_hi = 0.95;
    std::optional<GainState> initial;  // defaults to the region center
    GainDynamics dynamics;
    EngagementConfig engagement;
};

// Sequential closed-loop run over a generated task stream. Γ_{i+1} depends
// on assignment_i, so the loop is order-dependent by construction; replicate
// runs with different seeds are independent.
RunSummary run(const RewardSurface& surface, const HighPerfRegion& region,
               const SupervisorConfig& config, std::uint64_t seed);

// CSV export: task,m,gamma_E,gamma_I,p0,p1,p,assignment,outcome,p_bar with
// the gain state the task was dispatched under.
std::string run_csv(const RunSummary& summary);
void write_run_csv(const RunSummary& summary, const std::filesystem::path& path);

// Summary JSON: means, variances, containment fraction, seed, digest.
std::string run_summary_json(const RunSummary& summary);
void write_run_summary(const RunSummary& summary, const std::filesystem::path& path);

}  // namespace hitl
