#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "hitl/sde.hpp"
#include "hitl/strategy.hpp"

namespace hitl {

enum class Protocol { free_response, interrogation };

enum class Termination { threshold, interrogation, timeout };

struct DecisionOutcome {
    std::optional<int> choice;        // alternative index; empty on timeout
    double decision_time = 0.0;       // horizon on timeout
    Termination termination = Termination::timeout;
    std::vector<double> final_state;  // accumulator values at the stopping point
};

// Two-threshold leaky drift-diffusion accumulator, x(0) = x0 = 0.
struct DdmParams {
    double mu = 0.0;       // drift, evidence/s
    double lambda = 0.0;   // leak, 1/s
    double sigma = 1.0;    // diffusion, evidence/sqrt(s); 0 permitted as a noise-free test hook
    double theta_A = 1.0;  // upper threshold, choice 0
    double theta_B = -1.0; // lower threshold, choice 1
    double x0 = 0.0;
    int correct = 0;       // designated correct alternative

    void validate() const;
};

// Single accumulator whose (mu, lambda) switch with the scheduled cue.
struct MultiCue2afcParams {
    struct Cue {
        double mu = 0.0;
        double lambda = 0.0;
    };
    std::vector<Cue> cues;
    double sigma = 1.0;    // shared across cues
    double theta_A = 1.0;
    double theta_B = -1.0;
    double x0 = 0.0;
    Schedule schedule;
    int correct = 0;

    void validate() const;
};

enum class Criterion { absolute_threshold, max_vs_next, max_vs_average };

// K leaky competing accumulators with mutual inhibition.
struct RaceConfig {
    double leak = 0.0;          // k, shared
    double inhibition = 0.0;    // w, shared
    std::vector<double> inputs;      // S_i, one per pool
    std::vector<double> sigma;       // per pool
    std::vector<double> thresholds;  // per pool
    Criterion criterion = Criterion::absolute_threshold;
    std::optional<double> margin;    // delta for the ratio criteria
    int correct = 0;

    std::size_t n_pools() const { return inputs.size(); }
    double resolved_margin() const;  // default 0.2 * min threshold
    void validate() const;
};

// K x M accumulator bank: pool i under cue m evolves only while cue m is
// scheduled; the decision criterion applies to per-pool sums over cues.
struct MultiCueRaceConfig {
    struct CueDynamics {
        double leak = 0.0;        // k_m
        double inhibition = 0.0;  // w_m
    };
    std::vector<CueDynamics> cues;            // size M
    std::vector<std::vector<double>> inputs;  // inputs[i][m], K rows of M
    std::vector<double> sigma;                // per pool
    std::vector<double> thresholds;           // per pool, on the aggregates
    Schedule schedule;
    Criterion criterion = Criterion::absolute_threshold;
    std::optional<double> margin;
    int correct = 0;

    std::size_t n_pools() const { return inputs.size(); }
    std::size_t n_cues() const { return cues.size(); }
    double resolved_margin() const;
    void validate() const;
};

// Linearized mutually-inhibiting population pair (or K-tuple) under
// excitatory/inhibitory gain. Gain multiplies both the sensory drive and
// its noise, so raising gamma_E trades accuracy for speed.
struct LipConfig {
    double leak = 1.0;     // lambda
    double gamma_E = 1.0;  // excitatory gain, > 0
    double gamma_I = 0.5;  // inhibitory gain, >= 0
    std::vector<double> inputs;      // raw sensory S_j
    std::vector<double> sigma;       // per pool
    std::vector<double> thresholds;  // per pool
    int correct = 0;

    std::size_t n_pools() const { return inputs.size(); }
    void validate() const;
};

DecisionOutcome simulate_ddm(const DdmParams& params, const TimeGrid& grid, RngStream& rng,
                             Protocol protocol);
DecisionOutcome simulate_multicue_2afc(const MultiCue2afcParams& params, const TimeGrid& grid,
                                       RngStream& rng, Protocol protocol);
DecisionOutcome simulate_race(const RaceConfig& config, const TimeGrid& grid, RngStream& rng,
                              Protocol protocol);
DecisionOutcome simulate_multicue_race(const MultiCueRaceConfig& config, const TimeGrid& grid,
                                       RngStream& rng, Protocol protocol);
DecisionOutcome simulate_lip(const LipConfig& config, const TimeGrid& grid, RngStream& rng,
                             Protocol protocol);

using ModelConfig =
    std::variant<DdmParams, MultiCue2afcParams, RaceConfig, MultiCueRaceConfig, LipConfig>;

DecisionOutcome simulate(const ModelConfig& config, const TimeGrid& grid, RngStream& rng,
                         Protocol protocol);
int correct_choice(const ModelConfig& config);

struct PerformanceStats {
    double accuracy = 0.0;     // correct fraction; timeouts count as incorrect
    double accuracy_se = 0.0;  // binomial standard error
    double mean_dt = 0.0;      // over decided trials; NaN when none decided
    double mean_dt_se = 0.0;
    std::size_t n_trials = 0;
    std::size_t n_correct = 0;
    std::size_t n_decided = 0;
    std::size_t n_timeout = 0;
    double sum_dt_decided = 0.0;
};

// Monte-Carlo accuracy and decision time. Trial t draws from stream
// (base_seed, stream_base + t); chunks of fixed size reduce in index order,
// so results are identical at any worker count.
PerformanceStats estimate_performance(const ModelConfig& config, const TimeGrid& grid,
                                      Protocol protocol, std::size_t n_trials,
                                      std::uint64_t base_seed, std::uint64_t stream_base = 0);

}  // namespace hitl
