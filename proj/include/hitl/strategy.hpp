#pragma once

#include <cstddef>
#include <vector>

#include "hitl/rng.hpp"

namespace hitl {

// Per-cue validities: conditional probability that a choice based on the
// cue alone is correct. All entries in [0, 1].
struct CueValidities {
    std::vector<double> q;

    std::size_t size() const { return q.size(); }
    void validate() const;
};

// Softmax cue weights; entries positive and summing to 1.
struct CueWeights {
    std::vector<double> a;

    std::size_t size() const { return a.size(); }
    void validate() const;
};

// Ordered cue-processing intervals covering [0, horizon]. Cue indices are
// 0-based.
struct ScheduleInterval {
    double t_begin = 0.0;
    double t_end = 0.0;
    int cue = 0;
};

struct Schedule {
    std::vector<ScheduleInterval> intervals;
    double horizon = 0.0;

    // Throws std::invalid_argument on a gap, overlap, bad cue index, or a
    // cover that does not match [0, horizon].
    void validate(std::size_t n_cues) const;

    // Active cue at time t; t is clamped to the final interval at the
    // horizon boundary.
    int cue_at(double t) const;
};

enum class ScheduleMode { deterministic, probabilistic };

// Weight factors from validities under excitatory gain:
//   a_m = exp(gamma_E q_m) / sum_i exp(gamma_E q_i)
// computed with the max exponent subtracted.
CueWeights softmax_weights(const CueValidities& q, double gamma_E);

// Max-normalized relative-preference vector p_m = a_m / max_i a_i.
// Diagnostic output only; it does not sum to 1 and is never sampled from.
std::vector<double> schedule_distribution(const CueWeights& a);

// Equal-length intervals (horizon/L each). Deterministic mode apportions
// interval counts to cues by largest remainder and orders blocks by
// descending weight; probabilistic mode draws each interval's cue i.i.d.
// from categorical(a).
Schedule build_schedule(const CueWeights& a, std::size_t L, double horizon, RngStream& rng,
                        ScheduleMode mode);

// max_m a_m in [1/M, 1]; near 1/M means compensatory (all cues weighted
// alike), near 1 means heuristic (single dominant cue).
double strategy_index(const CueWeights& a);

}  // namespace hitl
