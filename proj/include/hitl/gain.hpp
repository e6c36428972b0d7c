#pragma once

#include <optional>

#include "hitl/rng.hpp"

namespace hitl {

// Operator internal state: excitatory and inhibitory neuronal gain.
struct GainState {
    double gamma_E = 1.0;
    double gamma_I = 0.5;

    bool operator==(const GainState&) const = default;
};

// Axis-aligned bounds of the reward-surface grid; gain updates clamp here.
struct GainBounds {
    double e_min = 0.0, e_max = 1.0;
    double i_min = 0.0, i_max = 1.0;

    GainState clamp(GainState g) const;
};

double gain_distance(const GainState& a, const GainState& b);

// Reward traces at two timescales; tau_l > tau_s > 0.
struct UtilityTrace {
    double u_s = 0.0;
    double u_l = 0.0;
    double tau_s = 2.0;    // seconds
    double tau_l = 120.0;  // seconds

    void validate() const;
};

enum class LcMode { phasic, tonic };

// First-order exponential integration of a reward sample at both timescales:
// u <- u + (dt/tau) (reward - u).
UtilityTrace update_utilities(const UtilityTrace& trace, double reward, double dt);

// E = (1 - 1/(1+exp(u_s))) * (1/(1+exp(u_l))), in (0, 1); rises with recent
// reward, falls when the long-term trace is already high.
double engagement_index(double u_s, double u_l);

// Hysteretic mode switch: tonic->phasic at E >= theta_on, phasic->tonic at
// E <= theta_off, unchanged in between. Requires 0 < theta_off < theta_on < 1.
LcMode update_mode(LcMode current, double engagement, double theta_on, double theta_off);

// Post-task drift away from the high-performance region: one step of size s0
// along the outward unit vector plus an isotropic Gaussian kick (scale
// defaults to s0; pass 0 to suppress the noise). Clamped to bounds.
GainState perturb_gain_assigned(const GainState& state, const GainState& region_center,
                                RngStream& rng, double s0, const GainBounds& bounds,
                                std::optional<double> noise_scale = std::nullopt);

// Recovery when the operator skips a task: proportional pull toward the
// region center plus Gaussian noise of scale s1. Clamped to bounds.
GainState restore_gain_skipped(const GainState& state, const GainState& region_center,
                               RngStream& rng, double alpha, double s1, const GainBounds& bounds);

// Gain-drift step multiplier from the LC mode: a phasic (focused) operator
// drifts half as fast, a tonic one twice as fast. Identity when disabled.
double lc_step_multiplier(LcMode mode, bool enabled);

}  // namespace hitl
