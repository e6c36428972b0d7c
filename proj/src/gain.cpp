#include "hitl/gain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hitl {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

GainState GainBounds::clamp(GainState g) const {
    g.gamma_E = std::clamp(g.gamma_E, e_min, e_max);
    g.gamma_I = std::clamp(g.gamma_I, i_min, i_max);
    return g;
}

double gain_distance(const GainState& a, const GainState& b) {
    return std::hypot(a.gamma_E - b.gamma_E, a.gamma_I - b.gamma_I);
}

void UtilityTrace::validate() const {
    if (!(tau_s > 0.0 && tau_l > tau_s))
        throw std::invalid_argument("UtilityTrace: need tau_l > tau_s > 0");
}

UtilityTrace update_utilities(const UtilityTrace& trace, double reward, double dt) {
    trace.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("update_utilities: dt must be > 0");
    UtilityTrace next = trace;
    next.u_s += (dt / trace.tau_s) * (reward - trace.u_s);
    next.u_l += (dt / trace.tau_l) * (reward - trace.u_l);
    return next;
}

double engagement_index(double u_s, double u_l) {
    // (1 - 1/(1+e^{u_s})) = logistic(u_s)
    return logistic(u_s) * logistic(-u_l);
}

LcMode update_mode(LcMode current, double engagement, double theta_on, double theta_off) {
    if (!(0.0 < theta_off && theta_off < theta_on && theta_on < 1.0))
        throw std::invalid_argument("update_mode: invalid thresholds, need 0 < theta_off < theta_on < 1");
    if (current == LcMode::tonic && engagement >= theta_on) return LcMode::phasic;
    if (current == LcMode::phasic && engagement <= theta_off) return LcMode::tonic;
    return current;
}

GainState perturb_gain_assigned(const GainState& state, const GainState& region_center,
                                RngStream& rng, double s0, const GainBounds& bounds,
                                std::optional<double> noise_scale) {
    if (!(s0 >= 0.0)) throw std::invalid_argument("perturb_gain_assigned: s0 must be >= 0");
    const double noise = noise_scale.value_or(s0);

    double ux, uy;
    const double dist = gain_distance(state, region_center);
    if (dist > 0.0) {
        ux = (state.gamma_E - region_center.gamma_E) / dist;
        uy = (state.gamma_I - region_center.gamma_I) / dist;
    } else {
        const double angle = rng.uniform(0.0, kTwoPi);
        ux = std::cos(angle);
        uy = std::sin(angle);
    }
    const double xi_x = rng.gaussian();
    const double xi_y = rng.gaussian();

    GainState next = state;
    next.gamma_E += s0 * ux + noise * xi_x;
    next.gamma_I += s0 * uy + noise * xi_y;
    return bounds.clamp(next);
}

GainState restore_gain_skipped(const GainState& state, const GainState& region_center,
                               RngStream& rng, double alpha, double s1, const GainBounds& bounds) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("restore_gain_skipped: alpha must be in (0, 1]");
    if (!(s1 >= 0.0)) throw std::invalid_argument("restore_gain_skipped: s1 must be >= 0");

    const double xi_x = rng.gaussian();
    const double xi_y = rng.gaussian();

    GainState next = state;
    next.gamma_E += alpha * (region_center.gamma_E - state.gamma_E) + s1 * xi_x;
    next.gamma_I += alpha * (region_center.gamma_I - state.gamma_I) + s1 * xi_y;
    return bounds.clamp(next);
}

double lc_step_multiplier(LcMode mode, bool enabled) {
    if (!enabled) return 1.0;
    return mode == LcMode::phasic ? 0.5 : 2.0;
}

}  // namespace hitl
