#include "hitl/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hitl {

void CueValidities::validate() const {
    if (q.empty()) throw std::invalid_argument("CueValidities: need at least one cue");
    for (double v : q)
        if (!(v >= 0.0 && v <= 1.0))
            throw std::invalid_argument("CueValidities: validities must lie in [0, 1]");
}

void CueWeights::validate() const {
    if (a.empty()) throw std::invalid_argument("CueWeights: need at least one cue");
    double sum = 0.0;
    for (double v : a) {
        if (!(v > 0.0)) throw std::invalid_argument("CueWeights: weights must be positive");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("CueWeights: weights must sum to 1");
}

void Schedule::validate(std::size_t n_cues) const {
    if (intervals.empty()) throw std::invalid_argument("Schedule: invalid schedule, no intervals");
    if (!(horizon > 0.0)) throw std::invalid_argument("Schedule: invalid schedule, horizon must be > 0");
    constexpr double tol = 1e-9;
    if (std::abs(intervals.front().t_begin) > tol)
        throw std::invalid_argument("Schedule: invalid schedule, must start at t = 0");
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const auto& iv = intervals[i];
        if (!(iv.t_end > iv.t_begin))
            throw std::invalid_argument("Schedule: invalid schedule, empty or reversed interval");
        if (iv.cue < 0 || static_cast<std::size_t>(iv.cue) >= n_cues)
            throw std::invalid_argument("Schedule: invalid schedule, cue index out of range");
        if (i + 1 < intervals.size()) {
            const double gap = intervals[i + 1].t_begin - iv.t_end;
            if (gap > tol) throw std::invalid_argument("Schedule: invalid schedule, gap between intervals");
            if (gap < -tol) throw std::invalid_argument("Schedule: invalid schedule, overlapping intervals");
        }
    }
    if (std::abs(intervals.back().t_end - horizon) > tol)
        throw std::invalid_argument("Schedule: invalid schedule, does not cover [0, horizon]");
}

int Schedule::cue_at(double t) const {
    for (const auto& iv : intervals)
        if (t < iv.t_end) return iv.cue;
    return intervals.back().cue;
}

CueWeights softmax_weights(const CueValidities& q, double gamma_E) {
    q.validate();
    const double qmax = *std::max_element(q.q.begin(), q.q.end());
    std::vector<double> e(q.size());
    double denom = 0.0;
    for (std::size_t m = 0; m < q.size(); ++m) {
        e[m] = std::exp(gamma_E * (q.q[m] - qmax));
        denom += e[m];
    }
    for (double& v : e) v /= denom;
    return CueWeights{std::move(e)};
}

std::vector<double> schedule_distribution(const CueWeights& a) {
    a.validate();
    const double amax = *std::max_element(a.a.begin(), a.a.end());
    std::vector<double> p(a.size());
    for (std::size_t m = 0; m < a.size(); ++m) p[m] = a.a[m] / amax;
    return p;
}

namespace {

// Largest-remainder apportionment of L slots proportional to a (sums to 1).
std::vector<std::size_t> apportion(const std::vector<double>& a, std::size_t L) {
    const std::size_t M = a.size();
    std::vector<std::size_t> counts(M);
    std::vector<double> frac(M);
    std::size_t assigned = 0;
    for (std::size_t m = 0; m < M; ++m) {
        const double exact = a[m] * static_cast<double>(L);
        counts[m] = static_cast<std::size_t>(std::floor(exact));
        frac[m] = exact - std::floor(exact);
        assigned += counts[m];
    }
    std::vector<std::size_t> order(M);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&frac](std::size_t i, std::size_t j) { return frac[i] > frac[j]; });
    for (std::size_t r = 0; assigned < L; ++r, ++assigned) counts[order[r % M]] += 1;
    return counts;
}

}  // namespace

Schedule build_schedule(const CueWeights& a, std::size_t L, double horizon, RngStream& rng,
                        ScheduleMode mode) {
    a.validate();
    if (L < 1) throw std::invalid_argument("build_schedule: L must be >= 1");
    if (!(horizon > 0.0)) throw std::invalid_argument("build_schedule: horizon must be > 0");

    const std::size_t M = a.size();
    const double len = horizon / static_cast<double>(L);
    std::vector<int> cues;
    cues.reserve(L);

    if (mode == ScheduleMode::deterministic) {
        const auto counts = apportion(a.a, L);
        std::vector<std::size_t> order(M);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&a](std::size_t i, std::size_t j) { return a.a[i] > a.a[j]; });
        for (std::size_t m : order)
            for (std::size_t c = 0; c < counts[m]; ++c) cues.push_back(static_cast<int>(m));
    } else {
        for (std::size_t l = 0; l < L; ++l) {
            const double u = rng.uniform01();
            double cum = 0.0;
            int pick = static_cast<int>(M) - 1;
            for (std::size_t m = 0; m < M; ++m) {
                cum += a.a[m];
                if (u < cum) {
                    pick = static_cast<int>(m);
                    break;
                }
            }
            cues.push_back(pick);
        }
    }

    Schedule s;
    s.horizon = horizon;
    s.intervals.reserve(L);
    for (std::size_t l = 0; l < L; ++l) {
        const double t0 = static_cast<double>(l) * len;
        const double t1 = (l + 1 == L) ? horizon : static_cast<double>(l + 1) * len;
        s.intervals.push_back({t0, t1, cues[l]});
    }
    return s;
}

double strategy_index(const CueWeights& a) {
    a.validate();
    return *std::max_element(a.a.begin(), a.a.end());
}

}  // namespace hitl
