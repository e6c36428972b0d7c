#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "hitl/decision.hpp"
#include "oracles.hpp"

using namespace hitl;

namespace {

const TimeGrid kGrid{1e-3, 10.0};

DdmParams default_ddm() {
    DdmParams p;
    p.mu = 1.0;
    p.lambda = 0.0;
    p.sigma = 1.0;
    p.theta_A = 1.0;
    p.theta_B = -1.0;
    return p;
}

double binomial_se(double p, std::size_t n) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace

TEST_CASE("zero-drift symmetric ddm splits choices evenly") {
    DdmParams p = default_ddm();
    p.mu = 0.0;
    int a = 0;
    const int n = 10000;
    for (int t = 0; t < n; ++t) {
        RngStream rng(100, static_cast<std::uint64_t>(t));
        const auto out = simulate_ddm(p, kGrid, rng, Protocol::free_response);
        REQUIRE(out.choice.has_value());
        if (*out.choice == 0) ++a;
    }
    CHECK(std::abs(a / double(n) - 0.5) < 0.015);
}

TEST_CASE("noise-free ramp decides A at the threshold time") {
    DdmParams p = default_ddm();
    p.sigma = 0.0;  // test hook
    RngStream rng(1, 0);
    const auto out = simulate_ddm(p, kGrid, rng, Protocol::free_response);
    REQUIRE(out.choice.has_value());
    CHECK(*out.choice == 0);
    CHECK(out.termination == Termination::threshold);
    CHECK(std::abs(out.decision_time - 1.0) <= kGrid.dt + 1e-12);
}

TEST_CASE("default ddm matches the frozen fine-grid oracle") {
    // Independent mt19937_64 Euler oracle, dt = 1e-3, n = 5e5 (same grid, so
    // only Monte-Carlo error separates the two):
    //   accuracy 0.884252 (se 0.000452), mean DT 0.783878 s (se 0.000849).
    // The dt = 1e-4 run gave accuracy 0.883140, mean DT 0.770872.
    const std::size_t n = 20000;
    const auto stats =
        estimate_performance(default_ddm(), kGrid, Protocol::free_response, n, 4242);
    const double acc_tol = 3.0 * std::hypot(stats.accuracy_se, 0.000452);
    CHECK(std::abs(stats.accuracy - 0.884252) < acc_tol);
    const double dt_tol = 3.0 * std::hypot(stats.mean_dt_se, 0.000849);
    CHECK(std::abs(stats.mean_dt - 0.783878) < dt_tol);
    CHECK(stats.n_timeout == 0);
}

TEST_CASE("negating mu swaps the choice probabilities") {
    DdmParams p = default_ddm();
    p.mu = 0.7;
    DdmParams q = p;
    q.mu = -0.7;
    const std::size_t n = 5000;
    std::size_t a_p = 0, b_q = 0;
    for (std::size_t t = 0; t < n; ++t) {
        RngStream r1(55, t), r2(66, t);
        const auto o1 = simulate_ddm(p, kGrid, r1, Protocol::free_response);
        const auto o2 = simulate_ddm(q, kGrid, r2, Protocol::free_response);
        if (o1.choice == 0) ++a_p;
        if (o2.choice == 1) ++b_q;
    }
    const double pa = double(a_p) / double(n), pb = double(b_q) / double(n);
    CHECK(std::abs(pa - pb) < 3.0 * std::sqrt(2.0) * binomial_se(pa, n));
}

TEST_CASE("outcome kinds partition every trial") {
    DdmParams p = default_ddm();
    p.mu = 0.0;
    p.lambda = 3.0;  // strong leak parks the state near 0, so timeouts occur
    p.theta_A = 2.5;
    p.theta_B = -2.5;
    const TimeGrid grid{1e-3, 1.0};
    std::size_t a = 0, b = 0, to = 0;
    const std::size_t n = 2000;
    for (std::size_t t = 0; t < n; ++t) {
        RngStream rng(7, t);
        const auto out = simulate_ddm(p, grid, rng, Protocol::free_response);
        if (out.termination == Termination::timeout) {
            CHECK(!out.choice.has_value());
            CHECK(out.decision_time == grid.horizon);
            ++to;
        } else if (out.choice == 0) {
            ++a;
        } else {
            ++b;
        }
    }
    CHECK(a + b + to == n);
    CHECK(to > 0);
}

TEST_CASE("leaky interrogation variance is bounded by the stationary law") {
    DdmParams p = default_ddm();
    p.mu = 0.0;
    p.lambda = 1.0;
    p.theta_A = 100.0;  // effectively no absorption
    p.theta_B = -100.0;
    const TimeGrid grid{1e-3, 5.0};
    const std::size_t n = 5000;
    double sum = 0, sq = 0;
    for (std::size_t t = 0; t < n; ++t) {
        RngStream rng(11, t);
        const auto out = simulate_ddm(p, grid, rng, Protocol::interrogation);
        sum += out.final_state[0];
        sq += out.final_state[0] * out.final_state[0];
    }
    const double var = sq / double(n) - (sum / double(n)) * (sum / double(n));
    CHECK(var < 0.5 * 1.1);  // sigma^2/(2 lambda) plus tolerance
}

TEST_CASE("interrogation readout takes the sign, ties to the lowest index") {
    DdmParams p = default_ddm();
    p.mu = 0.0;
    p.sigma = 0.0;  // state stays exactly at 0
    RngStream rng(1, 0);
    const auto out = simulate_ddm(p, TimeGrid{1e-2, 1.0}, rng, Protocol::interrogation);
    CHECK(out.termination == Termination::interrogation);
    CHECK(out.choice == 0);
    CHECK(out.decision_time == 1.0);
}

// ---- multi-cue 2AFC ----

namespace {

Schedule half_half(double horizon) {
    Schedule s;
    s.horizon = horizon;
    s.intervals = {{0.0, horizon / 2, 0}, {horizon / 2, horizon, 1}};
    return s;
}

}  // namespace

TEST_CASE("single-cue degeneracy reproduces the ddm bit for bit") {
    MultiCue2afcParams mc;
    mc.cues = {{0.8, 0.5}};
    mc.sigma = 1.0;
    mc.schedule.horizon = kGrid.horizon;
    mc.schedule.intervals = {{0.0, kGrid.horizon, 0}};

    DdmParams ddm = default_ddm();
    ddm.mu = 0.8;
    ddm.lambda = 0.5;

    for (std::uint64_t t = 0; t < 50; ++t) {
        RngStream r1(31, t), r2(31, t);
        const auto o1 = simulate_multicue_2afc(mc, kGrid, r1, Protocol::free_response);
        const auto o2 = simulate_ddm(ddm, kGrid, r2, Protocol::free_response);
        CHECK(o1.choice == o2.choice);
        CHECK(o1.decision_time == o2.decision_time);
        CHECK(o1.final_state[0] == o2.final_state[0]);
    }
}

TEST_CASE("antisymmetric cues cancel to an even split") {
    MultiCue2afcParams mc;
    mc.cues = {{1.0, 0.0}, {-1.0, 0.0}};
    mc.sigma = 1.0;
    mc.schedule = half_half(1.0);
    const TimeGrid grid{1e-3, 1.0};
    int a = 0;
    const int n = 10000;
    for (int t = 0; t < n; ++t) {
        RngStream rng(77, static_cast<std::uint64_t>(t));
        const auto out = simulate_multicue_2afc(mc, grid, rng, Protocol::interrogation);
        if (out.choice == 0) ++a;
    }
    CHECK(std::abs(a / double(n) - 0.5) < 0.015);
}

TEST_CASE("scheduled drift switch matches the frozen interrogation oracle") {
    // cues mu = [2, 0.5] over equal halves of T = 1: endpoint is
    // Normal(1.25, 1), so P(A) = 0.894350; the independent oracle measured
    // 0.894530 at n = 2e5.
    MultiCue2afcParams mc;
    mc.cues = {{2.0, 0.0}, {0.5, 0.0}};
    mc.sigma = 1.0;
    mc.schedule = half_half(1.0);
    const TimeGrid grid{1e-3, 1.0};
    const std::size_t n = 20000;
    std::size_t a = 0;
    for (std::size_t t = 0; t < n; ++t) {
        RngStream rng(88, t);
        const auto out = simulate_multicue_2afc(mc, grid, rng, Protocol::interrogation);
        if (out.choice == 0) ++a;
    }
    const double pa = double(a) / double(n);
    CHECK(std::abs(pa - 0.894350) < 3.0 * binomial_se(0.894350, n));
}

TEST_CASE("schedule gaps and overlaps are rejected") {
    MultiCue2afcParams mc;
    mc.cues = {{1.0, 0.0}, {0.5, 0.0}};
    mc.schedule.horizon = 1.0;
    mc.schedule.intervals = {{0.0, 0.4, 0}, {0.6, 1.0, 1}};
    RngStream rng(1, 0);
    CHECK_THROWS_AS(simulate_multicue_2afc(mc, TimeGrid{1e-3, 1.0}, rng, Protocol::free_response),
                    std::invalid_argument);
    mc.schedule.intervals = {{0.0, 0.7, 0}, {0.5, 1.0, 1}};
    CHECK_THROWS_AS(simulate_multicue_2afc(mc, TimeGrid{1e-3, 1.0}, rng, Protocol::free_response),
                    std::invalid_argument);
    // shorter than the integration horizon
    mc.schedule.intervals = {{0.0, 0.5, 0}, {0.5, 1.0, 1}};
    CHECK_THROWS_AS(simulate_multicue_2afc(mc, TimeGrid{1e-3, 2.0}, rng, Protocol::free_response),
                    std::invalid_argument);
}

// ---- race ----

namespace {

RaceConfig symmetric_race() {
    RaceConfig c;
    c.leak = 1.0;
    c.inhibition = 0.5;
    c.inputs = {1.0, 1.0};
    c.sigma = {0.8, 0.8};
    c.thresholds = {1.0, 1.0};
    return c;
}

}  // namespace

TEST_CASE("exchangeable pools win equally often") {
    const RaceConfig c = symmetric_race();
    int first = 0, decided = 0;
    const int n = 10000;
    for (int t = 0; t < n; ++t) {
        RngStream rng(200, static_cast<std::uint64_t>(t));
        const auto out = simulate_race(c, kGrid, rng, Protocol::free_response);
        if (!out.choice) continue;
        ++decided;
        if (*out.choice == 0) ++first;
    }
    REQUIRE(decided > 9000);
    CHECK(std::abs(first / double(decided) - 0.5) < 0.015);
}

TEST_CASE("noise-free race is won by the strongest input at theta / S") {
    RaceConfig c;
    c.leak = 0.0;
    c.inhibition = 0.0;
    c.inputs = {1.0, 0.4, 0.2};
    c.sigma = {0.0, 0.0, 0.0};
    c.thresholds = {1.0, 1.0, 1.0};
    RngStream rng(1, 0);
    const auto out = simulate_race(c, kGrid, rng, Protocol::free_response);
    REQUIRE(out.choice == 0);
    CHECK(std::abs(out.decision_time - 1.0) <= kGrid.dt + 1e-12);
}

TEST_CASE("three-pool race matches the frozen interrogation oracle") {
    // S = [1.2, 1.0, 0.8], k = 2, w = 1, sigma = 0.5, T = 2. Independent
    // oracle at dt = 1e-3, n = 2e5: wins [0.545590, 0.302035, 0.152375]
    // (dt = 2e-4 check: [0.545100, 0.301540, 0.153360]).
    RaceConfig c;
    c.leak = 2.0;
    c.inhibition = 1.0;
    c.inputs = {1.2, 1.0, 0.8};
    c.sigma = {0.5, 0.5, 0.5};
    c.thresholds = {1.0, 1.0, 1.0};
    const TimeGrid grid{1e-3, 2.0};
    const std::size_t n = 20000;
    std::vector<double> wins(3, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        RngStream rng(300, t);
        const auto out = simulate_race(c, grid, rng, Protocol::interrogation);
        wins[static_cast<std::size_t>(*out.choice)] += 1.0;
    }
    const double frozen[3] = {0.545590, 0.302035, 0.152375};
    for (int i = 0; i < 3; ++i) {
        const double p = wins[static_cast<std::size_t>(i)] / double(n);
        CHECK(std::abs(p - frozen[i]) <
              3.0 * std::hypot(binomial_se(frozen[i], n), binomial_se(frozen[i], 200000)));
    }
}

TEST_CASE("all three criteria pick the largest input as noise vanishes") {
    for (auto crit :
         {Criterion::absolute_threshold, Criterion::max_vs_next, Criterion::max_vs_average}) {
        RaceConfig c;
        c.leak = 1.0;
        c.inhibition = 0.3;
        c.inputs = {0.6, 1.4, 1.0};
        c.sigma = {0.0, 0.0, 0.0};
        c.thresholds = {1.0, 1.0, 1.0};
        c.criterion = crit;
        RngStream rng(1, 0);
        const auto out = simulate_race(c, kGrid, rng, Protocol::free_response);
        REQUIRE(out.choice.has_value());
        CHECK(*out.choice == 1);
    }
}

TEST_CASE("ratio criteria wait for the configured separation") {
    RaceConfig c = symmetric_race();
    c.inputs = {1.5, 1.0};
    c.criterion = Criterion::max_vs_next;
    c.margin = 0.3;
    RngStream rng(41, 3);
    const auto out = simulate_race(c, kGrid, rng, Protocol::free_response);
    REQUIRE(out.choice.has_value());
    // the winning pool led the runner-up by at least the margin at stop
    const auto& x = out.final_state;
    const std::size_t w = static_cast<std::size_t>(*out.choice);
    double runner_up = -1e300;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (i != w) runner_up = std::max(runner_up, x[i]);
    CHECK(x[w] - runner_up >= 0.3 - 1e-12);
}

// ---- multi-cue race ----

TEST_CASE("single-cue multicue race reproduces the race bit for bit") {
    MultiCueRaceConfig mc;
    mc.cues = {{1.0, 0.5}};
    mc.inputs = {{1.0}, {0.7}};
    mc.sigma = {0.8, 0.8};
    mc.thresholds = {1.0, 1.0};
    mc.schedule.horizon = kGrid.horizon;
    mc.schedule.intervals = {{0.0, kGrid.horizon, 0}};

    RaceConfig rc;
    rc.leak = 1.0;
    rc.inhibition = 0.5;
    rc.inputs = {1.0, 0.7};
    rc.sigma = {0.8, 0.8};
    rc.thresholds = {1.0, 1.0};

    for (std::uint64_t t = 0; t < 50; ++t) {
        RngStream r1(500, t), r2(500, t);
        const auto o1 = simulate_multicue_race(mc, kGrid, r1, Protocol::free_response);
        const auto o2 = simulate_race(rc, kGrid, r2, Protocol::free_response);
        CHECK(o1.choice == o2.choice);
        CHECK(o1.decision_time == o2.decision_time);
        REQUIRE(o1.final_state.size() == o2.final_state.size());
        for (std::size_t i = 0; i < o1.final_state.size(); ++i)
            CHECK(o1.final_state[i] == o2.final_state[i]);
    }
}

TEST_CASE("equal inputs across pools win uniformly") {
    MultiCueRaceConfig mc;
    mc.cues = {{1.0, 0.4}, {1.0, 0.4}};
    mc.inputs = {{0.9, 0.5}, {0.9, 0.5}, {0.9, 0.5}};
    mc.sigma = {0.6, 0.6, 0.6};
    mc.thresholds = {1.0, 1.0, 1.0};
    mc.schedule = half_half(1.0);
    const TimeGrid grid{1e-3, 1.0};
    std::vector<int> wins(3, 0);
    const int n = 10000;
    for (int t = 0; t < n; ++t) {
        RngStream rng(600, static_cast<std::uint64_t>(t));
        const auto out = simulate_multicue_race(mc, grid, rng, Protocol::interrogation);
        wins[static_cast<std::size_t>(*out.choice)]++;
    }
    for (int w : wins) CHECK(std::abs(w / double(n) - 1.0 / 3.0) < 0.02);
}

TEST_CASE("two-cue race matches the frozen oracles") {
    MultiCueRaceConfig mc;
    mc.cues = {{1.0, 0.5}, {1.0, 0.5}};
    mc.inputs = {{1.0, 0.2}, {0.2, 1.0}};
    mc.sigma = {0.5, 0.5};
    mc.thresholds = {1.0, 1.0};
    const TimeGrid grid{1e-3, 1.0};
    const std::size_t n = 20000;

    SUBCASE("equal shares are symmetric: frozen oracle 0.498805") {
        mc.schedule = half_half(1.0);
        std::size_t w0 = 0;
        for (std::size_t t = 0; t < n; ++t) {
            RngStream rng(700, t);
            const auto out = simulate_multicue_race(mc, grid, rng, Protocol::interrogation);
            if (out.choice == 0) ++w0;
        }
        CHECK(std::abs(double(w0) / double(n) - 0.5) < 3.0 * binomial_se(0.5, n));
    }
    SUBCASE("shares 0.7/0.3 favor the first cue's pool: frozen oracle 0.657300") {
        mc.schedule.horizon = 1.0;
        mc.schedule.intervals = {{0.0, 0.7, 0}, {0.7, 1.0, 1}};
        std::size_t w0 = 0;
        for (std::size_t t = 0; t < n; ++t) {
            RngStream rng(701, t);
            const auto out = simulate_multicue_race(mc, grid, rng, Protocol::interrogation);
            if (out.choice == 0) ++w0;
        }
        CHECK(std::abs(double(w0) / double(n) - 0.657300) <
              3.0 * std::hypot(binomial_se(0.6573, n), binomial_se(0.6573, 200000)));
    }
}

// ---- gain-modulated population pair ----

TEST_CASE("zero inhibition decouples the pools into independent O-U trials") {
    LipConfig c;
    c.leak = 1.0;
    c.gamma_E = 1.2;
    c.gamma_I = 0.0;
    c.inputs = {1.5, 0.8};
    c.sigma = {1.0, 1.0};
    c.thresholds = {100.0, 100.0};  // no absorption; compare endpoints
    const TimeGrid grid{1e-3, 2.0};

    RngStream trial(900, 4);
    const auto out = simulate_lip(c, grid, trial, Protocol::interrogation);

    for (std::uint64_t j = 0; j < 2; ++j) {
        RngStream trial2(900, 4);
        std::vector<RngStream> streams{trial2.substream(j)};
        const double drive = c.gamma_E * c.inputs[j];
        const double noise = c.gamma_E * c.sigma[j];
        auto r = integrate_sde(
            [&](const std::vector<double>& x, double, std::vector<double>& out_) {
                out_[0] = drive - c.leak * x[0];
            },
            [&](const std::vector<double>&, double, std::vector<double>& out_) {
                out_[0] = noise;
            },
            {0.0}, grid, std::span<RngStream>(streams), RunToHorizon{});
        CHECK(out.final_state[j] == doctest::Approx(r.state[0]).epsilon(1e-12));
    }
}

TEST_CASE("symmetric population pair splits evenly") {
    LipConfig c;
    c.leak = 1.0;
    c.gamma_E = 1.0;
    c.gamma_I = 0.4;
    c.inputs = {1.2, 1.2};
    c.sigma = {1.0, 1.0};
    c.thresholds = {1.0, 1.0};
    int first = 0, decided = 0;
    const int n = 10000;
    for (int t = 0; t < n; ++t) {
        RngStream rng(901, static_cast<std::uint64_t>(t));
        const auto out = simulate_lip(c, kGrid, rng, Protocol::free_response);
        if (!out.choice) continue;
        ++decided;
        if (*out.choice == 0) ++first;
    }
    REQUIRE(decided > 9000);
    CHECK(std::abs(first / double(decided) - 0.5) < 0.015);
}

TEST_CASE("raising gamma_E trades accuracy for speed") {
    LipConfig c;  // mirrors the surface base model
    c.leak = 1.0;
    c.inputs = {2.0, 1.0};
    c.sigma = {1.0, 1.0};
    c.thresholds = {1.0, 1.0};
    c.gamma_I = 0.5;
    double prev_acc = 2.0, prev_dt = 1e9;
    for (double g : {0.4, 1.0, 1.8}) {
        c.gamma_E = g;
        const auto stats = estimate_performance(c, kGrid, Protocol::free_response, 10000, 902);
        const double mean_dt_all =
            (stats.sum_dt_decided + double(stats.n_timeout) * kGrid.horizon) /
            double(stats.n_trials);
        CHECK(stats.accuracy < prev_acc);
        CHECK(mean_dt_all < prev_dt);
        prev_acc = stats.accuracy;
        prev_dt = mean_dt_all;
    }
}

TEST_CASE("race with k = w reduces to a drift-diffusion difference") {
    // K = 2, k = w = 1: x1 - x2 is a pure DDM with mu = S1 - S2 and
    // sigma' = sigma sqrt(2). KS between endpoint samples at T = 1.
    RaceConfig c;
    c.leak = 1.0;
    c.inhibition = 1.0;
    c.inputs = {1.2, 0.8};
    c.sigma = {0.7, 0.7};
    c.thresholds = {100.0, 100.0};
    const TimeGrid grid{1e-3, 1.0};
    const std::size_t n = 10000;

    std::vector<double> diff(n), ddm(n);
    DdmParams d;
    d.mu = c.inputs[0] - c.inputs[1];
    d.lambda = 0.0;
    d.sigma = c.sigma[0] * std::sqrt(2.0);
    d.theta_A = 100.0;
    d.theta_B = -100.0;
    for (std::size_t t = 0; t < n; ++t) {
        RngStream r1(903, t), r2(904, t);
        const auto o1 = simulate_race(c, grid, r1, Protocol::interrogation);
        diff[t] = o1.final_state[0] - o1.final_state[1];
        const auto o2 = simulate_ddm(d, grid, r2, Protocol::interrogation);
        ddm[t] = o2.final_state[0];
    }
    CHECK(oracles::ks_statistic(diff, ddm) < 0.03);
}

// ---- estimate_performance ----

TEST_CASE("performance estimate basics") {
    SUBCASE("noise-free singleton is perfectly accurate") {
        DdmParams p = default_ddm();
        p.sigma = 0.0;
        const auto stats = estimate_performance(p, kGrid, Protocol::free_response, 1, 1);
        CHECK(stats.accuracy == 1.0);
        CHECK(stats.n_decided == 1);
    }
    SUBCASE("symmetric config is at chance") {
        DdmParams p = default_ddm();
        p.mu = 0.0;
        const std::size_t n = 10000;
        const auto stats = estimate_performance(p, kGrid, Protocol::free_response, n, 2);
        CHECK(std::abs(stats.accuracy - 0.5) <= 3.0 * binomial_se(0.5, n));
    }
    SUBCASE("timeouts count against accuracy") {
        DdmParams p = default_ddm();
        p.mu = 0.0;
        p.lambda = 3.0;
        p.theta_A = 2.5;
        p.theta_B = -2.5;
        const auto stats =
            estimate_performance(p, TimeGrid{1e-3, 0.5}, Protocol::free_response, 2000, 3);
        CHECK(stats.n_timeout > 0);
        CHECK(stats.n_decided + stats.n_timeout == 2000);
        CHECK(stats.accuracy <= double(stats.n_decided) / 2000.0);
    }
}

TEST_CASE("performance estimate is identical at any worker count") {
    DdmParams p = default_ddm();
    setenv("HITL_WORKERS", "1", 1);
    const auto s1 = estimate_performance(p, kGrid, Protocol::free_response, 5000, 42);
    setenv("HITL_WORKERS", "4", 1);
    const auto s4 = estimate_performance(p, kGrid, Protocol::free_response, 5000, 42);
    unsetenv("HITL_WORKERS");
    CHECK(s1.accuracy == s4.accuracy);
    CHECK(s1.mean_dt == s4.mean_dt);
    CHECK(s1.sum_dt_decided == s4.sum_dt_decided);
    CHECK(s1.n_correct == s4.n_correct);
}

TEST_CASE("divergent dynamics surface the integrator error") {
    LipConfig c;
    c.leak = 0.0;
    c.gamma_E = 1.0;
    c.gamma_I = 1e8;  // inhibition blows the state up
    c.inputs = {1.0, 1.0};
    c.sigma = {1.0, 1.0};
    c.thresholds = {1e9, 1e9};
    RngStream rng(999, 0);
    CHECK_THROWS_AS(simulate_lip(c, TimeGrid{1e-3, 1.0}, rng, Protocol::free_response),
                    DivergenceError);
}
