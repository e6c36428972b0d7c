// Development runner: sweeps candidate defaults for the gain-parameterized
// population model and reports surface shape, region size and the
// speed/accuracy ordering. Not registered with ctest.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "hitl/decision.hpp"
#include "hitl/reward_map.hpp"

using namespace hitl;

int main(int argc, char** argv) {
    LipConfig base;
    base.leak = 1.0;
    base.inputs = {2.0, 1.0};
    base.sigma = {1.0, 1.0};
    base.thresholds = {1.0, 1.0};
    base.correct = 0;

    double ndt = 0.3, rsi = 1.0;
    std::size_t nE = 11, nI = 11, trials = 400;
    double horizon = 10.0;
    // args: S0 S1 sigma theta leak [trials nE nI horizon]
    if (argc >= 5) {
        base.inputs = {std::atof(argv[1]), std::atof(argv[2])};
        base.sigma = {std::atof(argv[3]), std::atof(argv[3])};
        base.thresholds = {std::atof(argv[4]), std::atof(argv[4])};
    }
    if (argc >= 6) base.leak = std::atof(argv[5]);
    if (argc >= 7) trials = static_cast<std::size_t>(std::atol(argv[6]));
    if (argc >= 8) nE = static_cast<std::size_t>(std::atol(argv[7]));
    if (argc >= 9) nI = static_cast<std::size_t>(std::atol(argv[8]));
    if (argc >= 10) horizon = std::atof(argv[9]);

    const GainGrid grid{{0.2, 2.0, nE}, {0.0, 1.0, nI}};
    const TimeGrid tgrid{1e-3, horizon};

    const auto t0 = std::chrono::steady_clock::now();
    RewardSurface surface;
    try {
        surface = compute_surface(grid, base, tgrid, trials, ndt, rsi, 42);
    } catch (const std::exception& e) {
        std::printf("surface failed: %s\n", e.what());
        return 1;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::printf("S=[%.2f,%.2f] sigma=%.2f theta=%.2f leak=%.2f horizon=%.1f\n", base.inputs[0],
                base.inputs[1], base.sigma[0], base.thresholds[0], base.leak, horizon);
    std::printf("build: %.1f s for %zux%zu x %zu trials\n", secs, nE, nI, trials);
    std::printf("argmax: gamma_E=%.3f gamma_I=%.3f (cell %zu,%zu of %zux%zu)\n",
                surface.argmax_state().gamma_E, surface.argmax_state().gamma_I, surface.argmax_e,
                surface.argmax_i, nE, nI);

    const auto region = locate_region(surface, 0.9);
    std::printf("region 0.9: %zu cells, effective radius %.4f\n", region.members.size(),
                region.effective_radius);

    // value profile along the argmax row/column
    std::printf("profile over gamma_E at argmax gamma_I:");
    for (std::size_t ie = 0; ie < nE; ++ie)
        std::printf(" %.2f", surface.value_at(ie, surface.argmax_i));
    std::printf("\nprofile over gamma_I at argmax gamma_E:");
    for (std::size_t ii = 0; ii < nI; ++ii)
        std::printf(" %.2f", surface.value_at(surface.argmax_e, ii));
    std::printf("\n");

    // speed-accuracy ordering at the argmax gamma_I
    std::printf("gamma_E sweep at gamma_I=%.3f:\n", surface.argmax_state().gamma_I);
    for (double g : {0.4, 1.0, 1.8}) {
        LipConfig cfg = base;
        cfg.gamma_E = g;
        cfg.gamma_I = surface.argmax_state().gamma_I;
        const auto stats =
            estimate_performance(cfg, tgrid, Protocol::free_response, 10000, 4242, 0);
        std::printf("  gamma_E=%.1f acc=%.4f mean_dt=%.4f timeouts=%zu\n", g, stats.accuracy,
                    stats.mean_dt, stats.n_timeout);
    }
    return 0;
}
