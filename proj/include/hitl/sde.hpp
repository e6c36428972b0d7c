#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hitl/rng.hpp"

namespace hitl {

struct TimeGrid {
    double dt = 1e-3;
    double horizon = 10.0;

    // ceil(horizon/dt), tolerant of binary rounding in the quotient.
    std::size_t n_steps() const {
        return static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
    }

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("TimeGrid: invalid grid, dt must be > 0");
        if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid: invalid grid, horizon must be > 0");
        if (dt > horizon) throw std::invalid_argument("TimeGrid: invalid grid, dt must be <= horizon");
    }
};

struct DivergenceError : std::runtime_error {
    DivergenceError(std::size_t at_step, const std::string& what)
        : std::runtime_error(what), step(at_step) {}
    std::size_t step;
};

struct SdeResult {
    std::vector<double> state;     // state at the stopping point
    double time = 0.0;             // stopping time
    std::size_t step = 0;          // steps taken
    std::optional<int> crossing;   // index reported by the stop rule, if it fired
};

// Stop rule that never fires: integrates to the horizon (fixed-time).
struct RunToHorizon {
    std::optional<int> operator()(const std::vector<double>&, double) const { return std::nullopt; }
};

namespace detail {

template <class Drift, class Diffusion, class Stop, class Noise>
SdeResult euler_maruyama(Drift&& drift, Diffusion&& diffusion, std::vector<double> x0,
                         const TimeGrid& grid, Stop&& stop, Noise&& noise) {
    grid.validate();
    const std::size_t dim = x0.size();
    const std::size_t n = grid.n_steps();
    const double sqrt_dt = std::sqrt(grid.dt);

    std::vector<double> x = std::move(x0);
    std::vector<double> mu(dim), sig(dim);

    if (auto hit = stop(x, 0.0)) return {x, 0.0, 0, hit};

    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * grid.dt;
        drift(x, t, mu);
        diffusion(x, t, sig);
        for (std::size_t c = 0; c < dim; ++c) {
            x[c] += mu[c] * grid.dt + sig[c] * sqrt_dt * noise(c);
            if (!std::isfinite(x[c]))
                throw DivergenceError(k + 1, "integrate_sde: state diverged at step " +
                                                 std::to_string(k + 1));
        }
        const double t_next = static_cast<double>(k + 1) * grid.dt;
        if (auto hit = stop(x, t_next)) return {x, t_next, k + 1, hit};
    }
    return {x, static_cast<double>(n) * grid.dt, n, std::nullopt};
}

}  // namespace detail

// Explicit fixed-step first-order scheme (Euler-Maruyama):
//   x_{k+1} = x_k + drift(x_k, t_k) dt + diffusion(x_k, t_k) dW_k
// with dW_k ~ Normal(0, dt) i.i.d. per component, drawn from `rng` in
// component order. `stop(x, t)` is checked at every grid point including
// t = 0 and returns the chosen alternative index once the rule fires;
// pass RunToHorizon{} for fixed-time integration.
template <class Drift, class Diffusion, class Stop>
SdeResult integrate_sde(Drift&& drift, Diffusion&& diffusion, std::vector<double> x0,
                        const TimeGrid& grid, RngStream& rng, Stop&& stop) {
    return detail::euler_maruyama(drift, diffusion, std::move(x0), grid, stop,
                                  [&rng](std::size_t) { return rng.gaussian(); });
}

// Same scheme with one independent stream per state component. Used by the
// multi-pool models so that a pool's marginal can be reproduced bit-exactly
// from its own stream.
template <class Drift, class Diffusion, class Stop>
SdeResult integrate_sde(Drift&& drift, Diffusion&& diffusion, std::vector<double> x0,
                        const TimeGrid& grid, std::span<RngStream> component_rngs, Stop&& stop) {
    if (component_rngs.size() != x0.size())
        throw std::invalid_argument("integrate_sde: one rng stream per component required");
    return detail::euler_maruyama(drift, diffusion, std::move(x0), grid, stop,
                                  [component_rngs](std::size_t c) { return component_rngs[c].gaussian(); });
}

// One-dimensional convenience overload; drift/diffusion take (x, t) scalars.
template <class Drift, class Diffusion, class Stop>
SdeResult integrate_sde_1d(Drift&& drift, Diffusion&& diffusion, double x0, const TimeGrid& grid,
                           RngStream& rng, Stop&& stop) {
    auto d = [&drift](const std::vector<double>& x, double t, std::vector<double>& out) {
        out[0] = drift(x[0], t);
    };
    auto s = [&diffusion](const std::vector<double>& x, double t, std::vector<double>& out) {
        out[0] = diffusion(x[0], t);
    };
    return integrate_sde(d, s, std::vector<double>{x0}, grid, rng, stop);
}

}  // namespace hitl
