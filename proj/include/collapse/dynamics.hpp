#pragma once

#include "collapse/potentials.hpp"
#include "collapse/rng.hpp"
#include "collapse/state_space.hpp"
#include "collapse/types.hpp"

#include <optional>
#include <vector>

namespace collapse {

struct NoiseConfig {
    Scalar sigma0 = 0.0;  // one-shot tangent jitter applied to b(0)
    Scalar sigma = 1e-3;  // continuous tangent noise intensity
};

struct DynamicsConfig {
    explicit DynamicsConfig(Potential pot) : potential(std::move(pot)) {}

    Scalar h = 1e-3;
    Scalar t_max = 200.0;
    Scalar collapse_eps = 1e-6;
    Potential potential;
    TransverseFieldSpec transverse;
    NoiseConfig noise;

    Index dim() const { return potential.dim(); }
    void validate() const;
};

enum class OutcomeKind { collapsed, censored };

struct Outcome {
    OutcomeKind kind = OutcomeKind::censored;
    std::optional<Index> vertex_index;
    std::optional<Scalar> collapse_time;

    static Outcome collapsed_at(Index v, Scalar t) {
        return Outcome{OutcomeKind::collapsed, v, t};
    }
    static Outcome censored() { return Outcome{}; }
    bool collapsed() const { return kind == OutcomeKind::collapsed; }
};

struct Trajectory {
    std::vector<Scalar> times;
    std::vector<BPoint> points;
    std::vector<Scalar> f_values;
    Outcome outcome;
};

struct DescentReport {
    bool pass = true;
    Scalar worst_violation = 0.0;  // max of f[k+1] - f[k] over the run
    std::size_t worst_step = 0;
};

// -grad_S+ f + w; tangent to the sphere at b.
TangentVector drift(const DynamicsConfig& cfg, const BPoint& b);

// Classical 4-stage Runge-Kutta step of size h on the drift, then
// projection retraction back onto S+.
BPoint step_deterministic(const DynamicsConfig& cfg, const BPoint& b);

// Euler-Maruyama: b + h*drift + sqrt(h)*sigma*xi_T with xi_T a
// tangent-projected standard normal vector, then projection retraction.
BPoint step_stochastic(const DynamicsConfig& cfg, const BPoint& b, TrialRng& rng);

// b0 + sigma0*xi_T, then projection retraction. sigma0 = 0 returns b0
// unchanged and consumes no draws.
BPoint jitter_initial(const BPoint& b0, Scalar sigma0, TrialRng& rng);

// Applies jitter_initial once, then steps (stochastic iff sigma > 0) until
// max_n b_n >= 1 - collapse_eps or t exceeds t_max. With record = false only
// the endpoints are retained. Integrator blow-up propagates as
// integrator_blowup.
Trajectory run_trajectory(const DynamicsConfig& cfg, const BPoint& b0, TrialRng& rng,
                          bool record);

// Monotone-descent audit for zero-noise runs: f[k+1] <= f[k] + tol.
DescentReport descent_check(const Trajectory& traj, Scalar tol = 1e-10);

}  // namespace collapse
