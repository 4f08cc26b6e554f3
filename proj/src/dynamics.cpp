#include "collapse/dynamics.hpp"

#include <cmath>
#include <string>

namespace collapse {

namespace {

void project_in_place(Vec& b) {
    b = b.cwiseAbs();
    const Scalar norm = b.norm();
    if (!(norm > 1e-12) || !std::isfinite(norm))
        throw integrator_blowup("integration step left the sphere (norm " +
                                std::to_string(norm) + ")");
    b /= norm;
}

struct StepWorkspace {
    Vec k1, k2, k3, k4, stage, grad, w, xi;

    explicit StepWorkspace(Index n)
        : k1(n), k2(n), k3(n), k4(n), stage(n), grad(n), w(n), xi(n) {}
};

// out = -grad_S+ f(b) + w(b). Valid slightly off-sphere, as needed by the
// intermediate Runge-Kutta stages.
void drift_into(const DynamicsConfig& cfg, const Vec& b, Vec& out, StepWorkspace& ws) {
    sphere_gradient_into(cfg.potential, b, ws.grad);
    if (cfg.transverse.kind == TransverseKind::none) {
        out = -ws.grad;
    } else {
        transverse_field_into(cfg.transverse, b, ws.grad, ws.w);
        out = ws.w - ws.grad;
    }
}

void deterministic_step_in_place(const DynamicsConfig& cfg, Vec& b, StepWorkspace& ws) {
    const Scalar h = cfg.h;
    drift_into(cfg, b, ws.k1, ws);
    ws.stage = b + (h / 2) * ws.k1;
    drift_into(cfg, ws.stage, ws.k2, ws);
    ws.stage = b + (h / 2) * ws.k2;
    drift_into(cfg, ws.stage, ws.k3, ws);
    ws.stage = b + h * ws.k3;
    drift_into(cfg, ws.stage, ws.k4, ws);
    b += (h / 6) * (ws.k1 + 2.0 * ws.k2 + 2.0 * ws.k3 + ws.k4);
    project_in_place(b);
}

void stochastic_step_in_place(const DynamicsConfig& cfg, Vec& b, TrialRng& rng,
                              StepWorkspace& ws) {
    drift_into(cfg, b, ws.k1, ws);
    for (Index i = 0; i < b.size(); ++i) ws.xi[i] = rng.normal();
    ws.xi.noalias() -= b.dot(ws.xi) * b;
    b += cfg.h * ws.k1 + std::sqrt(cfg.h) * cfg.noise.sigma * ws.xi;
    project_in_place(b);
}

void jitter_in_place(Vec& b, Scalar sigma0, TrialRng& rng, Vec& xi) {
    for (Index i = 0; i < b.size(); ++i) xi[i] = rng.normal();
    xi.noalias() -= b.dot(xi) * b;
    b += sigma0 * xi;
    project_in_place(b);
}

}  // namespace

void DynamicsConfig::validate() const {
    if (!(h > 0.0)) throw std::invalid_argument("dynamics: h must be > 0");
    if (!(t_max > 0.0)) throw std::invalid_argument("dynamics: t_max must be > 0");
    if (!(collapse_eps > 0.0 && collapse_eps < 0.5))
        throw std::invalid_argument("dynamics: collapse_eps must be in (0, 0.5)");
    if (!(noise.sigma0 >= 0.0 && noise.sigma >= 0.0))
        throw std::invalid_argument("dynamics: noise intensities must be >= 0");
    transverse.validate(dim());
}

TangentVector drift(const DynamicsConfig& cfg, const BPoint& b) {
    if (b.size() != cfg.dim()) throw std::invalid_argument("drift: dimension mismatch");
    StepWorkspace ws(b.size());
    Vec v(b.size());
    drift_into(cfg, b.vec(), v, ws);
    return TangentVector{std::move(v), b};
}

BPoint step_deterministic(const DynamicsConfig& cfg, const BPoint& b) {
    StepWorkspace ws(b.size());
    Vec x = b.vec();
    deterministic_step_in_place(cfg, x, ws);
    return BPoint::unchecked(std::move(x));
}

BPoint step_stochastic(const DynamicsConfig& cfg, const BPoint& b, TrialRng& rng) {
    StepWorkspace ws(b.size());
    Vec x = b.vec();
    stochastic_step_in_place(cfg, x, rng, ws);
    return BPoint::unchecked(std::move(x));
}

BPoint jitter_initial(const BPoint& b0, Scalar sigma0, TrialRng& rng) {
    if (sigma0 == 0.0) return b0;
    Vec x = b0.vec();
    Vec xi(x.size());
    jitter_in_place(x, sigma0, rng, xi);
    return BPoint::unchecked(std::move(x));
}

Trajectory run_trajectory(const DynamicsConfig& cfg, const BPoint& b0, TrialRng& rng,
                          bool record) {
    const Index n = b0.size();
    if (n != cfg.dim()) throw std::invalid_argument("run_trajectory: dimension mismatch");

    StepWorkspace ws(n);
    Vec b = b0.vec();
    if (cfg.noise.sigma0 > 0.0) jitter_in_place(b, cfg.noise.sigma0, rng, ws.xi);

    const bool stochastic = cfg.noise.sigma > 0.0;
    const std::uint64_t max_steps =
        static_cast<std::uint64_t>(std::floor(cfg.t_max / cfg.h + 1e-9));
    const Scalar threshold = 1.0 - cfg.collapse_eps;

    Trajectory traj;
    auto record_state = [&](Scalar t) {
        traj.times.push_back(t);
        traj.points.push_back(BPoint::unchecked(b));
        traj.f_values.push_back(f_value(cfg.potential, b));
    };

    std::uint64_t k = 0;
    for (;;) {
        const Scalar t = static_cast<Scalar>(k) * cfg.h;
        const bool recorded = record || k == 0;
        if (recorded) record_state(t);

        Index argmax = 0;
        const Scalar bmax = b.maxCoeff(&argmax);
        if (bmax >= threshold) {
            if (!recorded) record_state(t);
            traj.outcome = Outcome::collapsed_at(argmax, t);
            return traj;
        }
        if (k >= max_steps) {
            if (!recorded) record_state(t);
            traj.outcome = Outcome::censored();
            return traj;
        }

        if (stochastic)
            stochastic_step_in_place(cfg, b, rng, ws);
        else
            deterministic_step_in_place(cfg, b, ws);
        ++k;
    }
}

DescentReport descent_check(const Trajectory& traj, Scalar tol) {
    DescentReport report;
    for (std::size_t k = 0; k + 1 < traj.f_values.size(); ++k) {
        const Scalar rise = traj.f_values[k + 1] - traj.f_values[k];
        if (rise > report.worst_violation) {
            report.worst_violation = rise;
            report.worst_step = k;
        }
    }
    report.pass = report.worst_violation <= tol;
    return report;
}

}  // namespace collapse
