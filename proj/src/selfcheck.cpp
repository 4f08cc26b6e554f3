#include "collapse/selfcheck.hpp"

#include "collapse/martingale.hpp"
#include "collapse/potentials.hpp"
#include "collapse/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace collapse {

GradCheckReport gradcheck_run(const std::vector<Index>& dims, std::uint64_t samples,
                              std::uint64_t seed) {
    if (dims.empty()) throw std::invalid_argument("gradcheck: no dimensions given");
    for (Index n : dims)
        if (n < 2) throw std::invalid_argument("gradcheck: dimensions must be >= 2");

    constexpr Scalar fd_h = 1e-5;
    GradCheckReport report;
    report.samples = samples;

    for (std::uint64_t k = 0; k < samples; ++k) {
        TrialRng rng(seed, k);
        const Index n = dims[k % dims.size()];

        // Random weights, log-uniform over [0.1, 10].
        Vec w(n);
        for (Index i = 0; i < n; ++i) w[i] = std::pow(10.0, 2.0 * rng.uniform01() - 1.0);
        const Potential pot = Potential::weighted_quartic(w);

        Vec raw(n);
        for (Index i = 0; i < n; ++i) raw[i] = rng.normal();
        const BPoint b = project_to_sphere(raw);

        // Central differences of f along the ambient axes, projected onto
        // the tangent space. Independent of the analytic gradient path.
        Vec fd(n);
        Vec probe = b.vec();
        for (Index i = 0; i < n; ++i) {
            const Scalar saved = probe[i];
            probe[i] = saved + fd_h;
            const Scalar fp = f_value(pot, probe);
            probe[i] = saved - fd_h;
            const Scalar fm = f_value(pot, probe);
            probe[i] = saved;
            fd[i] = (fp - fm) / (2.0 * fd_h);
        }
        fd -= b.vec().dot(fd) * b.vec();

        const Vec analytic = sphere_gradient(pot, b).v;
        const Scalar err = (analytic - fd).cwiseAbs().maxCoeff() /
                           std::max(1.0, fd.cwiseAbs().maxCoeff());
        if (err > report.max_rel_error) report.max_rel_error = err;
    }
    return report;
}

MartingaleCheckReport martingale_check_run(const std::vector<Vec>& starts, Scalar h,
                                           Scalar sigma, Scalar collapse_eps, Scalar t_max,
                                           std::uint64_t drift_samples,
                                           std::uint64_t absorption_trials,
                                           std::uint64_t master_seed, Scalar ci_level,
                                           int threads) {
    if (starts.empty()) throw std::invalid_argument("martingale_check: no start points");
    MartingaleCheckReport report;

    // One-step drift estimate at the first start point.
    {
        const SimplexPoint p0{starts.front()};
        const Index n = p0.size();
        TrialRng rng(master_seed, 0);
        Vec sum = Vec::Zero(n);
        Vec sum_sq = Vec::Zero(n);
        for (std::uint64_t k = 0; k < drift_samples; ++k) {
            const SimplexPoint p1 = martingale_step(p0, h, sigma, rng);
            const Vec d = p1.vec() - p0.vec();
            sum += d;
            sum_sq += d.cwiseProduct(d);
        }
        const Scalar m = static_cast<Scalar>(drift_samples);
        report.drift.p0 = p0.vec();
        report.drift.samples = drift_samples;
        report.drift.mean = sum / m;
        Vec var = sum_sq / m - report.drift.mean.cwiseProduct(report.drift.mean);
        report.drift.std_error = (var.cwiseMax(0.0) / m).cwiseSqrt();
        report.drift.pass = true;
        for (Index i = 0; i < n; ++i)
            if (std::abs(report.drift.mean[i]) > 3.0 * report.drift.std_error[i])
                report.drift.pass = false;
    }

    // Absorption frequencies against p0, one ensemble per start point.
    for (std::size_t s = 0; s < starts.size(); ++s) {
        const SimplexPoint p0{starts[s]};
        DynamicsConfig cfg(Potential::quartic_vertex_well(p0.size()));
        cfg.h = h;
        cfg.t_max = t_max;
        cfg.collapse_eps = collapse_eps;
        cfg.noise.sigma = sigma;

        EnsembleResult er = run_ensemble(Model::martingale, cfg, p0, absorption_trials,
                                         derive_seed(master_seed, 1 + s), ci_level, threads);
        MartingaleCheckReport::AbsorptionCheck check;
        check.p0 = p0.vec();
        check.stats = std::move(er.stats);
        check.clamped_fraction =
            er.total_steps > 0
                ? static_cast<Scalar>(er.clamped_steps) / static_cast<Scalar>(er.total_steps)
                : 0.0;
        check.pass = check.stats.completed() == check.stats.trials;
        for (Index i = 0; i < p0.size() && check.pass; ++i)
            if (p0[i] < check.stats.ci_low[i] || p0[i] > check.stats.ci_high[i])
                check.pass = false;
        report.absorption.push_back(std::move(check));
    }
    return report;
}

}  // namespace collapse
