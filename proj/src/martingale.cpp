#include "collapse/martingale.hpp"

#include <cmath>
#include <string>

namespace collapse {

namespace {

// In-place step on the raw coordinate buffer. Returns whether any
// component was clamped at 0.
inline bool step_kernel(Scalar* p, Scalar* xi, Index n, Scalar coef, TrialRng& rng) {
    for (Index i = 0; i < n; ++i) xi[i] = rng.normal();
    Scalar mix = 0.0;
    for (Index i = 0; i < n; ++i) mix += p[i] * xi[i];
    bool clamped = false;
    Scalar sum = 0.0;
    for (Index i = 0; i < n; ++i) {
        Scalar v = p[i] + coef * p[i] * (xi[i] - mix);
        if (v < 0.0) {
            v = 0.0;
            clamped = true;
        }
        p[i] = v;
        sum += v;
    }
    if (!(sum > 0.0) || !std::isfinite(sum))
        throw integrator_blowup("martingale step left the simplex (sum " +
                                std::to_string(sum) + ")");
    const Scalar inv = 1.0 / sum;
    for (Index i = 0; i < n; ++i) p[i] *= inv;
    return clamped;
}

}  // namespace

SimplexPoint::SimplexPoint(Vec p) : p_(std::move(p)) {
    if (p_.size() < 2) throw std::invalid_argument("SimplexPoint: dimension must be >= 2");
    if (p_.minCoeff() < 0.0)
        throw std::invalid_argument("SimplexPoint: components must be nonnegative");
    const Scalar err = std::abs(p_.sum() - 1.0);
    if (!(err <= kUnitTolStrict))
        throw std::invalid_argument("SimplexPoint: coordinates sum deviates from 1 by " +
                                    std::to_string(err));
}

SimplexPoint martingale_step(const SimplexPoint& p, Scalar h, Scalar sigma, TrialRng& rng,
                             bool* clamped) {
    if (!(h > 0.0) || !(sigma > 0.0))
        throw std::invalid_argument("martingale_step: h and sigma must be > 0");
    Vec q = p.vec();
    Vec xi(q.size());
    const bool c = step_kernel(q.data(), xi.data(), q.size(), std::sqrt(h) * sigma, rng);
    if (clamped) *clamped = c;
    return SimplexPoint::unchecked(std::move(q));
}

MartingaleResult run_martingale(const SimplexPoint& p0, Scalar h, Scalar sigma,
                                Scalar collapse_eps, Scalar t_max, TrialRng& rng) {
    if (!(h > 0.0) || !(sigma > 0.0))
        throw std::invalid_argument("run_martingale: h and sigma must be > 0");
    if (!(collapse_eps > 0.0 && collapse_eps < 0.5))
        throw std::invalid_argument("run_martingale: collapse_eps must be in (0, 0.5)");

    const Index n = p0.size();
    Vec p = p0.vec();
    Vec xi(n);
    const Scalar coef = std::sqrt(h) * sigma;
    const Scalar threshold = 1.0 - collapse_eps;
    const std::uint64_t max_steps = static_cast<std::uint64_t>(std::floor(t_max / h + 1e-9));

    MartingaleResult result;
    std::uint64_t k = 0;
    for (;;) {
        Index argmax = 0;
        const Scalar pmax = p.maxCoeff(&argmax);
        if (pmax >= threshold) {
            result.outcome = Outcome::collapsed_at(argmax, static_cast<Scalar>(k) * h);
            return result;
        }
        if (k >= max_steps) {
            result.outcome = Outcome::censored();
            return result;
        }
        if (step_kernel(p.data(), xi.data(), n, coef, rng)) ++result.clamped_steps;
        ++result.steps;
        ++k;
    }
}

}  // namespace collapse
