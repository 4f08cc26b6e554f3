#include "collapse/state_space.hpp"

#include <cmath>
#include <string>

namespace collapse {

AmplitudeVector AmplitudeVector::from_modulus_phase(const Vec& moduli, const Vec& phases) {
    if (moduli.size() != phases.size())
        throw std::invalid_argument("amplitudes: moduli and phases must have equal length");
    if (moduli.size() < 2)
        throw std::invalid_argument("amplitudes: need at least two components");
    CVec c(moduli.size());
    for (Index i = 0; i < moduli.size(); ++i) {
        if (moduli[i] < 0.0)
            throw std::invalid_argument("amplitudes: moduli must be nonnegative");
        c[i] = std::polar(moduli[i], phases[i]);
    }
    return AmplitudeVector{std::move(c)};
}

BPoint::BPoint(Vec b) : b_(std::move(b)) {
    if (b_.size() < 2) throw std::invalid_argument("BPoint: dimension must be >= 2");
    if (b_.minCoeff() < 0.0) throw std::invalid_argument("BPoint: components must be nonnegative");
    const Scalar norm_err = std::abs(b_.squaredNorm() - 1.0);
    if (!(norm_err <= kUnitTolLoose))
        throw std::invalid_argument("BPoint: squared norm deviates from 1 by " +
                                    std::to_string(norm_err));
}

BPoint amplitudes_to_bpoint(const AmplitudeVector& c) {
    if (c.size() < 2) throw std::invalid_argument("amplitudes_to_bpoint: need N >= 2");
    const Scalar err = std::abs(c.squared_norm() - 1.0);
    if (!(err <= 1e-9))
        throw std::invalid_argument(
            "amplitudes_to_bpoint: squared moduli sum deviates from 1 by " + std::to_string(err));
    return BPoint(c.c.cwiseAbs());
}

BPoint project_to_sphere(const Eigen::Ref<const Vec>& v) {
    Vec b = v.cwiseAbs();
    const Scalar norm = b.norm();
    if (!(norm > 1e-12))
        throw integrator_blowup("project_to_sphere: vector norm " + std::to_string(norm));
    b /= norm;
    return BPoint::unchecked(std::move(b));
}

TangentVector tangent_project(const BPoint& b, const Eigen::Ref<const Vec>& v) {
    if (v.size() != b.size())
        throw std::invalid_argument("tangent_project: dimension mismatch");
    const Scalar radial = b.vec().dot(v);
    Vec t = v - radial * b.vec();
    return TangentVector{std::move(t), b};
}

BPoint vertex(Index n0, Index n) {
    if (n < 2) throw std::out_of_range("vertex: dimension must be >= 2");
    if (n0 < 0 || n0 >= n) throw std::out_of_range("vertex: index out of range");
    Vec b = Vec::Zero(n);
    b[n0] = 1.0;
    return BPoint::unchecked(std::move(b));
}

Vec bpoint_to_probabilities(const BPoint& b) {
    return b.vec().cwiseProduct(b.vec());
}

}  // namespace collapse
