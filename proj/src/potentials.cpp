#include "collapse/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace collapse {

namespace {
constexpr Scalar kWeightMin = 1e-3;
constexpr Scalar kWeightMax = 1e3;
}  // namespace

Potential Potential::quartic_vertex_well(Index n) {
    if (n < 2) throw std::invalid_argument("Potential: dimension must be >= 2");
    return Potential(PotentialFamily::quartic_vertex_well, Vec::Ones(n));
}

Potential Potential::weighted_quartic(Vec weights) {
    if (weights.size() < 2) throw std::invalid_argument("Potential: dimension must be >= 2");
    if (weights.minCoeff() <= 0.0)
        throw std::invalid_argument("Potential: weights must be strictly positive");
    for (Index i = 0; i < weights.size(); ++i)
        weights[i] = std::clamp(weights[i], kWeightMin, kWeightMax);
    return Potential(PotentialFamily::weighted_quartic, std::move(weights));
}

TransverseFieldSpec TransverseFieldSpec::tangent_rotation(Index i, Index j, Scalar strength) {
    TransverseFieldSpec spec;
    spec.kind = TransverseKind::tangent_rotation;
    spec.axis_i = i;
    spec.axis_j = j;
    spec.strength = strength;
    if (i == j) throw std::invalid_argument("TransverseFieldSpec: axis indices must differ");
    return spec;
}

void TransverseFieldSpec::validate(Index n) const {
    if (kind == TransverseKind::none) return;
    if (axis_i == axis_j) throw std::invalid_argument("TransverseFieldSpec: axis indices must differ");
    if (axis_i < 0 || axis_j < 0 || axis_i >= n || axis_j >= n)
        throw std::invalid_argument("TransverseFieldSpec: axis index out of range");
}

Scalar f_value(const Potential& p, const Eigen::Ref<const Vec>& b) {
    const Vec& w = p.weights();
    Scalar sum = 0.0;
    for (Index i = 0; i < b.size(); ++i) {
        const Scalar b2 = b[i] * b[i];
        sum += w[i] * b2 * b2;
    }
    return 1.0 - sum;
}

void euclid_gradient_into(const Potential& p, const Eigen::Ref<const Vec>& b, Vec& out) {
    const Vec& w = p.weights();
    out.resize(b.size());
    for (Index i = 0; i < b.size(); ++i) out[i] = -4.0 * w[i] * b[i] * b[i] * b[i];
}

Vec euclid_gradient(const Potential& p, const Eigen::Ref<const Vec>& b) {
    Vec g;
    euclid_gradient_into(p, b, g);
    return g;
}

void sphere_gradient_into(const Potential& p, const Eigen::Ref<const Vec>& b, Vec& out) {
    euclid_gradient_into(p, b, out);
    const Scalar radial = b.dot(out);
    out.noalias() -= radial * b;
}

void transverse_field_into(const TransverseFieldSpec& spec, const Eigen::Ref<const Vec>& b,
                           const Vec& sphere_grad, Vec& out) {
    out.setZero(b.size());
    if (spec.kind == TransverseKind::none || spec.strength == 0.0) return;

    // Rotation generator in the (i, j) plane.
    out[spec.axis_i] = -spec.strength * b[spec.axis_j];
    out[spec.axis_j] = spec.strength * b[spec.axis_i];

    // Orthogonalize against the radial direction, then against the sphere
    // gradient, so both b.w = 0 and w.grad f = 0 hold.
    out.noalias() -= b.dot(out) * b;
    const Scalar g2 = sphere_grad.squaredNorm();
    if (g2 > std::numeric_limits<Scalar>::min())
        out.noalias() -= (out.dot(sphere_grad) / g2) * sphere_grad;
}

TangentVector sphere_gradient(const Potential& p, const BPoint& b) {
    if (p.dim() != b.size()) throw std::invalid_argument("sphere_gradient: dimension mismatch");
    Vec g;
    sphere_gradient_into(p, b.vec(), g);
    return TangentVector{std::move(g), b};
}

TangentVector transverse_field(const Potential& p, const TransverseFieldSpec& spec,
                               const BPoint& b) {
    if (p.dim() != b.size()) throw std::invalid_argument("transverse_field: dimension mismatch");
    spec.validate(b.size());
    Vec g;
    sphere_gradient_into(p, b.vec(), g);
    Vec w;
    transverse_field_into(spec, b.vec(), g, w);
    return TangentVector{std::move(w), b};
}

}  // namespace collapse
