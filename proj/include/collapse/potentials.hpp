#pragma once

#include "collapse/state_space.hpp"
#include "collapse/types.hpp"

namespace collapse {

enum class PotentialFamily { quartic_vertex_well, weighted_quartic };

// f(b) = 1 - sum_n w_n b_n^4. Even in every coordinate, minima on S+
// exactly at the vertices, maximal at the symmetric point for uniform
// weights. quartic_vertex_well fixes w_n = 1; weighted_quartic takes
// arbitrary positive weights, clamped to [1e-3, 1e3].
class Potential {
public:
    static Potential quartic_vertex_well(Index n);
    static Potential weighted_quartic(Vec weights);

    PotentialFamily family() const { return family_; }
    const Vec& weights() const { return weights_; }
    Index dim() const { return weights_.size(); }

private:
    Potential(PotentialFamily family, Vec weights)
        : family_(family), weights_(std::move(weights)) {}

    PotentialFamily family_;
    Vec weights_;
};

enum class TransverseKind { none, tangent_rotation };

// Tangent field w with w . grad_S+ f = 0. tangent_rotation starts from the
// rotation generator in the (axis_i, axis_j) plane and orthogonalizes
// against both the radial direction and the sphere gradient.
struct TransverseFieldSpec {
    TransverseKind kind = TransverseKind::none;
    Index axis_i = 0;
    Index axis_j = 1;
    Scalar strength = 0.0;

    static TransverseFieldSpec none_field() { return {}; }
    static TransverseFieldSpec tangent_rotation(Index i, Index j, Scalar strength);

    void validate(Index n) const;
};

// The scalar field and its gradients accept raw vectors (Eigen::Ref), not
// just BPoints: the formulas extend smoothly off the sphere and the
// integrators evaluate them at intermediate Runge-Kutta stages that are
// only approximately unit.
Scalar f_value(const Potential& p, const Eigen::Ref<const Vec>& b);

Vec euclid_gradient(const Potential& p, const Eigen::Ref<const Vec>& b);

// Allocation-free kernels for the integrator hot loops.
void euclid_gradient_into(const Potential& p, const Eigen::Ref<const Vec>& b, Vec& out);
void sphere_gradient_into(const Potential& p, const Eigen::Ref<const Vec>& b, Vec& out);
void transverse_field_into(const TransverseFieldSpec& spec, const Eigen::Ref<const Vec>& b,
                           const Vec& sphere_grad, Vec& out);

TangentVector sphere_gradient(const Potential& p, const BPoint& b);
TangentVector transverse_field(const Potential& p, const TransverseFieldSpec& spec,
                               const BPoint& b);

}  // namespace collapse
