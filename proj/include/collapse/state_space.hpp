#pragma once

#include "collapse/types.hpp"

#include <stdexcept>
#include <utility>

namespace collapse {

// Thrown when an integration step produces a state that cannot be retracted
// back onto the sphere (zero or non-finite norm). The offending run must be
// aborted and reported, never folded into censoring.
struct integrator_blowup : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Complex coefficient vector of the microscopic state, unit total squared
// modulus.
struct AmplitudeVector {
    CVec c;

    Index size() const { return c.size(); }
    Scalar squared_norm() const { return c.squaredNorm(); }

    static AmplitudeVector from_modulus_phase(const Vec& moduli, const Vec& phases);
};

// Point on the positive part of the unit sphere: |b| = 1, b_n >= 0.
// Immutable value; construct through the factory functions below or the
// validating constructor.
class BPoint {
public:
    // Validates the invariants at the loose (post-integration) tolerance.
    explicit BPoint(Vec b);

    const Vec& vec() const { return b_; }
    Index size() const { return b_.size(); }
    Scalar operator[](Index i) const { return b_[i]; }

    // For values that are on the sphere by construction; skips validation.
    static BPoint unchecked(Vec b) { return BPoint(std::move(b), unchecked_tag{}); }

private:
    struct unchecked_tag {};
    BPoint(Vec b, unchecked_tag) : b_(std::move(b)) {}

    Vec b_;
};

// Tangent vector at a base point: base . v = 0.
struct TangentVector {
    Vec v;
    BPoint base;
};

// b_n = |c_n|. Rejects coefficient vectors whose squared moduli do not sum
// to 1 within 1e-9 (malformed input state).
BPoint amplitudes_to_bpoint(const AmplitudeVector& c);

// Component-wise absolute value, then normalize. Throws integrator_blowup
// for zero or non-finite norm. The reflection is exact for the built-in
// potentials, which are even in every coordinate.
BPoint project_to_sphere(const Eigen::Ref<const Vec>& v);

// v - (b.v) b.
TangentVector tangent_project(const BPoint& b, const Eigen::Ref<const Vec>& v);

// Basis point e_{n0} of S+, the collapse target for outcome n0.
BPoint vertex(Index n0, Index n);

// p_n = b_n^2.
Vec bpoint_to_probabilities(const BPoint& b);

}  // namespace collapse
