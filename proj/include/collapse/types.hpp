#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstdint>

namespace collapse {

using Scalar = double;
using Vec = Eigen::VectorX<Scalar>;
using CVec = Eigen::VectorX<std::complex<Scalar>>;
using Index = Eigen::Index;

inline constexpr const char* kVersion = "0.1.0";

// Tolerance for freshly constructed / just-renormalized unit vectors.
inline constexpr Scalar kUnitTolStrict = 1e-12;
// Tolerance for unit vectors that have drifted through integration steps.
inline constexpr Scalar kUnitTolLoose = 1e-9;
// Tangency tolerance, relative to max(1, |v|).
inline constexpr Scalar kTangentTol = 1e-12;

}  // namespace collapse
