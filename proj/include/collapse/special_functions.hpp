#pragma once

#include "collapse/types.hpp"

namespace collapse {

// Inverse standard normal CDF (Wichura's AS241, double precision).
Scalar normal_quantile(Scalar p);

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x),
// evaluated by the power series for x < a + 1 and by the Lentz continued
// fraction otherwise.
Scalar regularized_gamma_lower(Scalar a, Scalar x);
Scalar regularized_gamma_upper(Scalar a, Scalar x);

// Upper-tail probability of the chi-square distribution with dof degrees
// of freedom.
Scalar chi_square_sf(Scalar x, int dof);

}  // namespace collapse
