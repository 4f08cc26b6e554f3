#pragma once

#include "collapse/stats.hpp"
#include "collapse/types.hpp"

#include <cstdint>
#include <vector>

namespace collapse {

struct GradCheckReport {
    std::uint64_t samples = 0;
    Scalar max_rel_error = 0.0;
    Scalar tolerance = 1e-6;
    bool pass() const { return max_rel_error <= tolerance; }
};

// Samples random (potential, b) pairs across the given dimensions and
// compares the analytic sphere gradient against projected central finite
// differences of f (h = 1e-5). The error is measured norm-wise relative to
// max(1, |finite-difference gradient|).
GradCheckReport gradcheck_run(const std::vector<Index>& dims, std::uint64_t samples,
                              std::uint64_t seed);

struct MartingaleCheckReport {
    struct DriftCheck {
        Vec p0;
        std::uint64_t samples = 0;
        Vec mean;        // per-coordinate one-step increment mean
        Vec std_error;   // standard error of the mean
        bool pass = false;
    };
    struct AbsorptionCheck {
        Vec p0;
        CollapseStats stats;
        Scalar clamped_fraction = 0.0;
        bool pass = false;  // p0_n inside the Wilson interval for every n
    };

    DriftCheck drift;
    std::vector<AbsorptionCheck> absorption;

    bool pass() const {
        if (!drift.pass) return false;
        for (const auto& a : absorption)
            if (!a.pass) return false;
        return true;
    }
};

// Oracle self-test: the one-step increment has zero mean within 3 standard
// errors, and absorption frequencies match p0 within per-coordinate Wilson
// intervals at `ci_level`.
MartingaleCheckReport martingale_check_run(const std::vector<Vec>& starts, Scalar h,
                                           Scalar sigma, Scalar collapse_eps, Scalar t_max,
                                           std::uint64_t drift_samples,
                                           std::uint64_t absorption_trials,
                                           std::uint64_t master_seed, Scalar ci_level,
                                           int threads);

}  // namespace collapse
