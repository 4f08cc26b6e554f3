#pragma once

#include "collapse/dynamics.hpp"
#include "collapse/martingale.hpp"
#include "collapse/state_space.hpp"
#include "collapse/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace collapse {

enum class Model { gradient_flow, martingale };

std::string to_string(Model model);
Model model_from_string(const std::string& name);

// Collapse-frequency estimate for one ensemble. Frequencies and intervals
// are computed over completed (non-censored, non-failed) trials; censored
// and failed counts are always reported alongside.
struct CollapseStats {
    std::uint64_t trials = 0;
    std::vector<std::uint64_t> counts;
    std::uint64_t censored = 0;
    std::uint64_t failed = 0;
    Vec frequencies;
    Vec ci_low;
    Vec ci_high;
    Vec born;
    Scalar ci_level = 0.99;
    Scalar chi_square = 0.0;
    int chi_square_dof = 0;
    Scalar p_value = 1.0;
    // Set when censored trials exceed 1% and the chi-square comparison
    // should not be taken at face value.
    bool chi_square_flagged = false;

    std::uint64_t completed() const { return trials - censored - failed; }
};

struct EnsembleResult {
    CollapseStats stats;
    std::uint64_t total_steps = 0;
    std::uint64_t clamped_steps = 0;  // martingale model only
};

// Born probabilities p_n = |c_n|^2 of the initial state.
Vec born_reference(const AmplitudeVector& c);

// Wilson score interval for a binomial proportion, clamped to [0, 1].
std::pair<Scalar, Scalar> wilson_interval(std::uint64_t successes, std::uint64_t n,
                                          Scalar level);

struct ChiSquareResult {
    Scalar statistic = 0.0;
    int dof = 0;
    Scalar p_value = 1.0;
};

// Pearson goodness-of-fit against a fixed expected distribution. Cells with
// expected count below 5 are merged into a single pooled cell; a pooled cell
// with zero expected mass is folded into the smallest positive-expectation
// cell so the statistic stays finite.
ChiSquareResult chi_square_gof(const std::vector<std::uint64_t>& counts, const Vec& expected_p);

// Worker-count resolution: the COLLAPSE_LAB_THREADS environment variable
// overrides `requested`; 0 means auto (hardware concurrency).
int resolve_thread_count(int requested);

using EnsembleInit = std::variant<BPoint, SimplexPoint>;

// Runs `trials` independent trials with per-trial RNG streams derived from
// (master_seed, trial index) and aggregates the outcome counts. Results are
// identical for any worker count. Integrator blow-ups are counted as failed
// trials, never hidden.
EnsembleResult run_ensemble(Model model, const DynamicsConfig& cfg, const EnsembleInit& init,
                            std::uint64_t trials, std::uint64_t master_seed,
                            Scalar ci_level = 0.99, int threads = 0);

struct LinearFit {
    Scalar slope = 0.0;
    Scalar intercept = 0.0;
    Scalar max_abs_residual = 0.0;
};

struct ScanResult {
    std::vector<Scalar> grid;              // x = b_1^2(0) values
    std::vector<CollapseStats> per_x;
    std::vector<std::size_t> partner;      // index of 1-x for each grid point
    std::vector<Scalar> symmetry_residuals;  // |P1(x) + P1(1-x) - 1|
    std::vector<Scalar> residual_bounds;     // joint CI half-widths
    LinearFit fit;                           // P1(x) against x
};

// Two-level scan over initial conditions x = b_1^2(0). The grid must lie in
// (0, 1) and be closed under x -> 1 - x. Each grid point runs an ensemble
// from (sqrt(x), sqrt(1-x)) (or (x, 1-x) for the martingale model) with its
// own seed derived from (master_seed, point index).
ScanResult symmetry_scan(Model model, const DynamicsConfig& cfg, const std::vector<Scalar>& grid,
                         std::uint64_t trials_per_x, std::uint64_t master_seed,
                         Scalar ci_level = 0.99, int threads = 0);

}  // namespace collapse
