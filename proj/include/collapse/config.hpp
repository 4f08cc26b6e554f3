#pragma once

#include "collapse/dynamics.hpp"
#include "collapse/martingale.hpp"
#include "collapse/potentials.hpp"
#include "collapse/stats.hpp"
#include "collapse/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace collapse {

// Experiment configuration: the union of the dynamics, noise, potential and
// transverse settings, the model selector, one initial-state form, trial
// counts and seeds. Loaded from a flat key-value file (TOML-compatible
// subset: strings, numbers, arrays, one table level); every key can be
// overridden by a --section.key=value flag, and flags win.
struct RunConfig {
    // [run]
    Model model = Model::gradient_flow;
    std::uint64_t trials = 1000;
    std::uint64_t seed = 0;
    Scalar ci_level = 0.99;

    // [dynamics]
    Scalar h = 1e-3;
    Scalar t_max = 200.0;
    Scalar collapse_eps = 1e-6;

    // [noise]
    Scalar sigma0 = 0.0;
    Scalar sigma = 1e-3;

    // [potential]
    PotentialFamily family = PotentialFamily::quartic_vertex_well;
    std::optional<Vec> weights;

    // [transverse]
    TransverseKind transverse_kind = TransverseKind::none;
    Index axis_i = 0;
    Index axis_j = 1;
    Scalar strength = 1.0;

    // [init] — at most one form
    std::optional<Vec> moduli;
    std::optional<Vec> phases;
    std::optional<Vec> bpoint;
    std::optional<Vec> simplex;

    // [scan]
    std::vector<Scalar> grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::uint64_t trials_per_point = 10000;

    // [gradcheck]
    std::uint64_t gradcheck_samples = 1000;
    std::vector<Index> gradcheck_dims = {2, 3, 5};

    bool has_init() const { return moduli || bpoint || simplex; }

    // Dimension implied by the initial state, or by the weights when no
    // initial state is given.
    Index dimension() const;

    AmplitudeVector initial_amplitudes() const;  // requires the amplitudes form
    BPoint initial_bpoint() const;               // from any form
    SimplexPoint initial_simplex() const;        // from any form

    Potential make_potential(Index n) const;
    DynamicsConfig make_dynamics(Index n) const;

    // Structural validation (exactly one init form, consistent lengths).
    void validate() const;
};

// Parses config text. Throws std::invalid_argument with a line reference on
// malformed input or unknown keys.
RunConfig parse_config_text(const std::string& text);

// Loads `path` (optional; empty means defaults) and applies
// "section.key=value" overrides, last one winning.
RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides);

std::string to_string(PotentialFamily family);
std::string to_string(TransverseKind kind);

}  // namespace collapse
