#include "collapse/stats.hpp"

#include "collapse/special_functions.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <thread>

namespace collapse {

std::string to_string(Model model) {
    return model == Model::gradient_flow ? "gradient_flow" : "martingale";
}

Model model_from_string(const std::string& name) {
    if (name == "gradient_flow") return Model::gradient_flow;
    if (name == "martingale") return Model::martingale;
    throw std::invalid_argument("unknown model '" + name +
                                "' (expected gradient_flow or martingale)");
}

Vec born_reference(const AmplitudeVector& c) {
    if (c.size() < 2) throw std::invalid_argument("born_reference: need N >= 2");
    const Scalar err = std::abs(c.squared_norm() - 1.0);
    if (!(err <= 1e-9))
        throw std::invalid_argument("born_reference: state is not normalized");
    return c.c.cwiseAbs2();
}

std::pair<Scalar, Scalar> wilson_interval(std::uint64_t successes, std::uint64_t n,
                                          Scalar level) {
    if (n < 1) throw std::invalid_argument("wilson_interval: n must be >= 1");
    if (successes > n) throw std::invalid_argument("wilson_interval: successes > n");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("wilson_interval: level must be in (0, 1)");

    const Scalar z = normal_quantile(1.0 - (1.0 - level) / 2.0);
    const Scalar nn = static_cast<Scalar>(n);
    const Scalar phat = static_cast<Scalar>(successes) / nn;
    const Scalar z2 = z * z;
    const Scalar denom = 1.0 + z2 / nn;
    const Scalar center = (phat + z2 / (2.0 * nn)) / denom;
    const Scalar half =
        z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
    return {std::clamp(center - half, 0.0, 1.0), std::clamp(center + half, 0.0, 1.0)};
}

ChiSquareResult chi_square_gof(const std::vector<std::uint64_t>& counts, const Vec& expected_p) {
    if (static_cast<Index>(counts.size()) != expected_p.size())
        throw std::invalid_argument("chi_square_gof: size mismatch");
    const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    if (total == 0) throw std::invalid_argument("chi_square_gof: all counts are zero");

    struct Cell {
        Scalar observed;
        Scalar expected;
    };
    const Scalar m = static_cast<Scalar>(total);
    std::vector<Cell> cells;
    Cell pooled{0.0, 0.0};
    bool has_pooled = false;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const Scalar e = expected_p[static_cast<Index>(i)] * m;
        const Scalar o = static_cast<Scalar>(counts[i]);
        if (e < 5.0) {
            pooled.observed += o;
            pooled.expected += e;
            has_pooled = true;
        } else {
            cells.push_back({o, e});
        }
    }
    if (has_pooled) {
        if (pooled.expected > 0.0) {
            cells.push_back(pooled);
        } else if (pooled.observed > 0.0) {
            // Counts landed in cells the reference assigns zero mass; fold
            // them into the smallest positive-expectation cell.
            if (cells.empty())
                throw std::invalid_argument(
                    "chi_square_gof: expected distribution has no mass on observed cells");
            auto smallest = std::min_element(
                cells.begin(), cells.end(),
                [](const Cell& a, const Cell& b) { return a.expected < b.expected; });
            smallest->observed += pooled.observed;
        }
    }

    ChiSquareResult result;
    for (const Cell& cell : cells) {
        const Scalar d = cell.observed - cell.expected;
        result.statistic += d * d / cell.expected;
    }
    result.dof = static_cast<int>(cells.size()) - 1;
    result.p_value = result.dof >= 1 ? chi_square_sf(result.statistic, result.dof) : 1.0;
    return result;
}

int resolve_thread_count(int requested) {
    long value = requested;
    if (const char* env = std::getenv("COLLAPSE_LAB_THREADS"); env && *env)
        value = std::strtol(env, nullptr, 10);
    if (value <= 0) value = static_cast<long>(std::thread::hardware_concurrency());
    if (value < 1) value = 1;
    return static_cast<int>(value);
}

namespace {

struct TrialRecord {
    std::int8_t kind = 0;  // 0 collapsed, 1 censored, 2 failed
    Index vertex = -1;
    std::uint64_t steps = 0;
    std::uint64_t clamped = 0;
};

SimplexPoint simplex_from(const EnsembleInit& init) {
    if (std::holds_alternative<SimplexPoint>(init)) return std::get<SimplexPoint>(init);
    Vec p = bpoint_to_probabilities(std::get<BPoint>(init));
    p /= p.sum();
    return SimplexPoint::unchecked(std::move(p));
}

BPoint bpoint_from(const EnsembleInit& init) {
    if (std::holds_alternative<BPoint>(init)) return std::get<BPoint>(init);
    return project_to_sphere(std::get<SimplexPoint>(init).vec().cwiseSqrt());
}

Vec born_from(const EnsembleInit& init) {
    if (std::holds_alternative<SimplexPoint>(init)) return std::get<SimplexPoint>(init).vec();
    return bpoint_to_probabilities(std::get<BPoint>(init));
}

}  // namespace

EnsembleResult run_ensemble(Model model, const DynamicsConfig& cfg, const EnsembleInit& init,
                            std::uint64_t trials, std::uint64_t master_seed, Scalar ci_level,
                            int threads) {
    if (trials < 1) throw std::invalid_argument("run_ensemble: trials must be >= 1");
    if (!(ci_level > 0.0 && ci_level < 1.0))
        throw std::invalid_argument("run_ensemble: ci_level must be in (0, 1)");
    cfg.validate();
    if (model == Model::gradient_flow && cfg.noise.sigma == 0.0 && cfg.noise.sigma0 == 0.0)
        throw std::invalid_argument(
            "run_ensemble: gradient_flow ensembles need sigma or sigma0 > 0 "
            "(all trials would be identical)");

    const Index n = cfg.dim();
    std::optional<BPoint> b0;
    std::optional<SimplexPoint> p0;
    if (model == Model::gradient_flow)
        b0 = bpoint_from(init);
    else
        p0 = simplex_from(init);
    if ((b0 && b0->size() != n) || (p0 && p0->size() != n))
        throw std::invalid_argument("run_ensemble: initial state dimension mismatch");

    std::vector<TrialRecord> records(trials);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto run_one = [&](std::uint64_t trial) {
        TrialRng rng(master_seed, trial);
        TrialRecord rec;
        try {
            Outcome outcome;
            if (model == Model::martingale) {
                MartingaleResult r = run_martingale(*p0, cfg.h, cfg.noise.sigma,
                                                    cfg.collapse_eps, cfg.t_max, rng);
                outcome = r.outcome;
                rec.steps = r.steps;
                rec.clamped = r.clamped_steps;
            } else {
                Trajectory traj = run_trajectory(cfg, *b0, rng, /*record=*/false);
                outcome = traj.outcome;
            }
            if (outcome.collapsed()) {
                rec.kind = 0;
                rec.vertex = *outcome.vertex_index;
            } else {
                rec.kind = 1;
            }
        } catch (const integrator_blowup&) {
            rec.kind = 2;
        }
        records[trial] = rec;
    };

    auto worker = [&] {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= trials) return;
            try {
                run_one(i);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const int worker_count =
        static_cast<int>(std::min<std::uint64_t>(resolve_thread_count(threads), trials));
    if (worker_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(worker_count);
        for (int i = 0; i < worker_count; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    EnsembleResult result;
    CollapseStats& stats = result.stats;
    stats.trials = trials;
    stats.ci_level = ci_level;
    stats.counts.assign(n, 0);
    for (const TrialRecord& rec : records) {
        switch (rec.kind) {
            case 0: ++stats.counts[static_cast<std::size_t>(rec.vertex)]; break;
            case 1: ++stats.censored; break;
            default: ++stats.failed; break;
        }
        result.total_steps += rec.steps;
        result.clamped_steps += rec.clamped;
    }

    stats.born = born_from(init);
    stats.frequencies = Vec::Zero(n);
    stats.ci_low = Vec::Zero(n);
    stats.ci_high = Vec::Ones(n);
    const std::uint64_t completed = stats.completed();
    if (completed > 0) {
        for (Index i = 0; i < n; ++i) {
            const std::uint64_t c = stats.counts[static_cast<std::size_t>(i)];
            stats.frequencies[i] = static_cast<Scalar>(c) / static_cast<Scalar>(completed);
            std::tie(stats.ci_low[i], stats.ci_high[i]) = wilson_interval(c, completed, ci_level);
        }
        const ChiSquareResult chi = chi_square_gof(stats.counts, stats.born);
        stats.chi_square = chi.statistic;
        stats.chi_square_dof = chi.dof;
        stats.p_value = chi.p_value;
    }
    stats.chi_square_flagged =
        static_cast<Scalar>(stats.censored) > 0.01 * static_cast<Scalar>(trials);
    return result;
}

ScanResult symmetry_scan(Model model, const DynamicsConfig& cfg, const std::vector<Scalar>& grid,
                         std::uint64_t trials_per_x, std::uint64_t master_seed, Scalar ci_level,
                         int threads) {
    if (cfg.dim() != 2) throw std::invalid_argument("symmetry_scan: requires N = 2");
    if (grid.empty()) throw std::invalid_argument("symmetry_scan: empty grid");
    for (Scalar x : grid)
        if (!(x > 0.0 && x < 1.0))
            throw std::invalid_argument("symmetry_scan: grid values must lie in (0, 1)");

    const std::size_t npts = grid.size();
    std::vector<std::size_t> partner(npts, npts);
    for (std::size_t i = 0; i < npts; ++i) {
        for (std::size_t j = 0; j < npts; ++j) {
            if (std::abs(grid[j] - (1.0 - grid[i])) <= 1e-12) {
                partner[i] = j;
                break;
            }
        }
        if (partner[i] == npts)
            throw std::invalid_argument("symmetry_scan: grid is not closed under x -> 1 - x");
    }

    ScanResult result;
    result.grid = grid;
    result.partner = partner;
    result.per_x.reserve(npts);
    for (std::size_t i = 0; i < npts; ++i) {
        const Scalar x = grid[i];
        EnsembleInit init =
            model == Model::martingale
                ? EnsembleInit{SimplexPoint::unchecked((Vec(2) << x, 1.0 - x).finished())}
                : EnsembleInit{project_to_sphere(
                      (Vec(2) << std::sqrt(x), std::sqrt(1.0 - x)).finished())};
        EnsembleResult er = run_ensemble(model, cfg, init, trials_per_x,
                                         derive_seed(master_seed, i), ci_level, threads);
        result.per_x.push_back(std::move(er.stats));
    }

    // Joint confidence bound over the distinct (x, 1-x) pairs.
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < npts; ++i)
        if (partner[i] >= i) ++pairs;
    const Scalar z = normal_quantile(1.0 - (1.0 - ci_level) / (2.0 * static_cast<Scalar>(pairs)));

    auto freq_variance = [&](std::size_t i) {
        const CollapseStats& s = result.per_x[i];
        const std::uint64_t m = s.completed();
        if (m == 0) return std::numeric_limits<Scalar>::infinity();
        const Scalar p = s.frequencies[0];
        return p * (1.0 - p) / static_cast<Scalar>(m);
    };

    result.symmetry_residuals.resize(npts);
    result.residual_bounds.resize(npts);
    for (std::size_t i = 0; i < npts; ++i) {
        const std::size_t j = partner[i];
        const Scalar p_i = result.per_x[i].frequencies[0];
        const Scalar p_j = result.per_x[j].frequencies[0];
        result.symmetry_residuals[i] = std::abs(p_i + p_j - 1.0);
        result.residual_bounds[i] = i == j ? z * 2.0 * std::sqrt(freq_variance(i))
                                           : z * std::sqrt(freq_variance(i) + freq_variance(j));
    }

    // Least-squares line through (x, P1_hat(x)).
    Scalar sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < npts; ++i) {
        sx += grid[i];
        sy += result.per_x[i].frequencies[0];
        sxx += grid[i] * grid[i];
        sxy += grid[i] * result.per_x[i].frequencies[0];
    }
    const Scalar nn = static_cast<Scalar>(npts);
    const Scalar det = nn * sxx - sx * sx;
    if (std::abs(det) > 0.0) {
        result.fit.slope = (nn * sxy - sx * sy) / det;
        result.fit.intercept = (sy * sxx - sx * sxy) / det;
    }
    for (std::size_t i = 0; i < npts; ++i) {
        const Scalar fitted = result.fit.intercept + result.fit.slope * grid[i];
        result.fit.max_abs_residual = std::max(
            result.fit.max_abs_residual, std::abs(result.per_x[i].frequencies[0] - fitted));
    }
    return result;
}

}  // namespace collapse
