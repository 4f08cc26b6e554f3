#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "collapse/rng.hpp"
#include "collapse/stats.hpp"

#include <cmath>
#include <complex>
#include <cstdlib>

using namespace collapse;

namespace {

DynamicsConfig martingale_config(Index n, double sigma, double eps = 1e-6) {
    DynamicsConfig cfg(Potential::quartic_vertex_well(n));
    cfg.noise.sigma = sigma;
    cfg.collapse_eps = eps;
    return cfg;
}

}  // namespace

TEST_CASE("born_reference squares the moduli") {
    const double r = 1.0 / std::sqrt(2.0);
    AmplitudeVector c1{(CVec(2) << std::complex<double>(r, 0.0), std::complex<double>(0.0, r))
                           .finished()};
    const Vec p1 = born_reference(c1);
    CHECK(p1[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p1[1] == doctest::Approx(0.5).epsilon(1e-12));

    AmplitudeVector c2{(CVec(2) << std::complex<double>(0.6, 0.0),
                        std::complex<double>(0.0, 0.8))
                           .finished()};
    const Vec p2 = born_reference(c2);
    CHECK(p2[0] == doctest::Approx(0.36).epsilon(1e-12));
    CHECK(p2[1] == doctest::Approx(0.64).epsilon(1e-12));

    AmplitudeVector basis{(CVec(3) << 1.0, 0.0, 0.0).finished()};
    const Vec p3 = born_reference(basis);
    CHECK(p3[0] == 1.0);
    CHECK(p3[1] == 0.0);
    CHECK(p3[2] == 0.0);

    AmplitudeVector bad{(CVec(2) << 0.6, 0.9).finished()};
    CHECK_THROWS_AS(born_reference(bad), std::invalid_argument);
}

TEST_CASE("wilson interval") {
    SUBCASE("boundary cases") {
        const auto [lo0, hi0] = wilson_interval(0, 10, 0.95);
        CHECK(lo0 == doctest::Approx(0.0).epsilon(1e-15));
        const auto [lo1, hi1] = wilson_interval(10, 10, 0.95);
        CHECK(hi1 == doctest::Approx(1.0).epsilon(1e-12));
        (void)hi0;
        (void)lo1;
    }
    SUBCASE("frozen reference value (30, 100, 0.95)") {
        const auto [lo, hi] = wilson_interval(30, 100, 0.95);
        CHECK(lo == doctest::Approx(0.2189488529493276).epsilon(1e-9));
        CHECK(hi == doctest::Approx(0.3958485463334666).epsilon(1e-9));
        // Spec-level tolerance.
        CHECK(std::abs(lo - 0.2189) <= 1e-3);
        CHECK(std::abs(hi - 0.3958) <= 1e-3);
    }
    SUBCASE("contains the point estimate and stays in [0, 1]") {
        TrialRng rng(70, 0);
        for (int k = 0; k < 500; ++k) {
            const std::uint64_t n = 1 + static_cast<std::uint64_t>(rng.uniform01() * 1000);
            const std::uint64_t s = static_cast<std::uint64_t>(rng.uniform01() * (n + 1)) % (n + 1);
            const double level = 0.5 + 0.499 * rng.uniform01();
            const auto [lo, hi] = wilson_interval(s, n, level);
            const double phat = static_cast<double>(s) / n;
            CHECK(lo >= 0.0);
            CHECK(hi <= 1.0);
            CHECK(lo <= phat + 1e-12);
            CHECK(hi >= phat - 1e-12);
        }
    }
    SUBCASE("argument validation") {
        CHECK_THROWS_AS(wilson_interval(1, 0, 0.95), std::invalid_argument);
        CHECK_THROWS_AS(wilson_interval(5, 3, 0.95), std::invalid_argument);
        CHECK_THROWS_AS(wilson_interval(1, 2, 1.0), std::invalid_argument);
    }
}

TEST_CASE("chi-square goodness of fit") {
    SUBCASE("exact proportions give statistic 0 and p-value 1") {
        const ChiSquareResult r =
            chi_square_gof({30, 70}, (Vec(2) << 0.3, 0.7).finished());
        CHECK(r.statistic == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(r.dof == 1);
        CHECK(r.p_value == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("hand-computed statistic 160") {
        const ChiSquareResult r =
            chi_square_gof({300, 700}, (Vec(2) << 0.5, 0.5).finished());
        CHECK(r.statistic == doctest::Approx(160.0).epsilon(1e-12));
        CHECK(r.dof == 1);
        CHECK(r.p_value < 1e-30);
        CHECK(r.p_value == doctest::Approx(1.1314837902433038e-36).epsilon(1e-8));
    }
    SUBCASE("cells with small expectation are pooled") {
        // Expected counts (90, 8, 1, 1): the two E = 1 cells merge.
        const ChiSquareResult r = chi_square_gof(
            {90, 8, 1, 1}, (Vec(4) << 0.90, 0.08, 0.01, 0.01).finished());
        CHECK(r.dof == 2);
        CHECK(r.statistic == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("zero-expectation cells stay finite") {
        const ChiSquareResult r =
            chi_square_gof({95, 5}, (Vec(2) << 1.0, 0.0).finished());
        CHECK(std::isfinite(r.statistic));
        CHECK(r.statistic > 0.0);
    }
    SUBCASE("all-zero counts are rejected") {
        CHECK_THROWS_AS(chi_square_gof({0, 0}, (Vec(2) << 0.5, 0.5).finished()),
                        std::invalid_argument);
    }
}

TEST_CASE("ensembles reproduce and count exactly") {
    const DynamicsConfig cfg = martingale_config(2, 2.0, 1e-3);
    const EnsembleInit init{SimplexPoint{(Vec(2) << 0.3, 0.7).finished()}};

    const EnsembleResult a = run_ensemble(Model::martingale, cfg, init, 5000, 77, 0.99, 1);
    const EnsembleResult b = run_ensemble(Model::martingale, cfg, init, 5000, 77, 0.99, 1);
    const EnsembleResult c = run_ensemble(Model::martingale, cfg, init, 5000, 77, 0.99, 3);

    CHECK(a.stats.counts == b.stats.counts);
    CHECK(a.stats.counts == c.stats.counts);
    CHECK(a.stats.censored == c.stats.censored);
    CHECK(a.total_steps == c.total_steps);

    const CollapseStats& s = a.stats;
    CHECK(s.counts[0] + s.counts[1] + s.censored + s.failed == s.trials);
    CHECK(s.frequencies[0] >= s.ci_low[0]);
    CHECK(s.frequencies[0] <= s.ci_high[0]);
    CHECK(s.born[0] == doctest::Approx(0.3).epsilon(1e-12));

    // Absorption matches Born within the 99% Wilson interval.
    CHECK(0.3 >= s.ci_low[0]);
    CHECK(0.3 <= s.ci_high[0]);
}

TEST_CASE("a different seed gives different counts") {
    const DynamicsConfig cfg = martingale_config(2, 2.0, 1e-3);
    const EnsembleInit init{SimplexPoint{(Vec(2) << 0.3, 0.7).finished()}};
    const EnsembleResult a = run_ensemble(Model::martingale, cfg, init, 5000, 77, 0.99, 1);
    const EnsembleResult d = run_ensemble(Model::martingale, cfg, init, 5000, 78, 0.99, 1);
    CHECK(a.stats.counts != d.stats.counts);
}

TEST_CASE("gradient flow ensembles") {
    SUBCASE("a vertex start cannot escape under tiny noise") {
        DynamicsConfig cfg(Potential::quartic_vertex_well(2));
        cfg.noise.sigma = 1e-3;
        const EnsembleInit init{vertex(0, 2)};
        const EnsembleResult r = run_ensemble(Model::gradient_flow, cfg, init, 500, 80);
        CHECK(r.stats.frequencies[0] >= 0.999);
    }
    SUBCASE("zero-noise flow ensembles are rejected") {
        DynamicsConfig cfg(Potential::quartic_vertex_well(2));
        cfg.noise.sigma = 0.0;
        cfg.noise.sigma0 = 0.0;
        const EnsembleInit init{vertex(0, 2)};
        CHECK_THROWS_AS(run_ensemble(Model::gradient_flow, cfg, init, 10, 80),
                        std::invalid_argument);
    }
    SUBCASE("trials = 1 is well-defined") {
        DynamicsConfig cfg(Potential::quartic_vertex_well(2));
        cfg.noise.sigma = 1e-3;
        const EnsembleInit init{project_to_sphere((Vec(2) << 0.6, 0.8).finished())};
        const EnsembleResult r = run_ensemble(Model::gradient_flow, cfg, init, 1, 81);
        CHECK(r.stats.counts[0] + r.stats.counts[1] == 1);
        CHECK(r.stats.ci_low.size() == 2);
    }
}

TEST_CASE("martingale p-values are calibrated") {
    // 100 independent ensembles; the p-value against the Born reference
    // should exceed 0.01 in at least 98 of them.
    const DynamicsConfig cfg = martingale_config(2, 2.0, 1e-3);
    const EnsembleInit init{SimplexPoint{(Vec(2) << 0.3, 0.7).finished()}};
    int calibrated = 0;
    for (int e = 0; e < 100; ++e) {
        const EnsembleResult r =
            run_ensemble(Model::martingale, cfg, init, 2000, derive_seed(8200, e));
        CHECK(r.stats.censored == 0);
        if (r.stats.p_value > 0.01) ++calibrated;
    }
    CHECK(calibrated >= 98);
}

TEST_CASE("symmetry scan") {
    const DynamicsConfig cfg = martingale_config(2, 2.0, 1e-3);
    SUBCASE("grid validation") {
        CHECK_THROWS_AS(symmetry_scan(Model::martingale, cfg, {0.2, 0.4}, 100, 1),
                        std::invalid_argument);
        CHECK_THROWS_AS(symmetry_scan(Model::martingale, cfg, {}, 100, 1),
                        std::invalid_argument);
        CHECK_THROWS_AS(symmetry_scan(Model::martingale, cfg, {0.0, 1.0}, 100, 1),
                        std::invalid_argument);
        const DynamicsConfig cfg3 = martingale_config(3, 2.0, 1e-3);
        CHECK_THROWS_AS(symmetry_scan(Model::martingale, cfg3, {0.5}, 100, 1),
                        std::invalid_argument);
    }
    SUBCASE("counting identity and fit on a small martingale scan") {
        const std::vector<Scalar> grid{0.2, 0.5, 0.8};
        const ScanResult scan = symmetry_scan(Model::martingale, cfg, grid, 4000, 83);
        REQUIRE(scan.per_x.size() == 3);
        CHECK(scan.partner[0] == 2);
        CHECK(scan.partner[1] == 1);
        CHECK(scan.partner[2] == 0);
        for (const CollapseStats& s : scan.per_x)
            CHECK(s.counts[0] + s.counts[1] + s.censored + s.failed == s.trials);
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(scan.symmetry_residuals[i] <= scan.residual_bounds[i]);
        CHECK(scan.fit.slope == doctest::Approx(1.0).epsilon(0.08));
        CHECK(std::abs(scan.fit.intercept) < 0.05);
    }
    SUBCASE("x = 0.5 with an exchange-symmetric setup brackets one half") {
        const ScanResult scan = symmetry_scan(Model::martingale, cfg, {0.5}, 4000, 84);
        CHECK(scan.per_x[0].ci_low[0] <= 0.5);
        CHECK(scan.per_x[0].ci_high[0] >= 0.5);
    }
}

TEST_CASE("thread count resolution") {
    // The environment variable wins over the requested count.
    ::setenv("COLLAPSE_LAB_THREADS", "3", 1);
    CHECK(resolve_thread_count(8) == 3);
    ::setenv("COLLAPSE_LAB_THREADS", "0", 1);
    CHECK(resolve_thread_count(8) >= 1);  // auto
    ::unsetenv("COLLAPSE_LAB_THREADS");
    CHECK(resolve_thread_count(2) == 2);
    CHECK(resolve_thread_count(0) >= 1);
}
