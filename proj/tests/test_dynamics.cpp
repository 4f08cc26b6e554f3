#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "collapse/dynamics.hpp"
#include "collapse/rng.hpp"

#include <cmath>

using namespace collapse;

namespace {

DynamicsConfig quartic_config(Index n) {
    DynamicsConfig cfg(Potential::quartic_vertex_well(n));
    cfg.noise.sigma = 0.0;
    return cfg;
}

BPoint random_bpoint(TrialRng& rng, Index n) {
    Vec v(n);
    for (Index i = 0; i < n; ++i) v[i] = rng.normal();
    return project_to_sphere(v);
}

// Integrate to t = 1 with the given step size, deterministically.
BPoint integrate_to_unit_time(const DynamicsConfig& base, const BPoint& b0, double h) {
    DynamicsConfig cfg = base;
    cfg.h = h;
    BPoint b = b0;
    const long steps = std::lround(1.0 / h);
    for (long k = 0; k < steps; ++k) b = step_deterministic(cfg, b);
    return b;
}

}  // namespace

TEST_CASE("drift is the negated sphere gradient plus the transverse field") {
    DynamicsConfig cfg = quartic_config(2);
    SUBCASE("vanishes at a vertex") {
        CHECK(drift(cfg, vertex(0, 2)).v.cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("value at (0.6, 0.8)") {
        // Negated oracle value of the sphere gradient at this point.
        const TangentVector v = drift(cfg, BPoint{(Vec(2) << 0.6, 0.8).finished()});
        CHECK(v.v[0] == doctest::Approx(-0.43008).epsilon(1e-12));
        CHECK(v.v[1] == doctest::Approx(0.32256).epsilon(1e-12));
    }
    SUBCASE("descent rate identity") {
        TrialRng rng(31, 0);
        DynamicsConfig cfg3 = quartic_config(3);
        cfg3.transverse = TransverseFieldSpec::tangent_rotation(0, 2, 0.7);
        for (int k = 0; k < 300; ++k) {
            const BPoint b = random_bpoint(rng, 3);
            const Vec g = sphere_gradient(cfg3.potential, b).v;
            const Vec v = drift(cfg3, b).v;
            CHECK(std::abs(v.dot(g) + g.squaredNorm()) <= 1e-10);
        }
    }
    SUBCASE("tangency at random states") {
        TrialRng rng(32, 0);
        for (int k = 0; k < 1000; ++k) {
            const BPoint b = random_bpoint(rng, 4);
            const Vec v = drift(quartic_config(4), b).v;
            CHECK(std::abs(b.vec().dot(v)) <= 1e-12 * std::max(1.0, v.norm()));
        }
    }
}

TEST_CASE("deterministic step fixes critical points") {
    const DynamicsConfig cfg = quartic_config(3);
    const BPoint v1 = vertex(1, 3);
    const BPoint after = step_deterministic(cfg, v1);
    CHECK((after.vec() - v1.vec()).cwiseAbs().maxCoeff() == 0.0);

    const BPoint sym = project_to_sphere(Vec::Ones(3));
    const BPoint after_sym = step_deterministic(cfg, sym);
    CHECK((after_sym.vec() - sym.vec()).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("step-halving oracle at t = 1") {
    const DynamicsConfig base = quartic_config(2);
    const BPoint b0{(Vec(2) << 0.6, 0.8).finished()};
    const BPoint coarse = integrate_to_unit_time(base, b0, 1e-3);
    const BPoint reference = integrate_to_unit_time(base, b0, 1e-5);
    CHECK((coarse.vec() - reference.vec()).cwiseAbs().maxCoeff() <= 1e-9);

    // f decreases strictly along the coarse path while away from the limits.
    DynamicsConfig cfg = base;
    cfg.h = 1e-3;
    BPoint b = b0;
    double prev = f_value(cfg.potential, b.vec());
    for (int k = 0; k < 1000; ++k) {
        b = step_deterministic(cfg, b);
        const double f = f_value(cfg.potential, b.vec());
        CHECK(f < prev + 1e-12);
        prev = f;
    }
}

TEST_CASE("fourth-order convergence of the endpoint") {
    const DynamicsConfig base = quartic_config(2);
    const BPoint b0{(Vec(2) << 0.6, 0.8).finished()};
    const BPoint ref = integrate_to_unit_time(base, b0, 0.02 / 16.0);
    const double err_h = (integrate_to_unit_time(base, b0, 0.02).vec() - ref.vec()).norm();
    const double err_h2 = (integrate_to_unit_time(base, b0, 0.01).vec() - ref.vec()).norm();
    CHECK(err_h / err_h2 >= 8.0);
}

TEST_CASE("stochastic step reduces to explicit Euler at sigma = 0") {
    DynamicsConfig cfg = quartic_config(2);
    cfg.noise.sigma = 0.0;
    const BPoint b{(Vec(2) << 0.6, 0.8).finished()};
    TrialRng rng(33, 0);
    const BPoint stepped = step_stochastic(cfg, b, rng);
    const Vec manual = b.vec() + cfg.h * drift(cfg, b).v;
    const BPoint expected = project_to_sphere(manual);
    CHECK((stepped.vec() - expected.vec()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stochastic step is reproducible under a fixed seed") {
    DynamicsConfig cfg = quartic_config(3);
    cfg.noise.sigma = 0.05;
    const BPoint b = project_to_sphere((Vec(3) << 1.0, 2.0, 3.0).finished());
    TrialRng r1(34, 5), r2(34, 5);
    const BPoint s1 = step_stochastic(cfg, b, r1);
    const BPoint s2 = step_stochastic(cfg, b, r2);
    CHECK((s1.vec() - s2.vec()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("one-step mean and covariance match the Euler-Maruyama law") {
    DynamicsConfig cfg = quartic_config(3);
    cfg.noise.sigma = 1e-3;
    const BPoint b = project_to_sphere((Vec(3) << 1.0, 1.5, 2.0).finished());
    const Vec mean_target = cfg.h * drift(cfg, b).v;

    const int m = 100000;
    TrialRng rng(35, 0);
    Vec sum = Vec::Zero(3);
    Eigen::Matrix3d sum_outer = Eigen::Matrix3d::Zero();
    for (int k = 0; k < m; ++k) {
        const Vec d = step_stochastic(cfg, b, rng).vec() - b.vec();
        const Vec centered = d - mean_target;
        sum += d;
        sum_outer += centered * centered.transpose();
    }
    const Vec mean = sum / m;
    const Eigen::Matrix3d cov = sum_outer / m;

    // Tangent projector at b.
    const Eigen::Matrix3d proj =
        Eigen::Matrix3d::Identity() - b.vec() * b.vec().transpose();
    const double scale = cfg.h * cfg.noise.sigma * cfg.noise.sigma;

    for (Index i = 0; i < 3; ++i) {
        const double se = std::sqrt(scale * proj(i, i) / m);
        CHECK(std::abs(mean[i] - mean_target[i]) <= 3.0 * se + 1e-15);
    }
    for (Index i = 0; i < 3; ++i) {
        for (Index j = 0; j < 3; ++j) {
            const double se =
                scale * std::sqrt((1.0 + (i == j ? 1.0 : 0.0)) / m);
            CHECK(std::abs(cov(i, j) - scale * proj(i, j)) <= 3.0 * se + 1e-18);
        }
    }
}

TEST_CASE("initial jitter") {
    const BPoint b0 = project_to_sphere((Vec(3) << 2.0, 1.0, 1.0).finished());
    SUBCASE("sigma0 = 0 returns the input unchanged") {
        TrialRng rng(36, 0);
        const BPoint same = jitter_initial(b0, 0.0, rng);
        CHECK((same.vec() - b0.vec()).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("mean squared displacement is sigma0^2 (N - 1)") {
        const double sigma0 = 0.01;
        TrialRng rng(37, 0);
        double sum = 0.0;
        const int m = 100000;
        for (int k = 0; k < m; ++k) {
            const BPoint j = jitter_initial(b0, sigma0, rng);
            sum += (j.vec() - b0.vec()).squaredNorm();
        }
        const double expected = sigma0 * sigma0 * 2.0;
        CHECK(sum / m == doctest::Approx(expected).epsilon(0.05));
    }
    SUBCASE("output satisfies the sphere invariants") {
        TrialRng rng(38, 0);
        for (int k = 0; k < 1000; ++k) {
            const BPoint j = jitter_initial(b0, 0.3, rng);
            CHECK(std::abs(j.vec().squaredNorm() - 1.0) <= 1e-9);
            CHECK(j.vec().minCoeff() >= 0.0);
        }
    }
}

TEST_CASE("run_trajectory outcomes") {
    SUBCASE("a vertex start collapses at t = 0 with a single recorded state") {
        DynamicsConfig cfg = quartic_config(3);
        TrialRng rng(39, 0);
        const Trajectory traj = run_trajectory(cfg, vertex(1, 3), rng, true);
        REQUIRE(traj.outcome.collapsed());
        CHECK(*traj.outcome.vertex_index == 1);
        CHECK(*traj.outcome.collapse_time == 0.0);
        CHECK(traj.times.size() == 1);
    }
    SUBCASE("pure descent from (0.6, 0.8) reaches the larger component's vertex") {
        DynamicsConfig cfg = quartic_config(2);
        TrialRng rng(40, 0);
        const Trajectory traj =
            run_trajectory(cfg, BPoint{(Vec(2) << 0.6, 0.8).finished()}, rng, true);
        REQUIRE(traj.outcome.collapsed());
        CHECK(*traj.outcome.vertex_index == 1);
        CHECK(descent_check(traj).pass);
        CHECK(traj.f_values.front() == doctest::Approx(0.4608).epsilon(1e-12));
    }
    SUBCASE("near-symmetric starts with noise split close to 50/50") {
        DynamicsConfig cfg = quartic_config(2);
        cfg.noise.sigma = 1e-3;
        const BPoint sym = project_to_sphere(Vec::Ones(2));
        int first = 0;
        const int trials = 2000;
        for (int k = 0; k < trials; ++k) {
            TrialRng rng(41, static_cast<std::uint64_t>(k));
            const Trajectory traj = run_trajectory(cfg, sym, rng, false);
            REQUIRE(traj.outcome.collapsed());
            if (*traj.outcome.vertex_index == 0) ++first;
        }
        const double freq = static_cast<double>(first) / trials;
        CHECK(freq > 0.5 - 3.0 * 0.0112);  // 3 sigma for 2000 trials
        CHECK(freq < 0.5 + 3.0 * 0.0112);
    }
    SUBCASE("tiny horizon censors") {
        DynamicsConfig cfg = quartic_config(2);
        cfg.t_max = 0.002;
        TrialRng rng(42, 0);
        const Trajectory traj =
            run_trajectory(cfg, BPoint{(Vec(2) << 0.6, 0.8).finished()}, rng, false);
        CHECK(!traj.outcome.collapsed());
        CHECK(traj.outcome.kind == OutcomeKind::censored);
    }
    SUBCASE("record = false keeps only the endpoints") {
        DynamicsConfig cfg = quartic_config(2);
        TrialRng rng(43, 0);
        const Trajectory traj =
            run_trajectory(cfg, BPoint{(Vec(2) << 0.6, 0.8).finished()}, rng, false);
        CHECK(traj.times.size() == 2);
        CHECK(traj.points.front().vec()[0] == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(traj.points.back().vec().maxCoeff() >= 1.0 - cfg.collapse_eps);
    }
    SUBCASE("recorded f values match the potential") {
        DynamicsConfig cfg = quartic_config(2);
        TrialRng rng(44, 0);
        const Trajectory traj =
            run_trajectory(cfg, BPoint{(Vec(2) << 0.6, 0.8).finished()}, rng, true);
        for (std::size_t k = 0; k < traj.points.size(); ++k)
            CHECK(traj.f_values[k] == f_value(cfg.potential, traj.points[k].vec()));
    }
    SUBCASE("every recorded point satisfies the sphere invariants") {
        DynamicsConfig cfg = quartic_config(3);
        cfg.noise.sigma = 0.05;
        TrialRng rng(45, 0);
        const Trajectory traj =
            run_trajectory(cfg, project_to_sphere(Vec::Ones(3)), rng, true);
        for (const BPoint& p : traj.points) {
            CHECK(std::abs(p.vec().squaredNorm() - 1.0) <= 1e-9);
            CHECK(p.vec().minCoeff() >= 0.0);
        }
    }
    SUBCASE("integrator blow-up raises the distinct failure") {
        DynamicsConfig cfg = quartic_config(2);
        cfg.h = 1e200;  // forces overflow in the quartic drift
        TrialRng rng(46, 0);
        CHECK_THROWS_AS(
            run_trajectory(cfg, BPoint{(Vec(2) << 0.6, 0.8).finished()}, rng, false),
            integrator_blowup);
    }
}

TEST_CASE("descent check") {
    SUBCASE("transverse field leaves the descent rate unchanged (N = 3)") {
        DynamicsConfig cfg = quartic_config(3);
        cfg.transverse = TransverseFieldSpec::tangent_rotation(0, 2, 1.0);
        TrialRng rng(47, 0);
        const BPoint b0 = project_to_sphere((Vec(3) << 1.0, 1.3, 0.9).finished());
        const Trajectory traj = run_trajectory(cfg, b0, rng, true);
        REQUIRE(traj.outcome.collapsed());
        const DescentReport report = descent_check(traj);
        CHECK(report.pass);
        CHECK(report.worst_violation <= 1e-10);
    }
    SUBCASE("a rising f series fails") {
        Trajectory fake;
        fake.times = {0.0, 1.0};
        fake.points = {vertex(0, 2), vertex(0, 2)};
        fake.f_values = {0.0, 1e-6};
        const DescentReport report = descent_check(fake);
        CHECK(!report.pass);
        CHECK(report.worst_violation == doctest::Approx(1e-6));
    }
    SUBCASE("single-state trajectory passes with zero violation") {
        DynamicsConfig cfg = quartic_config(2);
        TrialRng rng(48, 0);
        const Trajectory traj = run_trajectory(cfg, vertex(0, 2), rng, true);
        const DescentReport report = descent_check(traj);
        CHECK(report.pass);
        CHECK(report.worst_violation == 0.0);
    }
}

TEST_CASE("config validation") {
    DynamicsConfig cfg = quartic_config(2);
    cfg.h = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.h = 1e-3;
    cfg.collapse_eps = 0.7;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.collapse_eps = 1e-6;
    CHECK_NOTHROW(cfg.validate());
}
