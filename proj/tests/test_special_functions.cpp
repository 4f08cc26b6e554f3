#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "collapse/special_functions.hpp"

#include <cmath>

using namespace collapse;

// Frozen reference values computed with an independent implementation
// (scipy.stats, double precision).

TEST_CASE("normal quantile") {
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(normal_quantile(0.995) == doctest::Approx(2.5758293035489004).epsilon(1e-12));
    CHECK(normal_quantile(0.9995) == doctest::Approx(3.2905267314919255).epsilon(1e-12));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-12));
    CHECK(normal_quantile(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-9));
    CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
}

TEST_CASE("regularized incomplete gamma endpoints") {
    CHECK(regularized_gamma_lower(2.5, 0.0) == 0.0);
    CHECK(regularized_gamma_upper(2.5, 0.0) == 1.0);
    for (double a : {0.5, 1.0, 3.5, 10.0}) {
        for (double x : {0.1, 1.0, 5.0, 30.0}) {
            const double p = regularized_gamma_lower(a, x);
            const double q = regularized_gamma_upper(a, x);
            CHECK(p + q == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(p >= 0.0);
            CHECK(q >= 0.0);
        }
    }
}

TEST_CASE("chi-square survival function") {
    CHECK(chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-10));
    CHECK(chi_square_sf(5.991464547107979, 2) == doctest::Approx(0.05).epsilon(1e-10));
    CHECK(chi_square_sf(0.5, 3) == doctest::Approx(0.9188914116546758).epsilon(1e-12));
    CHECK(chi_square_sf(25.0, 4) == doctest::Approx(5.0309817823062075e-05).epsilon(1e-10));
    CHECK(chi_square_sf(160.0, 1) == doctest::Approx(1.1314837902433038e-36).epsilon(1e-8));
    CHECK(chi_square_sf(0.0, 5) == 1.0);
    CHECK(chi_square_sf(-1.0, 5) == 1.0);
    CHECK_THROWS_AS(chi_square_sf(1.0, 0), std::domain_error);
}

TEST_CASE("chi-square sf is monotone in x") {
    for (int dof : {1, 2, 5}) {
        double prev = 1.0;
        for (double x = 0.5; x < 40.0; x += 0.5) {
            const double s = chi_square_sf(x, dof);
            CHECK(s <= prev);
            prev = s;
        }
    }
}
