#include "fluxlab/spectral.hpp"

#include <doctest.h>

#include "oracles.hpp"

#include <cmath>
#include <numbers>

using namespace fluxlab;

namespace {
constexpr double kPi = std::numbers::pi;
const DomainSpec kDisc = DomainSpec::disc(1.0);
} // namespace

TEST_CASE("twisted ring converges to alpha(h)^2") {
    for (double h : {0.0, kPi / 2.0, kPi, 1.5 * kPi}) {
        const double target = alpha(h) * alpha(h);
        const double v = lambda_1d_twisted(h, 4096);
        if (target == 0.0)
            CHECK(std::abs(v) <= 1e-12);
        else
            CHECK(v == doctest::Approx(target).epsilon(1e-5));
    }
    CHECK(lambda_1d_twisted(0.0, 16) == 0.0);
    CHECK_THROWS_AS(lambda_1d_twisted(1.0, 4), std::invalid_argument);
}

TEST_CASE("radial oracle endpoints") {
    CHECK(std::abs(lambda_disc_radial_oracle(0.0, 1.0, 256)) <= 1e-9);
    CHECK(std::abs(lambda_disc_radial_oracle(2.0 * kPi, 1.0, 256)) <= 1e-9);
}

TEST_CASE("radial oracle at h=pi matches the Bessel derivative zero") {
    // nu = 1/2 separates: J_{1/2}(x) ~ sin(x)/sqrt(x), so the Neumann wall
    // condition reads tan(x) = 2x; lambda = x^2 for its first positive root.
    double lo = 1.0, hi = 1.4;
    const auto f = [](double x) { return std::tan(x) - 2.0 * x; };
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(lo) * f(mid) <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    const double lambda_true = lo * lo;
    CHECK(lambda_disc_radial_oracle(kPi, 1.0, 2048) == doctest::Approx(lambda_true).epsilon(1e-3));
}

TEST_CASE("radial oracle is stable between n_r = 512 and 1024") {
    for (double h : {kPi / 2.0, kPi, 1.5 * kPi}) {
        const double a = lambda_disc_radial_oracle(h, 1.0, 512);
        const double b = lambda_disc_radial_oracle(h, 1.0, 1024);
        CHECK(std::abs(a - b) / b <= 0.002);
    }
}

TEST_CASE("radial oracle validates the mode range") {
    CHECK_THROWS_AS(lambda_disc_radial_oracle(kPi, 1.0, 5, 9, 256), std::invalid_argument);
    CHECK_THROWS_AS(lambda_disc_radial_oracle(kPi, 1.0, 0, 1, 32), std::invalid_argument);
}

TEST_CASE("point flux spectrum is exactly 2 pi periodic") {
    for (double h : {kPi / 2.0, kPi}) {
        const double a = lambda_ab(kDisc, h, 64);
        const double b = lambda_ab(kDisc, h + 2.0 * kPi, 64);
        CHECK(std::abs(a - b) <= 1e-10);
    }
}

TEST_CASE("zero modes at integer flux quanta") {
    for (int k : {0, 1, 2}) CHECK(std::abs(lambda_ab(kDisc, 2.0 * kPi * k, 64)) <= 1e-8);
}

TEST_CASE("positivity on (0, 2 pi) and maximality at pi") {
    const double at_pi = lambda_ab(kDisc, kPi, 64);
    for (int k = 1; k <= 8; ++k) {
        const double h = 2.0 * kPi * k / 9.0;
        const double v = lambda_ab(kDisc, h, 64);
        CHECK(v > 0.01);
        CHECK(at_pi >= v - 1e-8);
    }
}

TEST_CASE("diamagnetic lower bound: every eigenvalue is nonnegative") {
    for (double h : {0.4, kPi, 5.1}) CHECK(lambda_ab(kDisc, h, 48) >= -1e-10);
}

TEST_CASE("lattice eigenvalue approaches the radial oracle at h=pi") {
    const double oracle = lambda_disc_radial_oracle(kPi, 1.0, 1024);
    const double lattice = lambda_ab(kDisc, kPi, 128);
    CHECK(std::abs(lattice - oracle) / oracle <= 0.02);
}

TEST_CASE("perforated eigenvalue obeys the annulus Hardy bound at h=pi") {
    // lambda >= alpha(pi)^2 / r0^2 up to O(spacing), r0 = 1.
    const double v = lambda_ab(kDisc, kPi, 128, AbMethod::perforated(0.2));
    CHECK(v >= 0.25 * 0.9);
}

TEST_CASE("perforated eigenvalues approach the point flux value") {
    const double ref = lambda_ab(kDisc, kPi, 128);
    double prev_gap = 1e300;
    for (double r : {0.3, 0.15}) {
        const double gap = std::abs(lambda_ab(kDisc, kPi, 128, AbMethod::perforated(r)) - ref);
        CHECK(gap < prev_gap + 1e-6);
        prev_gap = gap;
    }
}

TEST_CASE("step eigenvalue: zero flux and shrinking bump") {
    CHECK(std::abs(lambda_step(kDisc, 0.0, 0.3, 64)) <= 1e-10);
    const double ab = lambda_ab(kDisc, kPi, 96);
    double prev_gap = 1e300;
    for (double eps : {0.4, 0.2, 0.1}) {
        const double gap = std::abs(lambda_step(kDisc, kPi, eps, 96) - ab);
        CHECK(gap < prev_gap + 1e-6);
        prev_gap = gap;
    }
    CHECK_THROWS_AS(lambda_step(kDisc, kPi, 0.01, 64), std::invalid_argument);
}

TEST_CASE("Dirichlet eigenvalue of the unit disc vs the Bessel oracle") {
    const double j01 = oracles::bessel_j0_first_zero();
    const double ref = j01 * j01;
    CHECK(ref == doctest::Approx(5.7832).epsilon(1e-4));
    const MaskedGrid g = build_grid(kDisc, 128);
    CHECK(dirichlet_lambda(g) == doctest::Approx(ref).epsilon(0.02));
}

TEST_CASE("Dirichlet eigenvalue of the square star domain") {
    const double L = 1.6;
    const double ref = 2.0 * kPi * kPi / (L * L);
    const MaskedGrid g = build_grid(DomainSpec::square(L), 128);
    CHECK(dirichlet_lambda(g) == doctest::Approx(ref).epsilon(0.02));
}

TEST_CASE("Dirichlet refinement error does not increase") {
    const double j01 = oracles::bessel_j0_first_zero();
    const double ref = j01 * j01;
    const double e64 = std::abs(dirichlet_lambda(build_grid(kDisc, 64)) - ref);
    const double e128 = std::abs(dirichlet_lambda(build_grid(kDisc, 128)) - ref);
    CHECK(e128 <= e64 + 1e-3);
}
