#include "borel/series.hpp"
#include "borel/transforms.hpp"

#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <random>

using namespace borel;

namespace {

RayGridFunction on_grid(double alpha, const std::function<cplx(cplx)>& f, int M = 1024, double p_max = 16.0,
                        double theta = 0.0) {
    auto g = RayGrid::make(theta, M, p_max);
    return RayGridFunction::sample(g, {0.0}, alpha, [&](cplx p, double) { return f(p); });
}

double k_n2_integral(double p, int moment) {
    boost::math::quadrature::exp_sinh<double> es;
    return es.integrate([&](double q) { return acceleration_kernel_n2(p, q) * std::pow(q, moment); });
}

}  // namespace

TEST_SUITE("transforms") {

TEST_CASE("Laplace transform examples") {
    auto one = on_grid(0.0, [](cplx) { return cplx(1.0); }, 1024, 32.0);
    CHECK(std::abs(laplace_ray(one, 2.0, 0).value - 0.5) < 1e-10);
    auto inv = on_grid(-0.5, [](cplx p) { return std::pow(p, -0.5) / std::sqrt(pi); });
    CHECK(std::abs(laplace_ray(inv, 4.0, 0).value - 0.5) < 1e-10);
}

TEST_CASE("Borel transform then Laplace returns the monomial") {
    for (auto alpha : {make_rational(1, 2), make_rational(1), make_rational(3, 2), make_rational(2), make_rational(5, 2)}) {
        auto m = borel_of_monomial(alpha);
        double e = to_double(m.exponent);
        cplx c = m.coeff[0];
        auto F = on_grid(e, [&](cplx p) { return c * std::pow(p, e); });
        for (cplx x : {cplx(3.0), cplx(2.0, 1.5), cplx(6.0, -2.0)}) {
            cplx got = laplace_ray(F, x, 0).value;
            cplx want = std::pow(x, -to_double(alpha));
            CHECK(std::abs(got - want) < 1e-9 * std::abs(want));
        }
    }
}

TEST_CASE("Laplace along a rotated ray") {
    double theta = 0.5;
    auto F = on_grid(0.0, [](cplx p) { return std::exp(-p); }, 1024, 16.0, theta);
    cplx x(1.0, -1.0);
    CHECK(std::abs(laplace_ray(F, x, 0).value - 1.0 / (1.0 + x)) < 1e-10);
}

TEST_CASE("Laplace refuses points outside the half-plane of convergence") {
    auto F = on_grid(0.0, [](cplx p) { return std::exp(2.0 * p); }, 512, 8.0);
    CHECK_THROWS_AS(laplace_ray(F, 1.0, 0), DomainError);
}

TEST_CASE("contour inverse Laplace examples") {
    for (double p : {0.3, 1.0, 2.5}) {
        auto r1 = inverse_laplace_contour([](cplx x) { return 1.0 / x; }, p);
        CHECK(std::abs(r1.value - 1.0) < 1e-8);
        auto rh = inverse_laplace_contour([](cplx x) { return std::pow(x, -0.5); }, p);
        CHECK(std::abs(rh.value - std::pow(p, -0.5) / std::sqrt(pi)) < 1e-8);
        CHECK_FALSE(r1.warning);
    }
}

TEST_CASE("Laplace and inverse Laplace are mutually inverse") {
    // L[e^{-p}] = 1/(1+x), analytic in the sector beyond radius 1
    auto F = on_grid(0.0, [](cplx p) { return std::exp(-p); });
    for (double x : {1.5, 3.0, 7.0}) CHECK(std::abs(laplace_ray(F, x, 0).value - 1.0 / (1.0 + x)) < 1e-12);
    ContourSpec spec;
    spec.rho1 = 2.0;
    for (double p : {0.5, 1.0, 2.0}) {
        auto r = inverse_laplace_contour([](cplx x) { return 1.0 / (1.0 + x); }, p, spec);
        CHECK(std::abs(r.value - std::exp(-p)) < 1e-6);
    }
    // x^{-alpha} family: L^{-1} then L by the grid transform
    for (double alpha : {0.5, 1.0, 2.0}) {
        auto G = on_grid(alpha - 1, [&](cplx p) {
            return inverse_laplace_contour([&](cplx x) { return std::pow(x, -alpha); }, p).value;
        }, 256, 16.0);
        double x = 3.0;
        CHECK(std::abs(laplace_ray(G, x, 0).value - std::pow(x, -alpha)) < 1e-6);
    }
}

TEST_CASE("acceleration kernel, n = 2") {
    double closed = acceleration_kernel_n2(1.0, 1.0);
    CHECK(closed == doctest::Approx(std::exp(-0.25) / (2 * std::sqrt(pi))).epsilon(1e-14));
    CHECK(closed == doctest::Approx(0.21970).epsilon(1e-4));
    AccelerationSpec contour;
    contour.n = 2;
    contour.force_contour = true;
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.2, 3.0);
    for (int i = 0; i < 10; ++i) {
        double p = u(rng), q = u(rng);
        auto kv = acceleration_kernel(p, q, contour);
        CHECK(std::abs(kv.value - acceleration_kernel_n2(p, q)) < 1e-8);
    }
    for (double p : {0.5, 1.0, 2.0}) {
        // moments: k! p^{alpha(k+1)-1} / Gamma(alpha(k+1)); with alpha = 1/2 the mass is p^{-1/2} / sqrt(pi)
        CHECK(k_n2_integral(p, 0) == doctest::Approx(kernel_moment(0, p, 2)).epsilon(1e-10));
        CHECK(kernel_moment(0, p, 2) == doctest::Approx(1.0 / std::sqrt(pi * p)).epsilon(1e-14));
        CHECK(k_n2_integral(p, 1) == doctest::Approx(kernel_moment(1, p, 2)).epsilon(1e-10));
        CHECK(kernel_moment(1, p, 2) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("kernel homogeneity") {
    // u -> lambda u in the defining integral: K(p, q) = lambda K(lambda p, lambda^alpha q)
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0.3, 2.0);
    for (int n : {2, 3}) {
        AccelerationSpec spec;
        spec.n = n;
        spec.force_contour = true;
        for (int i = 0; i < 5; ++i) {
            double p = u(rng), q = u(rng), lambda = u(rng);
            double a = acceleration_kernel(p, q, spec).value;
            double b = lambda * acceleration_kernel(lambda * p, std::pow(lambda, spec.alpha()) * q, spec).value;
            CHECK(std::abs(a - b) < 1e-8 * std::max(1.0, std::abs(a)));
        }
    }
}

TEST_CASE("kernel moments for n = 3 by contour quadrature") {
    AccelerationSpec spec;
    spec.n = 3;
    boost::math::quadrature::exp_sinh<double> es;
    for (int k : {0, 1}) {
        double p = 1.3;
        double m = es.integrate([&](double q) { return acceleration_kernel(p, q, spec).value * std::pow(q, k); });
        CHECK(m == doctest::Approx(kernel_moment(k, p, 3)).epsilon(1e-6));
    }
}

TEST_CASE("acceleration identity, n = 2, G = e^{-q}") {
    AccelerationSpec spec;
    spec.n = 2;
    GrowthCertificate cert{1.0, 0.0, 2};
    auto G = [](double q) { return cplx(std::exp(-q)); };
    auto r = accelerate(G, cert, {0.5, 1.0, 2.0}, {1.0, 2.0, 4.0}, spec);
    REQUIRE(r.identity_check.size() == 3);
    for (const auto& row : r.identity_check) {
        CHECK(std::abs(row.lhs - 1.0 / (1.0 + row.x)) < 1e-10);
        CHECK(std::abs(row.lhs - row.rhs) < 1e-5);
    }
    CHECK(std::abs(r.identity_check[1].lhs - 1.0 / 3.0) < 1e-10);
    CHECK(r.kernel_error_max < 1e-6);
    // G1 against a direct quadrature of the closed-form kernel
    boost::math::quadrature::exp_sinh<double> es;
    for (std::size_t i = 0; i < r.p.size(); ++i) {
        double p = r.p[i];
        double direct = es.integrate([&](double q) { return acceleration_kernel_n2(p, q) * std::exp(-q); });
        CHECK(std::abs(r.g1[i] - direct) < 1e-8);
    }
}

TEST_CASE("acceleration of zero and refusal without a certificate") {
    AccelerationSpec spec;
    auto zero = [](double) { return cplx{}; };
    auto r = accelerate(zero, GrowthCertificate{1.0, 0.0, 2}, {0.5, 1.0}, {2.0}, spec);
    for (auto v : r.g1) CHECK(v == cplx{});
    CHECK_THROWS_AS(accelerate(zero, std::nullopt, {1.0}, {2.0}, spec), InvalidProblem);
}

TEST_CASE("acceleration of a grid function with n = 3") {
    AccelerationSpec spec;
    spec.n = 3;
    auto F = on_grid(0.0, [](cplx p) { return std::exp(-p) * std::cos(p); }, 1024, 12.0);
    auto r = accelerate(F, 0, 0.0, {0.5, 1.0}, {2.0, 4.0}, spec);
    for (const auto& row : r.identity_check) {
        // L[e^{-p} cos p] = (1 + x) / ((1 + x)^2 + 1)
        double x = row.x;
        CHECK(std::abs(row.lhs - (1 + x) / ((1 + x) * (1 + x) + 1)) < 1e-8);
        CHECK(std::abs(row.lhs - row.rhs) < 1e-5);
    }
}

TEST_CASE("acceleration preserves the asymptotic coefficients") {
    for (int n : {2, 3}) {
        AccelerationSpec spec;
        spec.n = n;
        auto rows = watson_check([](double q) { return cplx(std::exp(-q) * (1.0 + q)); }, 3, spec);
        REQUIRE(rows.size() == 3);
        for (const auto& row : rows)
            CHECK(std::abs(row.from_g - row.from_g1) < 1e-4 * std::max(1.0, std::abs(row.from_g)));
        // e^{-q}(1+q) = 1 - q^2/2 + ...: coefficients k! G^{(k)}(0)/k! = 1, 0, -1
        CHECK(rows[0].from_g == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(std::abs(rows[1].from_g) < 1e-7);
        CHECK(rows[2].from_g == doctest::Approx(-1.0).epsilon(1e-6));
    }
}

TEST_CASE("prefactor power of the acceleration kernel tail") {
    // closed form for n = 2: C(X) = X^{-1/2} e^{-X/4} / (2 sqrt(pi)), so the fitted power is -1/2
    auto fit = fit_c_alpha(2, 4.0, 60.0);
    CHECK(fit.c == doctest::Approx(fit.c_exact).epsilon(1e-6));
    CHECK(fit.exponent == doctest::Approx(-0.5).epsilon(1e-5));
    CHECK(fit.constant == doctest::Approx(1.0 / (2 * std::sqrt(pi))).epsilon(1e-5));
    auto fit3 = fit_c_alpha(3, 4.0, 60.0);
    CHECK(fit3.c == doctest::Approx(fit3.c_exact).epsilon(1e-3));
    MESSAGE("n = 3 fitted prefactor power " << fit3.exponent);
}

}  // TEST_SUITE
