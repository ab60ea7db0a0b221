#include "borel/harry_dym.hpp"
#include "borel/solver.hpp"
#include "borel/transforms.hpp"

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

using namespace borel;

namespace {

PDEProblem airy(double coupling = 0.0, int forcing_exp = 2) {
    PDEProblem p;
    p.n = 3;
    p.symbol.n = 3;
    p.symbol.coeffs.resize(1);
    p.symbol.coeffs[0][MultiIndex{{3}}] = -1.0;
    RamifiedSeries r(Side::x);
    if (forcing_exp > 0) r.add(make_rational(forcing_exp), 1.0);
    p.forcing = {r};
    p.initial = {RamifiedSeries(Side::x)};
    p.alpha_r = forcing_exp > 0 ? make_rational(forcing_exp) : make_rational(1);
    p.sector.phi = 0.4;
    p.epsilon = 10;
    if (coupling != 0.0) {
        NonlinearTerm t;
        t.k = {1};
        t.q = {QFactor{0, MultiIndex{{1}}, 1}};
        t.coeff = RamifiedSeries(Side::x);
        t.coeff.add(make_rational(1), coupling);
        p.terms = {t};
    }
    return p;
}

cplx closed_form(cplx p, double t) { return (1.0 - std::exp(-p * p * p * t)) / (p * p); }

template <class F>
double gk(F f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, 6, 1e-13);
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("F0 examples") {
    auto g = RayGrid::make(0.0, 512, 8.0);
    auto times = chebyshev_lobatto(9, 1.0);
    auto F0 = build_F0(airy(), g, times)[0];
    double worst = 0.0;
    for (int it = 0; it < F0.nt(); ++it)
        for (int k = 1; k <= g->M; ++k) worst = std::max(worst, std::abs(F0.at(k, it) - closed_form(g->node(k), times[it])));
    CHECK(worst < 1e-12);

    // r = 0 and f_I = 1/x: F_I = 1 propagates as e^{-p^3 t}
    auto p = airy(0.0, 0);
    p.initial[0].add(make_rational(1), 1.0);
    auto G0 = build_F0(p, g, times)[0];
    worst = 0.0;
    for (int it = 0; it < G0.nt(); ++it)
        for (int k = 1; k <= g->M; ++k) {
            double s = g->node(k);
            worst = std::max(worst, std::abs(G0.at(k, it) - std::exp(-s * s * s * times[it])));
        }
    CHECK(worst < 1e-13);
    for (int k = 1; k <= g->M; ++k) CHECK(std::abs(G0.at(k, 0) - 1.0) < 1e-15);
}

TEST_CASE("F0 refuses a failing cone condition") {
    auto p = airy();
    p.symbol.coeffs[0][MultiIndex{{3}}] = 1.0;  // P(-p) = -p^3
    auto g = RayGrid::make(0.0, 64, 4.0);
    CHECK_THROWS_AS(build_F0(p, g, {0.0, 1.0}), InvalidProblem);
}

TEST_CASE("Duhamel monomials") {
    for (cplx a : {cplx(0.0), cplx(2.0), cplx(1.0, 3.0), cplx(300.0)})
        for (int m : {0, 1, 3}) {
            double t = 0.8;
            double re = gk([&](double tau) { return (std::exp(-a * (t - tau)) * std::pow(tau, m)).real(); }, 0.0, t);
            double im = gk([&](double tau) { return (std::exp(-a * (t - tau)) * std::pow(tau, m)).imag(); }, 0.0, t);
            CHECK(std::abs(duhamel_monomial(a, t, m) - cplx(re, im)) < 1e-12);
        }
}

TEST_CASE("without nonlinear terms the operator is constant") {
    auto g = RayGrid::make(0.0, 256, 8.0);
    IntegralOperator op(airy(), g, chebyshev_lobatto(8, 1.0));
    auto F = op.F0();
    for (auto& v : F[0].values()) v = cplx(std::sin(v.real() + 1.0), 0.3);
    auto N = op.apply(F);
    CHECK(N[0].values() == op.F0()[0].values());
    CHECK(estimate_contraction(airy(), 8.0, SolveConfig{}).contract_ok);
}

TEST_CASE("second Picard iterate against first-order perturbation theory") {
    const double lambda = 0.01;
    auto problem = airy(lambda);
    auto g = RayGrid::make(0.0, 1024, 8.0);
    auto times = chebyshev_lobatto(16, 1.0);
    IntegralOperator op(problem, g, times);
    auto F2 = op.apply(op.F0());
    const int it = static_cast<int>(times.size()) - 1;
    const double t = 1.0;
    // F1 = int_0^t e^{-p^3 (t - tau)} [1 * F0 * (-p F0)](p, tau) dtau, with 1 * (A * B) = (1 * A) * B
    auto F0 = [](double p, double tau) { return p < 1e-12 ? 0.0 : (1.0 - std::exp(-p * p * p * tau)) / (p * p); };
    auto I0 = [&](double s, double tau) { return s <= 0 ? 0.0 : gk([&](double u) { return F0(u, tau); }, 0.0, s); };
    for (double p : {0.5, 1.0, 2.0}) {
        auto N = [&](double tau) {
            return gk([&](double s) { return I0(s, tau) * (-(p - s)) * F0(p - s, tau); }, 0.0, p);
        };
        double F1 = gk([&](double tau) { return std::exp(-p * p * p * (t - tau)) * N(tau); }, 0.0, t);
        cplx delta = F2[0].eval(p, it) - op.F0()[0].eval(p, it);
        CHECK(std::abs(delta - lambda * F1) < 1e-4 * std::abs(lambda * F1));
    }
}

TEST_CASE("linear problem converges to the closed form") {
    auto sol = solve(airy(), SolveConfig{});
    CHECK(sol.report.converged);
    const auto& F = sol.F[0];
    double worst = 0.0;
    for (int it = 0; it < F.nt(); ++it)
        for (int k = 1; k <= F.M(); ++k)
            worst = std::max(worst, std::abs(F.at(k, it) - closed_form(F.grid()->node(k), F.times()[it])));
    CHECK(worst < 1e-8);
}

TEST_CASE("zero data gives the zero solution") {
    auto p = airy(0.5, 0);
    auto sol = solve(p, SolveConfig{});
    CHECK(sol.report.converged);
    CHECK(sol.report.iters <= 1);
    for (auto v : sol.F[0].values()) CHECK(v == cplx{});
}

TEST_CASE("weakly nonlinear problem contracts") {
    auto sol = solve(airy(0.01), SolveConfig{});
    const auto& r = sol.report;
    REQUIRE(r.converged);
    CHECK(r.ball_ok);
    CHECK(r.contract_ok);
    CHECK(r.residual < 2 * SolveConfig{}.tol);
    for (double q : r.contraction_ratios) {
        CHECK(q < 0.5);
        CHECK(q <= r.estimate.lipschitz + 0.05);
    }
}

TEST_CASE("contraction margins improve with nu") {
    auto p = airy(0.5);
    double prev = -1e300;
    for (double nu : {8.0, 16.0, 32.0, 64.0}) {
        auto e = estimate_contraction(p, nu, SolveConfig{});
        CHECK(e.contract_margin >= prev - 1e-12);
        prev = e.contract_margin;
    }
    auto big = estimate_contraction(p, 256.0, SolveConfig{});
    CHECK(big.ball_ok);
    CHECK(big.contract_ok);
}

TEST_CASE("resummed solution satisfies the equation") {
    for (double lambda : {0.0, 0.01}) {
        auto sol = solve(airy(lambda), SolveConfig{});
        REQUIRE(sol.report.converged);
        const auto& F = sol.F[0];
        auto f = [&](double x, double t) { return laplace_ray_at(F, x, t).value; };
        const double h = 0.1, dt = 1e-3;
        auto w1 = std::vector<double>{1.0 / 60, -3.0 / 20, 3.0 / 4, 0, -3.0 / 4, 3.0 / 20, -1.0 / 60};
        auto w3 = std::vector<double>{-7.0 / 240, 3.0 / 10, -169.0 / 120, 61.0 / 30, 0,
                                      -61.0 / 30, 169.0 / 120, -3.0 / 10, 7.0 / 240};
        for (double x : {5.0, 8.0})
            for (double t : {0.3, 0.7}) {
                cplx fx{}, fxxx{};
                for (int i = 0; i < 7; ++i) fx -= w1[i] * f(x + (i - 3) * h, t) / h;
                for (int i = 0; i < 9; ++i) fxxx += w3[i] * f(x + (i - 4) * h, t) / (h * h * h);
                cplx ft = (f(x, t + dt) - f(x, t - dt)) / (2 * dt);
                cplx res = ft - fxxx - 1.0 / (x * x) - lambda / x * f(x, t) * fx;
                double scale = 1.0 / (x * x);
                CHECK(std::abs(res) < 1e-5 * scale);
            }
        // decay like x^{-alpha_r}
        for (double x = 5; x <= 40; x *= 1.5) CHECK(std::abs(f(x, 1.0)) * x * x < 1.05);
    }
}

TEST_CASE("small-p exponent") {
    auto g = RayGrid::make(0.0, 4096, 8.0);
    auto p1 = RayGridFunction::sample(g, {0.0}, 1.0, [](cplx p, double) { return p; });
    auto e1 = small_p_exponent(p1, 0);
    CHECK(std::abs(e1.estimate - 1.0) < 0.01);
    auto one = RayGridFunction::sample(g, {0.0}, 0.0, [](cplx, double) { return cplx(1.0); });
    CHECK(std::abs(small_p_exponent(one, 0).estimate) < 0.01);
    auto cf = RayGridFunction::sample(g, {1.0}, 1.0, [](cplx p, double t) { return closed_form(p, t); });
    auto ec = small_p_exponent(cf, 0, 1.0);
    CHECK(std::abs(ec.estimate - 1.0) < 0.01);
    CHECK(ec.bound_ok);
    CHECK_FALSE(ec.inconclusive);
}

TEST_CASE("scaled solve of the linear problem matches the plain solve") {
    auto p = airy();
    ScaledSetting s;
    s.n_hat = 3;
    s.omega = {make_rational(2)};
    s.beta_i = {make_rational(3)};
    s.gamma_i = {make_rational(1)};
    s.beta = 1;
    p.setting = s;
    SolveConfig cfg;
    cfg.grid_nodes = 512;
    auto sol = solve(airy(), SolveConfig{});
    for (double t : {0.2, 0.9}) {
        auto [st, rep] = scaled_solve(p, t, cfg);
        REQUIRE(rep.converged);
        const auto& F = st.F[0];
        double worst = 0.0;
        for (int k = 1; k <= F.M(); k += 7) {
            double sv = F.grid()->node(k);
            worst = std::max(worst, std::abs(F.at(k, F.nt() - 1) - closed_form(sv * std::pow(t, -1.0 / 3), t)));
        }
        CHECK(worst < 1e-6);
        // scaled resummation reproduces f(x, t) with zeta = x t^{-1/3}
        double x = 4.0;
        cplx plain = laplace_ray_at(sol.F[0], x, t).value;
        CHECK(std::abs(scaled_resum(st, x * std::pow(t, -1.0 / 3)) - plain) < 1e-6);
    }
}

TEST_CASE("scaled solve with zero forcing") {
    auto p = harry_dym_problem(3);
    p.forcing[0] = RamifiedSeries(Side::x, p.forcing[0].ramification());
    SolveConfig cfg;
    cfg.grid_nodes = 128;
    cfg.time_nodes = 6;
    auto [st, rep] = scaled_solve(p, 0.05, cfg);
    CHECK(rep.converged);
    for (auto v : st.F[0].values()) CHECK(v == cplx{});
}

TEST_CASE("scaled setting checks") {
    auto p = harry_dym_problem(3);
    auto m = check_scaled_setting(p);
    CHECK(m.size() == p.terms.size());
    for (const auto& [label, v] : m) CHECK(v >= 0);
    auto bad = p;
    bad.setting->n_hat = 2;
    CHECK_THROWS_AS(check_scaled_setting(bad), InvalidProblem);
    auto none = airy();
    CHECK_THROWS_AS(check_scaled_setting(none), InvalidProblem);
}

}  // TEST_SUITE
