#include "borel/harry_dym.hpp"
#include "borel/normalize.hpp"
#include "borel/problem.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace borel;

namespace {

SymbolPolynomial symbol(int n, std::map<int, cplx> c) {
    SymbolPolynomial s;
    s.n = n;
    s.coeffs.resize(1);
    for (const auto& [j, v] : c) s.coeffs[0][MultiIndex{{j}}] = v;
    return s;
}

PDEProblem scalar_problem(int n) {
    PDEProblem p;
    p.n = n;
    p.symbol = symbol(n, {{n, (n % 2) ? -1.0 : 1.0}});
    RamifiedSeries r(Side::x);
    r.add(make_rational(2), 1.0);
    p.forcing = {r};
    p.initial = {RamifiedSeries(Side::x)};
    p.alpha_r = 2;
    p.sector.phi = 0.4;
    return p;
}

NonlinearTerm q_term(int j, int power, int k = 0) {
    NonlinearTerm t;
    t.k = {k};
    t.q = {QFactor{0, MultiIndex{{j}}, power}};
    t.coeff = RamifiedSeries(Side::x);
    t.coeff.add(make_rational(1), 1.0);
    return t;
}

ExactPoly raw_mono(int n, std::map<int, Rational> e, const Rational& c) {
    ExactPoly::Exps ex(2 + 2 * n, Rational(0));
    for (const auto& [slot, v] : e) ex[slot] = v;
    return ExactPoly::monomial(2 + 2 * n, ex, c);
}

}  // namespace

TEST_SUITE("problem") {

TEST_CASE("derivative-count constraint") {
    auto p = scalar_problem(3);
    p.terms = {q_term(1, 2)};  // (f_x)^2: 2 <= 3
    CHECK(validate_constraint(p).empty());
    p.terms = {q_term(3, 1, 3)};  // f^3 f_xxx as in Harry-Dym: 3 <= 3
    CHECK(validate_constraint(p).empty());
    p.terms = {q_term(2, 2)};  // (f_xx)^2: 4 > 3
    auto v = validate_constraint(p);
    REQUIRE(v.size() == 1);
    CHECK(v[0].weight == 4);
    CHECK(v[0].term.find("0:2:2") != std::string::npos);
}

TEST_CASE("structural checks") {
    auto p = scalar_problem(3);
    p.alpha_r = make_rational(1, 2);
    CHECK_FALSE(validate_constraint(p).empty());
    p = scalar_problem(3);
    NonlinearTerm b00;
    b00.k = {0};
    b00.coeff = RamifiedSeries(Side::x);
    b00.coeff.add(make_rational(1), 1.0);
    p.terms = {b00};
    CHECK_FALSE(validate_constraint(p).empty());
}

TEST_CASE("cone condition examples") {
    for (int n : {2, 3, 4}) {
        double phi = pi / (2 * n) - 0.01;
        auto rep = check_cone_condition(symbol(n, {{n, std::pow(-1.0, n)}}), phi);
        CHECK(rep.ok);
        CHECK(rep.C > 0.0);
        CHECK(rep.C >= std::cos(n * phi) - 1e-9);
        CHECK(rep.C <= std::cos(n * phi) + 1e-3);
    }
    CHECK_FALSE(check_cone_condition(symbol(2, {{2, -1.0}}), 0.3).ok);         // P(-p) = -p^2
    CHECK_FALSE(check_cone_condition(symbol(3, {{3, 1.0}}), 0.4).ok);          // P(-p) = -p^3
    CHECK_THROWS_AS(check_cone_condition(symbol(3, {{3, -1.0}}), pi / 4), InvalidProblem);  // beyond pi / 6
    CHECK_THROWS_AS(check_cone_condition(symbol(3, {{1, 1.0}}), 0.3), InvalidProblem);
}

TEST_CASE("cone condition is scale consistent") {
    // P(-p) = p^3 + 2 p + 1 in derivative coefficients
    std::map<int, cplx> c{{3, -1.0}, {1, -2.0}, {0, 1.0}};
    auto base = check_cone_condition(symbol(3, c), 0.4);
    REQUIRE(base.ok);
    CHECK(base.R > 0.0);
    for (double lambda : {0.25, 3.0, 40.0}) {
        std::map<int, cplx> s;
        for (const auto& [j, v] : c) s[j] = lambda * v;
        auto r = check_cone_condition(symbol(3, s), 0.4);
        CHECK(r.ok == base.ok);
        CHECK(r.R == doctest::Approx(base.R).epsilon(1e-12));
        CHECK(r.C == doctest::Approx(lambda * base.C).epsilon(1e-12));
    }
}

TEST_CASE("R bounds the lower-order part") {
    std::map<int, cplx> c{{3, -1.0}, {2, 0.5}, {1, -2.0}};
    auto rep = check_cone_condition(symbol(3, c), 0.4);
    REQUIRE(rep.ok);
    auto s = symbol(3, c);
    for (double r : {rep.R * 1.01, rep.R * 2, rep.R * 10})
        for (double a = -0.4; a <= 0.4; a += 0.05) {
            cplx p = std::polar(r, a);
            CHECK(s.eval_minus(0, p).real() >= 0.5 * rep.C * r * r * r - 1e-12);
        }
}

TEST_CASE("normalization of u_t - u_xxx + u u_x = 0") {
    RawEquation raw;
    raw.n = 3;
    raw.symbol[3] = -1;
    raw.g1 = raw_mono(3, {{RawEquation::u_slot(0), 1}, {RawEquation::u_slot(1), 1}}, -1);
    raw.g2 = ExactPoly(raw.nvars());
    raw.initial = raw_mono(3, {{RawEquation::x_slot(), -1}}, 1);
    raw.sector.phi = 0.4;
    auto p = normalize(raw);
    CHECK(p.m == 3);
    CHECK(validate_constraint(p).empty());

    // hand differentiation: d/dx(-u u_x) = -(u_x)^2 - u u_xx
    auto r1 = extended_rhs(raw, 1);
    ExactPoly expected = raw_mono(3, {{RawEquation::u_slot(1), 2}}, -1) +
                         raw_mono(3, {{RawEquation::u_slot(0), 1}, {RawEquation::u_slot(2), 1}}, -1);
    CHECK((r1 - expected).is_zero());
    // d^2/dx^2(-u u_x) = -3 u_x u_xx - u u_xxx
    auto r2 = extended_rhs(raw, 2);
    ExactPoly expected2 = raw_mono(3, {{RawEquation::u_slot(1), 1}, {RawEquation::u_slot(2), 1}}, -3) +
                          raw_mono(3, {{RawEquation::u_slot(0), 1}, {RawEquation::u_slot(3), 1}}, -1);
    CHECK((r2 - expected2).is_zero());
}

TEST_CASE("derivative-free nonlinearity stays derivative-free") {
    RawEquation raw;
    raw.n = 2;
    raw.symbol[2] = 1;
    raw.g1 = raw_mono(2, {{RawEquation::x_slot(), -2}, {RawEquation::u_slot(0), 2}}, 1);
    raw.g2 = ExactPoly(raw.nvars());
    raw.initial = ExactPoly(raw.nvars());
    raw.sector.phi = 0.3;
    auto p = normalize(raw);
    for (const auto& t : p.terms)
        for (const auto& f : t.q) CHECK(f.j.abs() == 0);
}

TEST_CASE("normalized random equations satisfy the constraint") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> pick(0, 2);
    std::uniform_int_distribution<int> coef(-3, 3);
    for (int rep = 0; rep < 6; ++rep) {
        RawEquation raw;
        raw.n = 3;
        raw.symbol[3] = -1;
        raw.g1 = ExactPoly(raw.nvars());
        for (int k = 0; k < 3; ++k) {
            int c = coef(rng);
            if (c == 0) c = 1;
            raw.g1 += raw_mono(3, {{RawEquation::x_slot(), -1 - pick(rng)}, {RawEquation::u_slot(pick(rng)), 1},
                                   {RawEquation::u_slot(pick(rng)), 1}},
                               make_rational(c, 2));
        }
        raw.g2 = raw_mono(3, {{RawEquation::x_slot(), -2}, {RawEquation::u_slot(pick(rng)), 1}}, make_rational(1, 10));
        raw.initial = raw_mono(3, {{RawEquation::x_slot(), -1}}, 1);
        raw.sector.phi = 0.4;
        auto p = normalize(raw);
        CHECK(p.m == 3);
        CHECK(validate_constraint(p).empty());
    }
}

TEST_CASE("non-quasilinear and order-one inputs are rejected") {
    RawEquation raw;
    raw.n = 3;
    raw.symbol[3] = -1;
    raw.g1 = raw_mono(3, {{RawEquation::u_slot(3), 2}}, 1);  // (u_xxx)^2 in g1
    raw.g2 = ExactPoly(raw.nvars());
    raw.initial = ExactPoly(raw.nvars());
    raw.sector.phi = 0.4;
    CHECK_THROWS_AS(normalize(raw), InvalidProblem);

    RawEquation one;
    one.n = 1;
    one.symbol[1] = 1;
    one.g1 = ExactPoly(one.nvars());
    one.g2 = ExactPoly(one.nvars());
    one.initial = ExactPoly(one.nvars());
    CHECK_THROWS_AS(normalize(one), InvalidProblem);
}

TEST_CASE("Harry-Dym alpha table") {
    auto p = harry_dym_problem(3);
    std::map<std::string, std::vector<Rational>> expected{
        {"none", {make_rational(4, 3), make_rational(-1)}},
        {"0:1:1", {make_rational(2)}},
        {"0:2:1", {make_rational(1)}},
        {"0:3:1", {make_rational(0)}}};
    CHECK(p.alpha_q == expected);
    CHECK(validate_constraint(p).empty());
    for (const auto& t : p.terms) CHECK(scaled_margin(p, t) >= 0);
    REQUIRE(setting2_omega(p).has_value());
    CHECK(*setting2_omega(p) == make_rational(7, 9));
}

TEST_CASE("data decay covers forcing and initial data") {
    auto p = scalar_problem(3);
    CHECK(data_decay(p) == 2);
    p.initial[0] = RamifiedSeries(Side::x, 2);
    p.initial[0].add(make_rational(3, 2), 1.0);
    CHECK(data_decay(p) == make_rational(3, 2));
    p.forcing[0] = RamifiedSeries(Side::x);
    p.initial[0] = RamifiedSeries(Side::x);
    CHECK(data_decay(p) == 1);
}

}  // TEST_SUITE
