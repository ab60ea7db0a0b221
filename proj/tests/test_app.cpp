#include "borel/app.hpp"
#include "borel/harry_dym.hpp"
#include "borel/oracle.hpp"
#include "borel/problem_io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

using namespace borel;
namespace fs = std::filesystem;

namespace {

std::string problem_path(const std::string& name) { return std::string(BORELSUM_PROBLEMS) + "/" + name; }

fs::path fresh_dir(const std::string& name) {
    auto d = fs::temp_directory_path() / ("borelsum_unit_" + name);
    fs::remove_all(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int parse_error_line(const std::string& text) {
    try {
        parse_problem_text(text, "t.prob");
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

const char* kMinimal = R"([dims]
name = minimal
d = 1
n = 3
m = 1

[symbol]
0 3 -1

[forcing]
0 1 0 2

[sector]
phi = 0.4
)";

// d^j of a x^{-c}
double x_derivative(double a, double c, double x, int j) {
    double v = a * std::pow(x, -c - j);
    for (int i = 0; i < j; ++i) v *= -(c + i);
    return v;
}

}  // namespace

TEST_SUITE("app") {

TEST_CASE("minimal linear problem file") {
    auto pp = parse_problem_text(kMinimal);
    CHECK(pp.problem.n == 3);
    CHECK(pp.problem.alpha_r == 2);
    CHECK(validate_constraint(pp.problem).empty());
    CHECK(check_cone_condition(pp.problem.symbol, pp.problem.sector.phi).ok);
}

TEST_CASE("shipped problems parse") {
    for (const char* name : {"linear.prob", "weakly_nonlinear.prob", "ramified.prob", "violation.prob",
                             "quasilinear_raw.prob", "harry_dym.prob"}) {
        INFO(name);
        CHECK_NOTHROW(parse_problem(problem_path(name)));
    }
    auto v = parse_problem(problem_path("violation.prob"));
    CHECK(validate_constraint(v.problem).size() == 1);
    auto raw = parse_problem(problem_path("quasilinear_raw.prob"));
    CHECK(raw.from_raw);
    CHECK(raw.problem.m == 3);
    CHECK(validate_constraint(raw.problem).empty());
}

TEST_CASE("shipped Harry-Dym problem") {
    auto pp = parse_problem(problem_path("harry_dym.prob"));
    std::map<std::string, std::vector<Rational>> expected{
        {"none", {make_rational(4, 3), make_rational(-1)}},
        {"0:1:1", {make_rational(2)}},
        {"0:2:1", {make_rational(1)}},
        {"0:3:1", {make_rational(0)}}};
    CHECK(pp.problem.alpha_q == expected);
    REQUIRE(pp.problem.setting.has_value());
    CHECK(pp.problem.setting->n_hat == 3);
    CHECK(pp.problem.terms.size() == harry_dym_problem(3).terms.size());
}

TEST_CASE("parse errors are positional") {
    std::string bad = kMinimal;
    bad.replace(bad.find("0 1 0 2"), 7, "0 1 0 0.5");
    try {
        parse_problem_text(bad, "t.prob");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 11);
        CHECK(e.column() == 7);
        CHECK(std::string(e.what()).rfind("t.prob:11:7:", 0) == 0);
    }
    // missing [symbol]
    std::string no_symbol = kMinimal;
    no_symbol.erase(no_symbol.find("[symbol]"), std::string("[symbol]\n0 3 -1\n").size());
    CHECK_THROWS_AS(parse_problem_text(no_symbol), ParseError);
    // unknown section and unknown key
    CHECK(parse_error_line(std::string(kMinimal) + "[bogus]\nx = 1\n") == 15);
    CHECK(parse_error_line(std::string(kMinimal) + "colour = red\n") == 15);
    CHECK_THROWS_AS(parse_problem("/nonexistent/file.prob"), InvalidProblem);
}

TEST_CASE("write and parse round trip") {
    for (const char* name : {"weakly_nonlinear.prob", "ramified.prob", "harry_dym.prob"}) {
        auto a = parse_problem(problem_path(name)).problem;
        std::ostringstream out;
        write_problem(out, a);
        auto b = parse_problem_text(out.str()).problem;
        REQUIRE(a.terms.size() == b.terms.size());
        for (std::size_t i = 0; i < a.terms.size(); ++i) {
            CHECK(a.terms[i].label() == b.terms[i].label());
            for (const auto& [e, c] : a.terms[i].coeff.terms()) {
                REQUIRE(b.terms[i].coeff.terms().count(e));
                CHECK(b.terms[i].coeff.terms().at(e) == c);
            }
        }
        CHECK(a.alpha_q == b.alpha_q);
        CHECK(a.alpha_r == b.alpha_r);
    }
}

TEST_CASE("Harry-Dym series") {
    auto c = harry_dym_series(6);
    // H0 = z^{-1/2}
    REQUIRE(c.H_exact[0].terms().size() == 1);
    CHECK(c.H_exact[0].terms().at({make_rational(-1, 2)}) == 1);
    // H1 = -(1/2) z^{-3/2} - (15/8) z^{-5}
    REQUIRE(c.H_exact[1].terms().size() == 2);
    CHECK(c.H_exact[1].terms().at({make_rational(-3, 2)}) == make_rational(-1, 2));
    CHECK(c.H_exact[1].terms().at({make_rational(-5)}) == make_rational(-15, 8));
    for (int n = 0; n <= 6; ++n) {
        std::string bad;
        CHECK_MESSAGE(harry_dym_structure_ok(c.H_exact[n], n, &bad), "n=" << n << " " << bad);
    }
    // a monomial off the lattice is reported
    auto off = c.H_exact[1] + ExactPoly::monomial(1, {make_rational(-2)}, make_rational(1));
    std::string bad;
    CHECK_FALSE(harry_dym_structure_ok(off, 1, &bad));
    CHECK_FALSE(bad.empty());
    CHECK_THROWS(harry_dym_series(13));
}

TEST_CASE("Harry-Dym series against direct substitution") {
    // numeric check of H_t = -H^3/2 + H^3 H_zzz at order t^1 with finite differences in z
    auto c = harry_dym_series(2);
    auto Hn = [&](int n, double z) { return c.H[n].eval(z, 0.0).real(); };
    for (double z : {1.5, 2.0, 3.0}) {
        const double h = 1e-2;
        auto d3 = [&](const std::function<double(double)>& f) {
            // eighth-order central third derivative
            const double w[] = {-7.0 / 240, 3.0 / 10, -169.0 / 120, 61.0 / 30, 0, -61.0 / 30, 169.0 / 120, -3.0 / 10, 7.0 / 240};
            double s = 0;
            for (int i = 0; i < 9; ++i) s += w[i] * f(z + (i - 4) * h);
            return s / (h * h * h);
        };
        double H0 = Hn(0, z), H1 = Hn(1, z);
        double H0zzz = d3([&](double y) { return Hn(0, y); });
        double H1zzz = d3([&](double y) { return Hn(1, y); });
        // t^0: H1 = -H0^3/2 + H0^3 H0'''
        CHECK(H1 == doctest::Approx(-0.5 * std::pow(H0, 3) + std::pow(H0, 3) * H0zzz).epsilon(1e-7));
        // t^1: 2 H2 = -(3/2) H0^2 H1 + 3 H0^2 H1 H0''' + H0^3 H1'''
        double rhs = -1.5 * H0 * H0 * H1 + 3 * H0 * H0 * H1 * H0zzz + std::pow(H0, 3) * H1zzz;
        CHECK(2 * Hn(2, z) == doctest::Approx(rhs).epsilon(1e-6));
    }
}

TEST_CASE("Harry-Dym residual degrees") {
    for (int N : {1, 2, 3}) {
        auto r = harry_dym_residual(N);
        CHECK(r.structure_ok);
        CHECK(r.lowest_degree == N + 1);
        CHECK(r.highest_degree <= 4 * N + 1);
    }
    CHECK_THROWS(harry_dym_residual(0));
}

TEST_CASE("Harry-Dym f-equation is the substituted equation") {
    // E(f) = f_t + P(d) f - r - sum b f^k prod (d^j f)^q must equal x^2 N(g_N + x^{-2} f),
    // N(H) = H_t + H^3/2 - H^3 H_zzz, for any f; checked with f = a(t) x^{-c}.
    const int N = 2;
    auto p = harry_dym_problem(N);
    auto c = harry_dym_series(N);
    const double a0 = 0.3, a1 = -0.7, cexp = 0.4;
    auto a = [&](double t) { return a0 + a1 * t; };
    auto fdx = [&](double x, double t, int j) { return x_derivative(a(t), cexp, x, j); };
    auto xz = [](double z) { return (2.0 / 3.0) * std::pow(z, 1.5); };
    auto H = [&](double z, double t) {
        double x = xz(z);
        return c.gN.eval(x, t).real() + fdx(x, t, 0) / (x * x);
    };
    for (double x : {2.0, 3.5})
        for (double t : {0.05, 0.2}) {
            double E = x_derivative(a1, cexp, x, 0);
            for (const auto& [j, coef] : p.symbol.coeffs[0]) E += coef.real() * fdx(x, t, j.entries[0]);
            E -= p.forcing[0].eval(x, t).real();
            for (const auto& term : p.terms) {
                double v = term.coeff.eval(x, t).real() * std::pow(fdx(x, t, 0), term.k[0]);
                for (const auto& q : term.q) v *= std::pow(fdx(x, t, q.j.entries[0]), q.power);
                E -= v;
            }
            double z = std::pow(1.5 * x, 2.0 / 3.0);
            const double h = 2e-3;
            const double w[] = {-7.0 / 240, 3.0 / 10, -169.0 / 120, 61.0 / 30, 0, -61.0 / 30, 169.0 / 120, -3.0 / 10, 7.0 / 240};
            double Hzzz = 0;
            for (int i = 0; i < 9; ++i) Hzzz += w[i] * H(z + (i - 4) * h, t);
            Hzzz /= h * h * h;
            const double dt = 1e-4;
            double Ht = (H(z, t + dt) - H(z, t - dt)) / (2 * dt);
            double H0 = H(z, t);
            double Nval = Ht + 0.5 * std::pow(H0, 3) - std::pow(H0, 3) * Hzzz;
            CHECK(E == doctest::Approx(x * x * Nval).epsilon(1e-5));
        }
}

TEST_CASE("G0 profile decays like zeta^{-1/2}") {
    auto c = harry_dym_series(8);
    auto coeffs = g0_asymptotic_coeffs(c);
    REQUIRE(coeffs.size() >= 2);
    CHECK(coeffs[0] == 1);
    std::vector<double> zeta;
    for (double z = 2.0; z <= 40.0; z += 2.0) zeta.push_back(z);
    auto prof = g0_profile(c, zeta, 60.0);
    for (double g : prof.G) CHECK(std::isfinite(g));
    CHECK(prof.decay_exponent == doctest::Approx(-0.5).epsilon(0.02));
}

TEST_CASE("oracle finite-difference weights") {
    auto w = fd_weights({-4, -3, -2, -1, 0, 1, 2, 3, 4}, 3);
    const double expect[] = {-7.0 / 240, 3.0 / 10, -169.0 / 120, 61.0 / 30, 0, -61.0 / 30, 169.0 / 120, -3.0 / 10, 7.0 / 240};
    for (int i = 0; i < 9; ++i) CHECK(w[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("oracle with zero data stays zero") {
    auto p = parse_problem_text(kMinimal).problem;
    p.forcing[0] = RamifiedSeries(Side::x);
    OracleConfig oc;
    oc.dt = 1.0 / 128;
    auto r = oracle_integrate(p, oc, [](double, double) { return cplx{}; });
    for (const auto& row : r.values)
        for (auto v : row) CHECK(v == cplx{});
}

TEST_CASE("oracle against the closed-form linear solution") {
    // f(x, t) = int_0^inf e^{-p x} (1 - e^{-p^3 t}) / p^2 dp by direct quadrature
    auto p = parse_problem_text(kMinimal).problem;
    boost::math::quadrature::exp_sinh<double> es;
    std::map<std::pair<double, double>, double> cache;
    auto exact = [&](double x, double t) {
        auto key = std::make_pair(x, t);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
        double v = t == 0.0 ? 0.0 : es.integrate([&](double s) {
            return s < 1e-8 ? s * t : std::exp(-s * x) * (-std::expm1(-s * s * s * t)) / (s * s);
        });
        cache[key] = v;
        return v;
    };
    OracleConfig oc;
    oc.dt = 1.0 / 256;
    oc.output_times = {0.5, 1.0};
    auto r = oracle_integrate(p, oc, [&](double x, double t) { return cplx(exact(x, t)); });
    double worst = 0.0;
    for (std::size_t k = 0; k < r.times.size(); ++k)
        for (std::size_t i = 0; i < r.x.size(); i += 10)
            if (r.x[i] >= 5 && r.x[i] <= 20) worst = std::max(worst, std::abs(r.values[k][i] - exact(r.x[i], r.times[k])));
    CHECK(worst < 1e-7);
}

TEST_CASE("run: exit codes and artifacts") {
    auto dir = fresh_dir("check");
    auto r = run({"check", problem_path("harry_dym.prob"), dir.string(), {}});
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(dir / "check.json"));
    CHECK(fs::exists(dir / "manifest.json"));
    auto j = nlohmann::json::parse(slurp(dir / "check.json"));
    CHECK(j["constraint_ok"] == true);
    CHECK(j["cone"]["ok"] == true);

    auto dv = fresh_dir("violation");
    CHECK(run({"check", problem_path("violation.prob"), dv.string(), {}}).exit_code == 1);
    auto jv = nlohmann::json::parse(slurp(dv / "check.json"));
    CHECK(jv["violations"].size() == 1);

    auto ds = fresh_dir("solve");
    auto rs = run({"solve-borel", problem_path("linear.prob"), ds.string(), {}});
    CHECK(rs.exit_code == 0);
    auto js = nlohmann::json::parse(slurp(ds / "solve_report.json"));
    CHECK(js["report"]["converged"] == true);
    CHECK(slurp(ds / "borel_F.csv").find("ray_theta,p,t,re_F,im_F") != std::string::npos);

    auto da = fresh_dir("accelerate");
    auto ra = run({"accelerate", problem_path("linear.prob"), da.string(), {}});
    CHECK(ra.exit_code == 1);
    CHECK(ra.summary.find("certificate") != std::string::npos);

    auto du = fresh_dir("unknown");
    CHECK(run({"solve-borel", problem_path("linear.prob"), du.string(), {{"bogus", "1"}}}).exit_code == 1);
    CHECK(run({"solve-borel", problem_path("linear.prob"), du.string(), {{"grid_nodes", "abc"}}}).exit_code == 1);
    CHECK(run({"frobnicate", problem_path("linear.prob"), du.string(), {}}).exit_code == 1);

    auto dn = fresh_dir("nonconv");
    auto rn = run({"solve-borel", problem_path("weakly_nonlinear.prob"), dn.string(), {{"max_iters", "1"}, {"nu", "8"}}});
    CHECK(rn.exit_code == 2);
}

TEST_CASE("run: manifest checksums and determinism") {
    auto d1 = fresh_dir("det1"), d2 = fresh_dir("det2");
    std::map<std::string, std::string> o{{"grid_nodes", "256"}};
    REQUIRE(run({"resum", problem_path("weakly_nonlinear.prob"), d1.string(), o}).exit_code == 0);
    REQUIRE(run({"resum", problem_path("weakly_nonlinear.prob"), d2.string(), o}).exit_code == 0);
    for (const char* f : {"resum.csv", "summary.txt", "manifest.json"}) CHECK(slurp(d1 / f) == slurp(d2 / f));
    auto m = nlohmann::json::parse(slurp(d1 / "manifest.json"));
    CHECK(m["files"].size() == 2);
    for (const auto& f : m["files"]) CHECK(f["sha256"] == sha256_hex(slurp(d1 / f["name"].get<std::string>())));
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("run: normalize and series") {
    auto dn = fresh_dir("normalize");
    REQUIRE(run({"normalize", problem_path("quasilinear_raw.prob"), dn.string(), {}}).exit_code == 0);
    auto back = parse_problem((dn / "normalized.prob").string());
    CHECK(back.problem.m == 3);
    auto ds = fresh_dir("series");
    REQUIRE(run({"series", problem_path("linear.prob"), ds.string(), {{"K", "3"}}}).exit_code == 0);
    auto txt = slurp(ds / "series.txt");
    CHECK(txt.find("1 0 2 1") != std::string::npos);  // t x^-2
}

TEST_CASE("command-line front end") {
    std::string cli = BORELSUM_CLI;
    auto dir = fresh_dir("cli");
    std::string base = cli + " check --problem " + problem_path("linear.prob") + " --out " + dir.string() + " > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(base.c_str())) == 0);
    std::string missing = cli + " check --out " + dir.string() + " > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(missing.c_str())) == 1);
    std::string badset = cli + " check --problem " + problem_path("linear.prob") + " --out " + dir.string() +
                         " --set novalue > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(badset.c_str())) == 1);
    std::string threads = "BORELSUM_THREADS=0 " + base;
    CHECK(WEXITSTATUS(std::system(threads.c_str())) == 1);
}

}  // TEST_SUITE
