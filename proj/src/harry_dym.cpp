#include "borel/harry_dym.hpp"

#include "borel/transforms.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace borel {

namespace {

Rational R(long long a, long long b = 1) { return make_rational(a, b); }

// slots of the (t, X) algebra
constexpr int T_ = 0, X_ = 1;

ExactPoly mono2(const Rational& te, const Rational& xe, const Rational& c) {
    return ExactPoly::monomial(2, {te, xe}, c);
}

ExactPoly pow3(const ExactPoly& a) { return a * a * a; }

/// H_zzz written through X = z^{3/2}: (27/8) X H_XXX + (27/8) H_XX - (3/8) X^{-1} H_X.
ExactPoly dzzz(const ExactPoly& H) {
    ExactPoly H1 = H.diff(X_), H2 = H1.diff(X_), H3 = H2.diff(X_);
    return (mono2(0, 1, R(27, 8)) * H3) + H2.scaled(R(27, 8)) - (mono2(0, -1, R(3, 8)) * H1);
}

/// N(H) = H_t + H^3/2 - H^3 H_zzz in (t, X).
ExactPoly hd_operator(const ExactPoly& H) {
    ExactPoly H3 = pow3(H);
    return H.diff(T_) + H3.scaled(R(1, 2)) - H3 * dzzz(H);
}

/// c X^e with X = 3x/2, as a coefficient of x^e.
double x_factor(const Rational& e) { return std::pow(1.5, to_double(e)); }

RamifiedSeries to_x_series(const ExactPoly& p) {
    std::map<Rational, TPoly> acc;
    for (const auto& [e, c] : p.terms()) {
        if (!is_integer(e[T_]) || e[T_] < 0) throw NumericalFailure("non-polynomial t-dependence in a coefficient");
        auto m = static_cast<std::size_t>(numerator_of(e[T_]));
        auto& tp = acc[-e[X_]];
        if (tp.size() <= m) tp.resize(m + 1);
        tp[m] += to_double(c) * x_factor(e[X_]);
    }
    RamifiedSeries s(Side::x, 3);
    for (const auto& [a, tp] : acc) s.add_relaxed(a, tp);
    return s;
}

}  // namespace

HarryDymCoeffs harry_dym_series(int N) {
    if (N < 0 || N > 12) throw InvalidProblem("harry_dym_series needs 0 <= N <= 12");
    HarryDymCoeffs out;
    out.N = N;
    // slots (t, z)
    ExactPoly H = ExactPoly::monomial(2, {R(0), R(-1, 2)}, R(1));
    out.H_exact.push_back(H.coefficient_of(0, R(0)));
    for (int n = 0; n < N; ++n) {
        ExactPoly H2 = (H * H).truncated(0, n);
        ExactPoly H3 = (H2 * H).truncated(0, n);
        ExactPoly Hzzz = H.diff(1).diff(1).diff(1);
        ExactPoly rhs = H3.scaled(R(-1, 2)) + (H3 * Hzzz).truncated(0, n);
        ExactPoly next = rhs.coefficient_of(0, Rational(n)).scaled(Rational(1) / (n + 1));
        out.H_exact.push_back(next);
        for (const auto& [e, c] : next.terms()) H.add_term({Rational(n + 1), e[0]}, c);
    }
    out.gN_X = ExactPoly(2);
    for (int n = 0; n <= N; ++n) {
        RamifiedSeries s(Side::x, 2);
        for (const auto& [e, c] : out.H_exact[n].terms()) {
            s.add(-e[0], cplx(to_double(c)));
            out.gN_X.add_term({Rational(n), e[0] * R(2, 3)}, c);
        }
        out.H.push_back(std::move(s));
    }
    out.gN = to_x_series(out.gN_X);
    return out;
}

bool harry_dym_structure_ok(const ExactPoly& Hn, int n, std::string* offending) {
    for (const auto& [e, c] : Hn.terms()) {
        // z^{1/2} H_n monomial z^{-(n + 7i/2)} with i in [0, n]
        Rational i2 = (-e[0] - R(1, 2) - n) * R(2, 7);
        if (!is_integer(i2) || i2 < 0 || i2 > n) {
            if (offending) *offending = "(" + to_string(c) + ")*z^" + to_string(e[0]);
            return false;
        }
    }
    return true;
}

HarryDymResidual harry_dym_residual(int N) {
    if (N < 1) throw InvalidProblem("harry_dym_residual needs N >= 1");
    HarryDymResidual rep;
    rep.N = N;
    auto c = harry_dym_series(N);
    rep.residual = hd_operator(c.gN_X);
    rep.structure_ok = true;
    for (const auto& [e, coeff] : rep.residual.terms()) {
        // t^m X^e = t^{-1} X^{-1/3} (t X^{-3})^i (t X^{-2/3})^l with i + l = m + 1
        Rational m = e[T_];
        Rational i7 = -3 * e[X_] - 1 - 2 * (m + 1);
        Rational i = i7 / 7;
        if (!is_integer(m) || !is_integer(i) || i < 0 || i > m + 1) {
            rep.structure_ok = false;
            if (rep.offending.empty())
                rep.offending = "(" + to_string(coeff) + ")*t^" + to_string(m) + "*X^" + to_string(e[X_]);
            continue;
        }
        ResidualMonomial rm;
        rm.degree = static_cast<int>(numerator_of(m)) + 1;
        rm.i = static_cast<int>(numerator_of(i));
        rm.l = rm.degree - rm.i;
        rm.coeff = coeff;
        rep.monomials.push_back(rm);
        rep.lowest_degree = rep.lowest_degree < 0 ? rm.degree : std::min(rep.lowest_degree, rm.degree);
        rep.highest_degree = std::max(rep.highest_degree, rm.degree);
    }
    return rep;
}

PDEProblem harry_dym_problem(int N, double phi) {
    if (N < 1) throw InvalidProblem("the Harry-Dym f-equation needs N >= 1");
    if (!(phi > 0.0) || !(phi < pi / 6)) throw InvalidProblem("the Harry-Dym sector needs 0 < phi < pi/6");
    auto c = harry_dym_series(N);
    const int V = 6;  // t, X, f, f_x, f_xx, f_xxx
    auto lift = [&](const ExactPoly& p) {
        ExactPoly r(V);
        for (const auto& [e, v] : p.terms()) r.add_term({e[0], e[1], 0, 0, 0, 0}, v);
        return r;
    };
    auto mono = [&](const Rational& xe, const Rational& cf) {
        return ExactPoly::monomial(V, {0, xe, 0, 0, 0, 0}, cf);
    };
    auto fvar = [&](int j) {
        ExactPoly::Exps e(V, Rational(0));
        e[2 + j] = 1;
        return ExactPoly::monomial(V, e, Rational(1));
    };
    // x-derivatives of g: (3/2)^j d^j/dX^j
    std::vector<ExactPoly> g(4);
    g[0] = lift(c.gN_X);
    for (int j = 1; j <= 3; ++j) g[j] = g[j - 1].diff(X_).scaled(R(3, 2));
    // u = x^{-2} f, d^m x^{-2} = (-1)^m (m+1)! x^{-2-m}, x^{-a} = (3/2)^a X^{-a}
    auto x_pow = [&](int a, const Rational& cf) {  // cf * x^{-a}
        Rational k = cf;
        for (int i = 0; i < a; ++i) k *= R(3, 2);
        return mono(Rational(-a), k);
    };
    std::vector<ExactPoly> u(4, ExactPoly(V));
    const long long binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    for (int j = 0; j <= 3; ++j)
        for (int i = 0; i <= j; ++i) {
            int m = j - i;
            long long fact = 1;
            for (int q = 2; q <= m + 1; ++q) fact *= q;
            Rational cf = R(binom[j][i] * (m % 2 ? -fact : fact));
            u[j] += x_pow(2 + m, cf) * fvar(i);
        }
    auto rhs = [&](const std::vector<ExactPoly>& H) {
        ExactPoly H3 = pow3(H[0]);
        return H3.scaled(R(-1, 2)) + mono(1, 1) * H3 * H[3] + H3.scaled(R(3, 2)) * H[2] -
               mono(-1, R(1, 4)) * H3 * H[1];
    };
    std::vector<ExactPoly> Hf(4);
    for (int j = 0; j <= 3; ++j) Hf[j] = g[j] + u[j];
    ExactPoly x2 = mono(2, R(4, 9));
    ExactPoly B = x2 * (rhs(Hf) - rhs(g)) - fvar(3);
    ExactPoly r2 = mono2(0, 2, R(-4, 9)) * hd_operator(c.gN_X);

    PDEProblem p;
    p.name = "harry_dym_N" + std::to_string(N);
    p.d = 1;
    p.n = 3;
    p.m = 1;
    p.symbol.n = 3;
    p.symbol.coeffs.resize(1);
    p.symbol.coeffs[0][MultiIndex{{3}}] = -1.0;
    p.forcing = {to_x_series(r2)};
    p.initial = {RamifiedSeries(Side::x, 3)};

    std::map<std::pair<int, int>, ExactPoly> groups;  // (k, j) -> coefficient in (t, X)
    for (const auto& [e, v] : B.terms()) {
        int k = static_cast<int>(numerator_of(e[2]));
        int j = 0;
        for (int d = 1; d <= 3; ++d) {
            if (e[2 + d] == 0) continue;
            if (j != 0 || e[2 + d] != 1) throw NumericalFailure("unexpected derivative product in the f-equation");
            j = d;
        }
        auto& gp = groups.try_emplace({k, j}, ExactPoly(2)).first->second;
        gp.add_term({e[0], e[1]}, v);
    }
    for (const auto& [kj, cp] : groups) {
        if (cp.is_zero()) continue;
        NonlinearTerm t;
        t.component = 0;
        t.k = {kj.first};
        if (kj.second > 0) t.q = {QFactor{0, MultiIndex{{kj.second}}, 1}};
        t.coeff = to_x_series(cp);
        p.terms.push_back(std::move(t));
    }
    p.ramification = {3};
    p.alpha_r = data_decay(p);
    p.sector.phi = phi;
    p.sector.rho = 0.0;
    p.sector.directions = {0.0};
    p.horizon = 1.0;

    ScaledSetting s;
    s.n_hat = 3;
    s.omega = {R(5, 3)};
    s.beta_i = {R(3), R(2, 3)};
    s.gamma_i = {R(1), R(1)};
    s.beta = R(5, 3);
    s.setting2 = true;
    p.setting = s;
    p.alpha_q = derive_alpha_table(p);
    return p;
}

std::vector<Rational> g0_asymptotic_coeffs(const HarryDymCoeffs& c) {
    std::vector<Rational> out;
    for (int i = 0; i <= c.N; ++i) {
        Rational v = 0;
        for (const auto& [e, coeff] : c.H_exact[i].terms())
            if (e[0] == R(-1, 2) - R(9, 2) * i) v = coeff;
        out.push_back(v);
    }
    return out;
}

G0Profile g0_profile(const HarryDymCoeffs& c, const std::vector<double>& zeta, double start) {
    if (zeta.empty()) throw InvalidProblem("g0_profile needs sample points");
    for (double z : zeta)
        if (!(z > 0.0) || z > start) throw InvalidProblem("g0_profile samples must lie in (0, start]");
    auto a = g0_asymptotic_coeffs(c);
    using State = std::array<double, 3>;
    State y{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        double e = -0.5 - 4.5 * i, v = to_double(a[i]);
        y[0] += v * std::pow(start, e);
        y[1] += v * e * std::pow(start, e - 1);
        y[2] += v * e * (e - 1) * std::pow(start, e - 2);
    }
    auto rhs = [](const State& s, State& d, double z) {
        d[0] = s[1];
        d[1] = s[2];
        d[2] = (-s[0] / 9.0 - 2.0 / 9.0 * z * s[1]) / (s[0] * s[0] * s[0]);
    };
    std::vector<double> order(zeta);
    std::sort(order.begin(), order.end(), std::greater<>());
    std::vector<double> times{start};
    times.insert(times.end(), order.begin(), order.end());
    std::map<double, double> got;
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
    ode::integrate_times(stepper, rhs, y, times.begin(), times.end(), -1e-3,
                         [&](const State& s, double z) { got[z] = s[0]; });
    G0Profile prof;
    prof.start = start;
    prof.zeta = zeta;
    for (double z : zeta) prof.G.push_back(got.at(z));
    // slope on the outer half of the sorted samples
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < zeta.size(); ++i) pts.push_back({zeta[i], prof.G[i]});
    std::sort(pts.begin(), pts.end());
    std::size_t from = pts.size() / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = from; i < pts.size(); ++i) {
        if (!(pts[i].second > 0.0)) continue;
        double lx = std::log(pts[i].first), ly = std::log(pts[i].second);
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly, ++n;
    }
    prof.decay_exponent = n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : std::nan("");
    return prof;
}

HarryDymScaled harry_dym_scaled(int N, double T, const std::vector<double>& zeta, const SolveConfig& config,
                                int theta_degree) {
    if (!(T > 0.0)) throw InvalidProblem("harry_dym_scaled needs T > 0");
    HarryDymScaled out;
    out.N = N;
    out.T = T;
    out.zeta = zeta;
    PDEProblem pb = harry_dym_problem(N);
    auto coeffs = harry_dym_series(N);
    const double phi = pb.sector.phi;
    out.sector_z = 2.0 / 3.0 * (pi / 2 + phi);
    out.sector_z_limit = 4.0 * pi / 9.0;

    std::vector<double> zx;
    for (double z : zeta) zx.push_back(2.0 / 3.0 * std::pow(z, 1.5));
    out.theta = theta_series(pb, zx, T, theta_degree, config);
    const auto& s = *pb.setting;
    out.f_exponent_expected = s.omega.front() / s.n_hat;

    // observed power of t in f_hat, at the zeta where the leading theta
    // coefficient dominates the first correction most: slope over the three
    // smallest theta nodes
    const double w = to_double(out.theta.omega), L = to_double(out.theta.leading);
    const double th_max = std::pow(T, w);
    std::size_t best = 0;
    double best_ratio = -1.0;
    for (std::size_t z = 0; z < zx.size(); ++z) {
        const auto& cz = out.theta.coeffs[z];
        double ratio = std::abs(cz[0]) / (std::abs(cz.size() > 1 ? cz[1] : 0.0) * th_max + 1e-300);
        if (ratio > best_ratio) best_ratio = ratio, best = z;
    }
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < out.theta.theta_nodes.size(); ++i) {
        double th = out.theta.theta_nodes[i];
        double f = std::abs(std::pow(th, L) * out.theta.samples[best][i]);
        pts.push_back({std::log(th) / w, std::log(f)});
    }
    std::sort(pts.begin(), pts.end());
    int np = std::min<int>(3, static_cast<int>(pts.size()));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < np; ++i) {
        sx += pts[i].first, sy += pts[i].second;
        sxx += pts[i].first * pts[i].first, sxy += pts[i].first * pts[i].second;
    }
    out.f_exponent_fit = (np * sxy - sx * sy) / (np * sxx - sx * sx);
    out.f_exponent_zeta = zeta[best];

    // t-exponents at fixed zeta = z t^{-2/9}: t^n z^e -> t^{n + 2e/9}; x^{-2} f -> t^{-2/3 + e_f + k omega}
    std::set<Rational> ex;
    for (int n = 0; n <= N; ++n)
        for (const auto& [e, v] : coeffs.H_exact[n].terms()) ex.insert(Rational(n) + e[0] * R(2, 9));
    // every exponent in the scaled variables is a multiple of 1/9
    Rational ef = make_rational(std::lround(9.0 * out.f_exponent_fit), 9);
    out.f_exponent_deviation = std::abs(out.f_exponent_fit - to_double(ef));
    for (int k = 0; k <= theta_degree; ++k) {
        bool nonzero = false;
        for (const auto& cz : out.theta.coeffs) nonzero |= std::abs(cz[k]) > 1e-12;
        if (nonzero) ex.insert(R(-2, 3) + ef + out.theta.omega * k);
    }
    out.exponents.assign(ex.begin(), ex.end());
    auto on_lattice = [&](int sign) {
        for (const auto& e : out.exponents) {
            Rational k = (e * 9 - sign) / 7;
            if (!is_integer(k) || k < 0) return false;
        }
        return true;
    };
    out.lattice_7k_minus_1 = on_lattice(-1);
    out.lattice_7k_plus_1 = on_lattice(+1);

    // G_0: series part plus the leading f coefficient
    auto a = g0_asymptotic_coeffs(coeffs);
    double start = 4.0 * *std::max_element(zeta.begin(), zeta.end());
    auto prof = g0_profile(coeffs, zeta, start);
    for (std::size_t z = 0; z < zeta.size(); ++z) {
        double ser = 0;
        for (std::size_t i = 0; i < a.size(); ++i) ser += to_double(a[i]) * std::pow(zeta[z], -0.5 - 4.5 * i);
        double g0 = ser + std::real(out.theta.coeffs[z][0]) / (zx[z] * zx[z]);
        out.G0_numeric.push_back(g0);
        out.G0_ode.push_back(prof.G[z]);
        out.G0_max_diff = std::max(out.G0_max_diff, std::abs(g0 - prof.G[z]));
    }
    return out;
}

}  // namespace borel
