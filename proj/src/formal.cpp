#include "borel/formal.hpp"

#include <algorithm>
#include <cmath>

namespace borel {

namespace {

RamifiedSeries power_series(const RamifiedSeries& s, int k, int kt, const Rational& cap) {
    RamifiedSeries r(Side::x, s.ramification());
    r.add(0, TPoly{1.0});
    for (int i = 0; i < k; ++i) r = multiply_series(r, s, kt, &cap);
    return r;
}

RamifiedSeries dx(const RamifiedSeries& s, int j) {
    RamifiedSeries r = s;
    for (int i = 0; i < j; ++i) r = differentiate_x(r);
    return r;
}

RamifiedSeries capped(const RamifiedSeries& s, const Rational& cap) {
    RamifiedSeries r(Side::x, s.ramification());
    for (const auto& [e, c] : s.terms())
        if (e <= cap) r.add(e, c);
    return r;
}

TPoly truncate(TPoly p, int kt) {
    if (static_cast<int>(p.size()) > kt + 1) p.resize(kt + 1);
    return p;
}

}  // namespace

std::vector<RamifiedSeries> formal_rhs(const PDEProblem& problem, const std::vector<RamifiedSeries>& f,
                                       int kt, const Rational& cap) {
    std::vector<RamifiedSeries> out;
    for (int c = 0; c < problem.m; ++c) {
        RamifiedSeries acc = capped(problem.forcing.at(c), cap);
        for (const auto& [j, v] : problem.symbol.coeffs.at(c)) {
            if (j.abs() == 0) continue;
            acc = acc + capped(dx(f[c], j.abs()), cap).scaled(-v);
        }
        out.push_back(acc);
    }
    for (const auto& t : problem.terms) {
        RamifiedSeries prod = capped(t.coeff, cap);
        for (int l = 0; l < problem.m; ++l)
            if (t.k[l] > 0) prod = multiply_series(prod, power_series(f[l], t.k[l], kt, cap), kt, &cap);
        for (const auto& q : t.q)
            prod = multiply_series(prod, power_series(dx(f[q.l], q.j.abs()), q.power, kt, cap), kt, &cap);
        out[t.component] = out[t.component] + prod;
    }
    return out;
}

FormalSeriesResult formal_series_solve(const PDEProblem& problem, int K, int kt) {
    if (problem.d != 1) throw InvalidProblem("formal series solver supports d = 1 only");
    if (K < 1) throw InvalidProblem("order K must be >= 1");
    const int m = problem.m;
    FormalSeriesResult res;
    res.requested = K;
    int ram = problem.ramification.empty() ? 1 : problem.ramification[0];
    std::vector<RamifiedSeries> f(m, RamifiedSeries(Side::x, ram));

    std::optional<Rational> seed;
    auto consider = [&](const RamifiedSeries& s) {
        if (!s.empty() && (!seed || s.min_exponent() < *seed)) seed = s.min_exponent();
    };
    for (const auto& s : problem.forcing) consider(s);
    for (const auto& s : problem.initial) consider(s);
    if (!seed) {
        res.complete = true;
        res.components = f;
        res.note = "zero data: the formal solution vanishes";
        return res;
    }
    const Rational cap = *seed + 2 * K;
    const double tol = 1e-13;

    std::optional<Rational> last;
    while (res.achieved < K) {
        auto rhs = formal_rhs(problem, f, kt, cap);
        // smallest exponent where the current coefficients fail their ODE
        std::optional<Rational> next;
        for (int c = 0; c < m; ++c) {
            std::map<Rational, bool> cand;
            for (const auto& [e, v] : rhs[c].terms()) cand[e] = true;
            for (const auto& [e, v] : problem.initial[c].terms()) cand[e] = true;
            for (const auto& [e, v] : f[c].terms()) cand[e] = true;
            cplx c0 = problem.symbol.constant_term(c);
            for (const auto& [e, unused] : cand) {
                if (next && e >= *next) break;
                TPoly R = rhs[c].terms().count(e) ? rhs[c].terms().at(e) : TPoly{};
                TPoly A = f[c].terms().count(e) ? f[c].terms().at(e) : TPoly{};
                cplx a0 = problem.initial[c].terms().count(e) ? problem.initial[c].terms().at(e)[0] : cplx{};
                double scale = 1.0;
                for (auto v : R) scale = std::max(scale, std::abs(v));
                bool bad = std::abs((A.empty() ? cplx{} : A[0]) - a0) > tol * scale;
                for (int k = 0; k < kt && !bad; ++k) {
                    cplx lhs = (k + 1 < static_cast<int>(A.size()) ? A[k + 1] * double(k + 1) : cplx{}) +
                               c0 * (k < static_cast<int>(A.size()) ? A[k] : cplx{});
                    cplx r = k < static_cast<int>(R.size()) ? R[k] : cplx{};
                    bad = std::abs(lhs - r) > tol * scale;
                }
                if (bad) {
                    next = e;
                    break;
                }
            }
        }
        if (!next) {
            res.complete = true;
            res.note = "no further nonzero orders below x^{-" + to_string(cap) + "}";
            break;
        }
        if (last && *next <= *last) {
            res.note = "decay exponent failed to increase at order x^{-" + to_string(*next) +
                       "}; achieved depth " + std::to_string(res.achieved);
            break;
        }
        for (int c = 0; c < m; ++c) {
            TPoly R = rhs[c].terms().count(*next) ? rhs[c].terms().at(*next) : TPoly{};
            cplx a0 = problem.initial[c].terms().count(*next) ? problem.initial[c].terms().at(*next)[0] : cplx{};
            cplx c0 = problem.symbol.constant_term(c);
            TPoly A(kt + 1, cplx{});
            A[0] = a0;
            for (int k = 0; k < kt; ++k) {
                cplx r = k < static_cast<int>(R.size()) ? R[k] : cplx{};
                A[k + 1] = (r - c0 * A[k]) / double(k + 1);
            }
            // replace the coefficient at this order
            TPoly old = f[c].terms().count(*next) ? f[c].terms().at(*next) : TPoly{};
            f[c].add_relaxed(*next, tpoly_add(truncate(A, kt), tpoly_scale(old, -1.0)));
        }
        res.exponents.push_back(*next);
        last = next;
        ++res.achieved;
    }
    res.components = f;
    return res;
}

}  // namespace borel
