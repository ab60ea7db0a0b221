#include "borel/normalize.hpp"

#include <numeric>

namespace borel {

ExactPoly total_derivative(const ExactPoly& e, int n) {
    const int nv = e.nvars();
    ExactPoly out = e.diff(RawEquation::x_slot());
    for (int j = 0; j + 1 < 2 * n; ++j) {
        int s = RawEquation::u_slot(j);
        if (!e.depends_on(s)) continue;
        ExactPoly::Exps up(nv, Rational(0));
        up[RawEquation::u_slot(j + 1)] = 1;
        out += e.diff(s) * ExactPoly::monomial(nv, up, 1);
    }
    if (e.depends_on(RawEquation::u_slot(2 * n - 1)))
        throw InvalidProblem("derivative order exceeds the extended-system range");
    return out;
}

namespace {

void require_quasilinear(const ExactPoly& g, int n, const char* name) {
    for (int j = n; j < 2 * n; ++j)
        if (g.depends_on(RawEquation::u_slot(j)))
            throw InvalidProblem(std::string("non-quasilinear input: ") + name + " depends on d^" +
                                 std::to_string(j) + " u (order >= n)");
    for (const auto& [e, c] : g.terms()) {
        if (!is_integer(e[RawEquation::t_slot()]) || e[RawEquation::t_slot()] < 0)
            throw InvalidProblem(std::string(name) + ": t exponents must be nonnegative integers");
        for (int j = 0; j < 2 * n; ++j) {
            const auto& a = e[RawEquation::u_slot(j)];
            if (!is_integer(a) || a < 0)
                throw InvalidProblem(std::string(name) + ": powers of u must be nonnegative integers");
        }
    }
}

}  // namespace

ExactPoly extended_rhs(const RawEquation& raw, int l) {
    const int nv = raw.nvars();
    ExactPoly::Exps un(nv, Rational(0));
    un[RawEquation::u_slot(raw.n)] = 1;
    ExactPoly e = raw.g1 - raw.g2 * ExactPoly::monomial(nv, un, 1);
    for (int i = 0; i < l; ++i) e = total_derivative(e, raw.n);
    return e;
}

PDEProblem normalize(const RawEquation& raw) {
    const int n = raw.n;
    if (n < 2) throw InvalidProblem("order n = " + std::to_string(n) + " is excluded (n > 1 required)");
    if (raw.g1.nvars() != raw.nvars() || raw.g2.nvars() != raw.nvars())
        throw InvalidProblem("raw equation polynomials have the wrong variable layout");
    require_quasilinear(raw.g1, n, "g1");
    require_quasilinear(raw.g2, n, "g2");
    for (const auto& [e, c] : raw.initial.terms())
        for (int j = 0; j < 2 * n; ++j)
            if (e[RawEquation::u_slot(j)] != 0 || e[RawEquation::t_slot()] != 0)
                throw InvalidProblem("initial data must depend on x only");

    PDEProblem p;
    p.d = 1;
    p.n = n;
    p.m = n;
    p.horizon = raw.horizon;
    p.epsilon = raw.epsilon;
    p.rho0 = raw.rho0;
    p.sector = raw.sector;
    p.symbol.n = n;
    p.symbol.coeffs.resize(n);
    for (int c = 0; c < n; ++c)
        for (const auto& [j, v] : raw.symbol)
            if (v != 0) p.symbol.coeffs[c][MultiIndex{{j}}] = cplx(to_double(v), 0.0);

    int ram = 1;
    auto to_series = [&](const std::map<Rational, std::map<int, Rational>>& acc) {
        RamifiedSeries s(Side::x, 1);
        for (const auto& [ex, tp] : acc) {
            int deg = tp.rbegin()->first;
            TPoly c(deg + 1, cplx{});
            for (const auto& [a, v] : tp) c[a] = to_double(v);
            s.add_relaxed(ex, c);
        }
        ram = std::lcm(ram, s.ramification());
        return s;
    };

    p.forcing.resize(n);
    p.initial.resize(n);
    // key: (k vector, sorted q factors)
    using Key = std::pair<std::vector<int>, std::vector<QFactor>>;
    for (int l = 0; l < n; ++l) {
        ExactPoly e = extended_rhs(raw, l);
        std::map<Key, std::map<Rational, std::map<int, Rational>>> groups;
        std::map<Rational, std::map<int, Rational>> forcing;
        for (const auto& [ex, c] : e.terms()) {
            std::vector<int> k(n, 0);
            std::vector<QFactor> q;
            bool free = true;
            for (int j = 0; j < 2 * n; ++j) {
                int a = static_cast<int>(numerator_of(ex[RawEquation::u_slot(j)]));
                if (a == 0) continue;
                free = false;
                if (j < n)
                    k[j] += a;
                else
                    q.push_back(QFactor{n - 1, MultiIndex{{j - n + 1}}, a});
            }
            Rational xexp = -ex[RawEquation::x_slot()];
            int tdeg = static_cast<int>(numerator_of(ex[RawEquation::t_slot()]));
            auto& slot = free ? forcing[xexp][tdeg] : groups[{k, q}][xexp][tdeg];
            slot += c;
        }
        p.forcing[l] = to_series(forcing);
        for (const auto& [key, acc] : groups) {
            NonlinearTerm t;
            t.component = l;
            t.k = key.first;
            t.q = key.second;
            t.coeff = to_series(acc);
            if (!t.coeff.empty()) p.terms.push_back(std::move(t));
        }
        // f_{l,I} = d^l u_I
        ExactPoly ui = raw.initial;
        for (int i = 0; i < l; ++i) ui = ui.diff(RawEquation::x_slot());
        std::map<Rational, std::map<int, Rational>> init;
        for (const auto& [ex, c] : ui.terms()) init[-ex[RawEquation::x_slot()]][0] += c;
        p.initial[l] = to_series(init);
    }
    p.ramification = {ram};
    for (const auto& t : p.terms) {
        auto& al = p.alpha_q[t.q_key()];
        Rational a = t.coeff.min_exponent();
        if (al.empty() || a < al.front()) al = {a};
    }
    p.alpha_r = data_decay(p);
    return p;
}

}  // namespace borel
