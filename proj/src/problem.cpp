#include "borel/problem.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace borel {

int MultiIndex::abs() const { return std::accumulate(entries.begin(), entries.end(), 0); }

namespace {

cplx monomial_minus(const MultiIndex& j, const std::vector<cplx>& p) {
    cplx v = 1.0;
    for (std::size_t i = 0; i < j.entries.size(); ++i)
        for (int e = 0; e < j.entries[i]; ++e) v *= -p.at(i);
    return v;
}

}  // namespace

cplx SymbolPolynomial::eval_minus(int component, const std::vector<cplx>& p) const {
    cplx v{};
    for (const auto& [j, c] : coeffs.at(component)) v += c * monomial_minus(j, p);
    return v;
}

cplx SymbolPolynomial::principal_minus(int component, const std::vector<cplx>& p) const {
    cplx v{};
    for (const auto& [j, c] : coeffs.at(component))
        if (j.abs() == n) v += c * monomial_minus(j, p);
    return v;
}

cplx SymbolPolynomial::constant_term(int component) const {
    for (const auto& [j, c] : coeffs.at(component))
        if (j.abs() == 0) return c;
    return 0.0;
}

int SymbolPolynomial::dimension() const {
    for (const auto& comp : coeffs)
        for (const auto& [j, c] : comp) return static_cast<int>(j.entries.size());
    return 1;
}

int NonlinearTerm::k_abs() const { return std::accumulate(k.begin(), k.end(), 0); }

int NonlinearTerm::q_abs() const {
    int s = 0;
    for (const auto& f : q) s += f.power;
    return s;
}

int NonlinearTerm::derivative_weight() const {
    int s = 0;
    for (const auto& f : q) s += f.j.abs() * f.power;
    return s;
}

std::string NonlinearTerm::q_key() const {
    if (q.empty()) return "none";
    auto sorted = q;
    std::sort(sorted.begin(), sorted.end());
    std::ostringstream out;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i) out << ';';
        out << sorted[i].l << ':';
        for (std::size_t a = 0; a < sorted[i].j.entries.size(); ++a) {
            if (a) out << ',';
            out << sorted[i].j.entries[a];
        }
        out << ':' << sorted[i].power;
    }
    return out.str();
}

std::string NonlinearTerm::label() const {
    std::ostringstream out;
    out << "eq" << component << " k=";
    for (std::size_t i = 0; i < k.size(); ++i) out << (i ? "," : "") << k[i];
    out << " q=" << q_key();
    return out.str();
}

std::vector<Violation> validate_constraint(const PDEProblem& problem) {
    std::vector<Violation> out;
    for (const auto& t : problem.terms) {
        int w = t.derivative_weight();
        if (w > problem.n)
            out.push_back({t.label(), w,
                           "sum |j| q = " + std::to_string(w) + " exceeds n = " + std::to_string(problem.n)});
        if (t.q.empty() && t.k_abs() == 0)
            out.push_back({t.label(), 0, "b_{0,0} must be absent (move it to the forcing)"});
        if (t.component < 0 || t.component >= problem.m)
            out.push_back({t.label(), w, "component index out of range"});
        if (static_cast<int>(t.k.size()) != problem.m)
            out.push_back({t.label(), w, "k has length " + std::to_string(t.k.size()) + ", expected m"});
        for (const auto& f : t.q) {
            if (f.l < 0 || f.l >= problem.m || f.power < 1 ||
                static_cast<int>(f.j.entries.size()) != problem.d ||
                std::any_of(f.j.entries.begin(), f.j.entries.end(), [](int e) { return e < 0; }))
                out.push_back({t.label(), w, "malformed q factor"});
        }
    }
    if (problem.alpha_r < 1)
        out.push_back({"forcing", 0, "alpha_r = " + to_string(problem.alpha_r) + " < 1"});
    if (problem.n < 2) out.push_back({"symbol", problem.n, "order n = 1 is excluded (n > 1 required)"});
    return out;
}

namespace {

// deterministic points of B = {|p| = 1, max |arg p_i| <= phi}
std::vector<std::vector<cplx>> cone_samples(int d, double phi, int count) {
    std::vector<std::vector<cplx>> pts;
    if (d == 1) {
        for (int k = 0; k < count; ++k) {
            double psi = -phi + 2.0 * phi * k / (count - 1);
            pts.push_back({std::polar(1.0, psi)});
        }
        return pts;
    }
    int g = std::max(3, static_cast<int>(std::floor(std::pow(static_cast<double>(count), 1.0 / (2 * d)))) + 1);
    std::vector<int> idx(2 * d, 0);
    while (true) {
        std::vector<double> mod(d);
        double norm = 0.0;
        for (int i = 0; i < d; ++i) {
            mod[i] = static_cast<double>(idx[i]) / (g - 1);
            norm += mod[i] * mod[i];
        }
        if (norm > 0.0) {
            norm = std::sqrt(norm);
            std::vector<cplx> p(d);
            for (int i = 0; i < d; ++i) {
                double psi = -phi + 2.0 * phi * idx[d + i] / (g - 1);
                p[i] = std::polar(mod[i] / norm, psi);
            }
            pts.push_back(std::move(p));
        }
        int a = 0;
        while (a < 2 * d && ++idx[a] == g) idx[a++] = 0;
        if (a == 2 * d) break;
    }
    return pts;
}

}  // namespace

ConeReport check_cone_condition(const SymbolPolynomial& symbol, double phi, int sample_count) {
    if (symbol.n < 2) throw InvalidProblem("order n = " + std::to_string(symbol.n) + " is excluded (n > 1 required)");
    if (!(phi > 0.0 && phi < pi / (2.0 * symbol.n)))
        throw InvalidProblem("sector angle must lie in (0, pi/(2n))");
    if (sample_count < 64) throw InvalidProblem("cone check needs at least 64 samples");
    const int d = symbol.dimension();
    const int m = static_cast<int>(symbol.coeffs.size());
    for (int c = 0; c < m; ++c) {
        bool any = false;
        for (const auto& [j, v] : symbol.coeffs[c])
            if (j.abs() == symbol.n && v != cplx{}) any = true;
        if (!any)
            throw InvalidProblem("degenerate symbol: component " + std::to_string(c) +
                                 " has no nonzero principal coefficient");
    }

    ConeReport rep;
    rep.C = std::numeric_limits<double>::infinity();
    const auto pts = cone_samples(d, phi, sample_count);
    for (int c = 0; c < m; ++c)
        for (const auto& p : pts) {
            double v = symbol.principal_minus(c, p).real();
            if (v < rep.C) {
                rep.C = v;
                rep.worst_component = c;
                rep.worst_ray = std::arg(p[0]);
            }
        }
    rep.ok = rep.C > 1e-9;
    if (!rep.ok) {
        rep.message = "Re P_n(-p) <= 0 at arg p = " + std::to_string(rep.worst_ray);
        return rep;
    }
    // R for margin C/2: sum_{|j|<n} |c_j| r^{|j|-n} <= C/2, left side decreasing in r
    for (int c = 0; c < m; ++c) {
        auto lower = [&](double r) {
            double s = 0.0;
            for (const auto& [j, v] : symbol.coeffs[c])
                if (j.abs() < symbol.n) s += std::abs(v) * std::pow(r, j.abs() - symbol.n);
            return s;
        };
        if (lower(1.0) == 0.0) continue;
        double lo = 0.0, hi = 1.0;
        while (lower(hi) > rep.C / 2.0) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            (lower(mid) > rep.C / 2.0 ? lo : hi) = mid;
        }
        rep.R = std::max(rep.R, hi);
    }
    rep.message = "cone condition holds";
    return rep;
}

Rational data_decay(const PDEProblem& problem) {
    std::optional<Rational> best;
    for (const auto* side : {&problem.forcing, &problem.initial})
        for (const auto& f : *side)
            if (!f.empty() && (!best || f.min_exponent() < *best)) best = f.min_exponent();
    return best.value_or(Rational(1));
}

Rational scaled_margin(const PDEProblem& problem, const NonlinearTerm& term) {
    if (!problem.setting) throw InvalidProblem("problem has no scaled setting");
    const auto& s = *problem.setting;
    auto it = problem.alpha_q.find(term.q_key());
    if (it == problem.alpha_q.end() || it->second.empty())
        throw InvalidProblem("alpha table has no entry for q = " + term.q_key());
    Rational w1 = s.omega.at(0);
    return s.n_hat + w1 * (term.q_abs() - 1) - it->second.front() + (w1 - s.beta) * term.k_abs() -
           s.n_hat / problem.n * term.derivative_weight();
}

std::optional<Rational> setting2_omega(const PDEProblem& problem) {
    if (!problem.setting) return std::nullopt;
    const auto& s = *problem.setting;
    std::vector<Rational> nums;
    for (const auto& t : problem.terms) nums.push_back(scaled_margin(problem, t));
    for (std::size_t j = 1; j < s.omega.size(); ++j) nums.push_back(s.omega[j] - s.omega[0]);
    for (const auto& [key, al] : problem.alpha_q)
        for (std::size_t j = 1; j < al.size(); ++j) nums.push_back(al[0] - al[j]);
    for (std::size_t j = 1; j < s.beta_i.size(); ++j) nums.push_back(problem.n * s.gamma_i.at(j) - s.beta_i[j]);
    BigInt L = 1;
    for (const auto& x : nums) {
        if (x < 0) return std::nullopt;
        BigInt den = denominator_of(x);
        L = L / boost::multiprecision::gcd(L, den) * den;
    }
    BigInt g = 0;
    for (const auto& x : nums) {
        if (x == 0) continue;
        BigInt num = numerator_of(x) * (L / denominator_of(x));
        g = boost::multiprecision::gcd(g, num);
    }
    if (g == 0) return std::nullopt;
    return Rational(g, L) / problem.n;
}

std::map<std::string, std::vector<Rational>> derive_alpha_table(const PDEProblem& problem) {
    if (!problem.setting) throw InvalidProblem("alpha table needs the scaled setting");
    const auto& s = *problem.setting;
    const int K = static_cast<int>(s.beta_i.size());
    std::map<std::string, std::set<Rational>> bases;
    std::map<std::string, std::vector<std::pair<Rational, int>>> rest;  // shifted exponent, t-degree
    for (const auto& t : problem.terms) {
        Rational shift = s.beta * t.k_abs();
        for (const auto& [a, tp] : t.coeff.terms())
            for (std::size_t m = 0; m < tp.size(); ++m) {
                if (tp[m] == cplx{}) continue;
                if (m == 0)
                    bases[t.q_key()].insert(a - shift);
                else
                    rest[t.q_key()].push_back({a - shift, static_cast<int>(m)});
            }
    }
    // candidate bases e - sum beta_i n_i over sum gamma_i n_i = m
    std::function<void(int, const Rational&, const Rational&, std::vector<Rational>&)> enumerate =
        [&](int i, const Rational& left, const Rational& e, std::vector<Rational>& out) {
            if (i == K) {
                if (left == 0) out.push_back(e);
                return;
            }
            for (int ni = 0; s.gamma_i[i] * ni <= left; ++ni)
                enumerate(i + 1, left - s.gamma_i[i] * ni, e - s.beta_i[i] * ni, out);
        };
    for (auto& [key, list] : rest) {
        auto& b = bases[key];
        for (const auto& [e, m] : list) {
            std::vector<Rational> cand;
            enumerate(0, Rational(m), e, cand);
            if (cand.empty())
                throw InvalidProblem("coefficient monomial t^" + std::to_string(m) + " x^-" + to_string(e) +
                                     " of q = " + key + " is not a polynomial in the setting variables");
            bool fits = std::any_of(cand.begin(), cand.end(), [&](const Rational& c) { return b.count(c) > 0; });
            if (!fits) b.insert(*std::min_element(cand.begin(), cand.end()));
        }
    }
    std::map<std::string, std::vector<Rational>> out;
    for (const auto& [key, b] : bases) out[key] = std::vector<Rational>(b.rbegin(), b.rend());
    return out;
}

}  // namespace borel
