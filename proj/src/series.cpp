#include "borel/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace borel {

TPoly tpoly_add(const TPoly& a, const TPoly& b) {
    TPoly r(std::max(a.size(), b.size()), cplx{});
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;
}

TPoly tpoly_mul(const TPoly& a, const TPoly& b, int max_degree) {
    if (a.empty() || b.empty()) return {};
    std::size_t n = std::min<std::size_t>(a.size() + b.size() - 1, max_degree + 1);
    TPoly r(n, cplx{});
    for (std::size_t i = 0; i < a.size() && i < n; ++i)
        for (std::size_t j = 0; j < b.size() && i + j < n; ++j) r[i + j] += a[i] * b[j];
    return r;
}

TPoly tpoly_scale(const TPoly& a, cplx s) {
    TPoly r(a);
    for (auto& c : r) c *= s;
    return r;
}

cplx tpoly_eval(const TPoly& a, double t) {
    cplx v{};
    for (std::size_t i = a.size(); i-- > 0;) v = v * t + a[i];
    return v;
}

bool tpoly_is_zero(const TPoly& a, double tol) {
    return std::all_of(a.begin(), a.end(), [tol](cplx c) { return std::abs(c) <= tol; });
}

void RamifiedSeries::add(const Rational& exponent, const TPoly& coeff) {
    if (ramification_ % static_cast<int>(denominator_of(exponent)) != 0)
        throw InvalidProblem("exponent " + to_string(exponent) +
                             " not on the 1/" + std::to_string(ramification_) + " lattice");
    auto& slot = terms_[exponent];
    slot = tpoly_add(slot, coeff);
    while (!slot.empty() && slot.back() == cplx{}) slot.pop_back();
    if (slot.empty()) terms_.erase(exponent);
}

void RamifiedSeries::add_relaxed(const Rational& exponent, const TPoly& coeff) {
    int den = static_cast<int>(denominator_of(exponent));
    ramification_ = std::lcm(ramification_, den);
    add(exponent, coeff);
}

Rational RamifiedSeries::min_exponent() const {
    if (terms_.empty()) throw InvalidProblem("empty series has no leading exponent");
    return terms_.begin()->first;
}

int RamifiedSeries::t_degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) d = std::max<int>(d, static_cast<int>(c.size()) - 1);
    return d;
}

cplx RamifiedSeries::eval(cplx z, double t) const {
    cplx v{};
    for (const auto& [e, c] : terms_) {
        double a = to_double(e);
        cplx zp = side_ == Side::x ? std::pow(z, -a) : std::pow(z, a);
        if (a == 0.0) zp = 1.0;
        v += tpoly_eval(c, t) * zp;
    }
    return v;
}

RamifiedSeries RamifiedSeries::operator+(const RamifiedSeries& o) const {
    if (o.side_ != side_) throw InvalidProblem("adding series with different variable tags");
    RamifiedSeries r(side_, std::lcm(ramification_, o.ramification_));
    for (const auto& [e, c] : terms_) r.add(e, c);
    for (const auto& [e, c] : o.terms_) r.add(e, c);
    return r;
}

RamifiedSeries RamifiedSeries::scaled(cplx s) const {
    RamifiedSeries r(side_, ramification_);
    for (const auto& [e, c] : terms_) r.add(e, tpoly_scale(c, s));
    return r;
}

RamifiedMonomial borel_of_monomial(const Rational& alpha) {
    if (alpha <= 0)
        throw DomainError("x^{-" + to_string(alpha) + "} has no Borel transform (exponent <= 0)");
    double a = to_double(alpha);
    double g = a > 170.0 ? std::exp(-std::lgamma(a)) : 1.0 / std::tgamma(a);
    return {alpha - 1, TPoly{cplx(g, 0.0)}};
}

RamifiedSeries borel_transform(const RamifiedSeries& x_series) {
    if (x_series.side() != Side::x) throw InvalidProblem("Borel transform expects an x-side series");
    RamifiedSeries r(Side::p, x_series.ramification());
    for (const auto& [e, c] : x_series.terms()) {
        auto m = borel_of_monomial(e);
        r.add(m.exponent, tpoly_scale(c, m.coeff[0]));
    }
    return r;
}

double beta_factor(double a, double b) {
    return std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0));
}

RamifiedSeries convolve_series(const RamifiedSeries& a, const RamifiedSeries& b, int max_t_degree) {
    if (a.side() != Side::p || b.side() != Side::p)
        throw InvalidProblem("convolution requires p-side series");
    if (a.ramification() != b.ramification())
        throw InvalidProblem("convolution requires equal ramification");
    RamifiedSeries r(Side::p, a.ramification());
    for (const auto& [ea, ca] : a.terms())
        for (const auto& [eb, cb] : b.terms()) {
            if (ea <= -1 || eb <= -1) throw DomainError("p-side exponent <= -1 is not integrable");
            double f = beta_factor(to_double(ea), to_double(eb));
            r.add(ea + eb + 1, tpoly_scale(tpoly_mul(ca, cb, max_t_degree), f));
        }
    return r;
}

RamifiedSeries multiply_series(const RamifiedSeries& a, const RamifiedSeries& b, int max_t_degree,
                               const Rational* exponent_cap) {
    if (a.side() != Side::x || b.side() != Side::x)
        throw InvalidProblem("multiply_series expects x-side series");
    RamifiedSeries r(Side::x, std::lcm(a.ramification(), b.ramification()));
    for (const auto& [ea, ca] : a.terms())
        for (const auto& [eb, cb] : b.terms()) {
            Rational e = ea + eb;
            if (exponent_cap && e > *exponent_cap) continue;
            r.add(e, tpoly_mul(ca, cb, max_t_degree));
        }
    return r;
}

RamifiedSeries differentiate_x(const RamifiedSeries& a) {
    if (a.side() != Side::x) throw InvalidProblem("differentiate_x expects an x-side series");
    RamifiedSeries r(Side::x, a.ramification());
    // d/dx x^{-e} = -e x^{-e-1}
    for (const auto& [e, c] : a.terms())
        if (e != 0) r.add(e + 1, tpoly_scale(c, -to_double(e)));
    return r;
}

std::string serialize(const RamifiedSeries& s) {
    std::ostringstream out;
    char buf[96];
    for (const auto& [e, c] : s.terms())
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (c[k] == cplx{}) continue;
            std::snprintf(buf, sizeof buf, "%.17g %.17g ", c[k].real(), c[k].imag());
            out << buf << to_string(e);
            if (k > 0) out << ' ' << k;
            out << '\n';
        }
    return out.str();
}

RamifiedSeries deserialize(const std::string& text, Side side, int ramification) {
    RamifiedSeries r(side, ramification);
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        double re, im;
        std::string ex;
        if (!(ls >> re >> im >> ex)) continue;
        auto e = parse_rational(ex);
        if (!e) throw InvalidProblem("line " + std::to_string(lineno) + ": bad exponent '" + ex + "'");
        int k = 0;
        ls >> k;
        TPoly c(k + 1, cplx{});
        c[k] = cplx(re, im);
        r.add(*e, c);
    }
    return r;
}

namespace {

cplx principal_pow(cplx z, double e) {
    if (e == 0.0) return 1.0;
    return std::exp(e * std::log(z));
}

}  // namespace

Decomposition decompose_ramified(const SheetSamples& samples, const std::vector<int>& N,
                                 double warn_threshold) {
    const std::size_t d = N.size();
    const std::size_t nn = samples.nodes.size();
    for (const auto& [sheet, vals] : samples.values) {
        if (sheet.size() != d) throw InvalidProblem("sheet index has wrong dimension");
        if (vals.size() != nn) throw InvalidProblem("sheets sampled at different node counts");
    }
    std::size_t total = 1;
    for (int n : N) total *= static_cast<std::size_t>(n);
    if (samples.values.size() != total)
        throw InvalidProblem("decomposition needs samples on all " + std::to_string(total) + " sheets");

    Decomposition dec;
    auto table = samples.values;
    for (std::size_t i = 0; i < d; ++i) {
        const int n = N[i];
        std::map<std::vector<int>, std::vector<cplx>> next;
        for (const auto& [idx, vals] : table) {
            if (idx[i] != 0) continue;
            std::vector<std::vector<cplx>> V(n);
            for (int j = 0; j < n; ++j) {
                auto key = idx;
                key[i] = j;
                V[j] = table.at(key);
            }
            for (int k = 0; k < n; ++k) {
                std::vector<cplx> C(nn, cplx{});
                for (std::size_t a = 0; a < nn; ++a) {
                    cplx acc{};
                    for (int j = 0; j < n; ++j)
                        acc += std::polar(1.0, -2.0 * pi * j * k / n) * V[j][a];
                    cplx pk = principal_pow(samples.nodes[a][i], static_cast<double>(k) / n);
                    C[a] = acc / (static_cast<double>(n) * pk);
                    double mod = std::abs(samples.nodes[a][i]);
                    double ex = static_cast<double>(n - 1) / n;
                    dec.condition_estimate =
                        std::max({dec.condition_estimate, std::pow(mod, ex), std::pow(mod, -ex)});
                }
                auto key = idx;
                key[i] = k;
                next[key] = std::move(C);
            }
        }
        table = std::move(next);
    }
    dec.components = std::move(table);
    dec.ill_conditioned = dec.condition_estimate > warn_threshold;
    return dec;
}

std::vector<cplx> reconstruct_sheet(const Decomposition& dec, const SheetSamples& samples,
                                    const std::vector<int>& N, const std::vector<int>& sheet) {
    std::vector<cplx> out(samples.nodes.size(), cplx{});
    for (const auto& [k, A] : dec.components)
        for (std::size_t a = 0; a < out.size(); ++a) {
            cplx f = 1.0;
            for (std::size_t i = 0; i < N.size(); ++i) {
                double e = static_cast<double>(k[i]) / N[i];
                f *= principal_pow(samples.nodes[a][i], e) * std::polar(1.0, 2.0 * pi * sheet[i] * e);
            }
            out[a] += f * A[a];
        }
    return out;
}

}  // namespace borel
