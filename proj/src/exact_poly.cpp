#include "borel/exact_poly.hpp"

#include <sstream>
#include <stdexcept>

namespace borel {

ExactPoly ExactPoly::constant(int nvars, const Rational& c) {
    ExactPoly p(nvars);
    p.add_term(Exps(nvars, Rational(0)), c);
    return p;
}

ExactPoly ExactPoly::monomial(int nvars, const Exps& e, const Rational& c) {
    ExactPoly p(nvars);
    p.add_term(e, c);
    return p;
}

void ExactPoly::add_term(const Exps& e, const Rational& c) {
    if (static_cast<int>(e.size()) != nvars_) throw std::invalid_argument("exponent arity mismatch");
    if (c == 0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
        return;
    }
    it->second += c;
    if (it->second == 0) terms_.erase(it);
}

ExactPoly ExactPoly::operator+(const ExactPoly& o) const {
    ExactPoly r(*this);
    r += o;
    return r;
}

ExactPoly& ExactPoly::operator+=(const ExactPoly& o) {
    if (nvars_ == 0 && terms_.empty()) nvars_ = o.nvars_;
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

ExactPoly ExactPoly::operator-(const ExactPoly& o) const { return *this + o.scaled(-1); }

ExactPoly ExactPoly::operator*(const ExactPoly& o) const {
    ExactPoly r(nvars_);
    Exps e(nvars_);
    for (const auto& [ea, ca] : terms_)
        for (const auto& [eb, cb] : o.terms_) {
            for (int i = 0; i < nvars_; ++i) e[i] = ea[i] + eb[i];
            r.add_term(e, ca * cb);
        }
    return r;
}

ExactPoly ExactPoly::scaled(const Rational& c) const {
    ExactPoly r(nvars_);
    if (c == 0) return r;
    for (const auto& [e, v] : terms_) r.terms_.emplace(e, v * c);
    return r;
}

ExactPoly ExactPoly::diff(int i) const {
    ExactPoly r(nvars_);
    for (const auto& [e, c] : terms_) {
        if (e[i] == 0) continue;
        Exps f(e);
        f[i] -= 1;
        r.add_term(f, c * e[i]);
    }
    return r;
}

ExactPoly ExactPoly::truncated(int i, const Rational& cap) const {
    ExactPoly r(nvars_);
    for (const auto& [e, c] : terms_)
        if (e[i] <= cap) r.terms_.emplace(e, c);
    return r;
}

ExactPoly ExactPoly::coefficient_of(int i, const Rational& ex) const {
    ExactPoly r(nvars_ - 1);
    for (const auto& [e, c] : terms_) {
        if (e[i] != ex) continue;
        Exps f;
        for (int k = 0; k < nvars_; ++k)
            if (k != i) f.push_back(e[k]);
        r.add_term(f, c);
    }
    return r;
}

bool ExactPoly::depends_on(int i) const {
    for (const auto& [e, c] : terms_)
        if (e[i] != 0) return true;
    return false;
}

std::string ExactPoly::to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) out << " + ";
        first = false;
        out << '(' << borel::to_string(c) << ')';
        for (int i = 0; i < nvars_; ++i) {
            if (e[i] == 0) continue;
            out << '*' << names.at(i);
            if (e[i] != 1) out << '^' << borel::to_string(e[i]);
        }
    }
    return out.str();
}

}  // namespace borel
