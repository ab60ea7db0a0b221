#pragma once

#include "borel/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace borel {

/// Exact multivariate sum of monomials with rational exponents and rational
/// coefficients. Variable meaning is fixed by the caller (e.g. slot 0 = x).
class ExactPoly {
public:
    using Exps = std::vector<Rational>;

    ExactPoly() = default;
    explicit ExactPoly(int nvars) : nvars_(nvars) {}

    static ExactPoly constant(int nvars, const Rational& c);
    static ExactPoly monomial(int nvars, const Exps& e, const Rational& c);

    int nvars() const { return nvars_; }
    const std::map<Exps, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const Exps& e, const Rational& c);

    ExactPoly operator+(const ExactPoly& o) const;
    ExactPoly operator-(const ExactPoly& o) const;
    ExactPoly operator*(const ExactPoly& o) const;
    ExactPoly scaled(const Rational& c) const;
    ExactPoly& operator+=(const ExactPoly& o);

    /// Partial derivative with respect to slot i.
    ExactPoly diff(int i) const;

    /// Drops monomials whose exponent in slot i exceeds cap.
    ExactPoly truncated(int i, const Rational& cap) const;

    /// Coefficient polynomial of var_i^e (slot i removed from the keys).
    ExactPoly coefficient_of(int i, const Rational& e) const;

    bool depends_on(int i) const;

    std::string to_string(const std::vector<std::string>& names) const;

private:
    int nvars_ = 0;
    std::map<Exps, Rational> terms_;
};

}  // namespace borel
