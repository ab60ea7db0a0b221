#include "borel/rational.hpp"

#include <cctype>
#include <cmath>

namespace borel {

namespace {

std::optional<BigInt> parse_int(std::string_view s) {
    if (s.empty()) return std::nullopt;
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        i = 1;
    }
    if (i == s.size()) return std::nullopt;
    BigInt v = 0;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
        v = v * 10 + (s[i] - '0');
    }
    return neg ? BigInt(-v) : v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
    text = trim(text);
    auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        auto n = parse_int(text);
        if (!n) return std::nullopt;
        return Rational(*n);
    }
    auto n = parse_int(trim(text.substr(0, slash)));
    auto d = parse_int(trim(text.substr(slash + 1)));
    if (!n || !d || *d == 0) return std::nullopt;
    return Rational(*n, *d);
}

BigInt numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
BigInt denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

bool is_integer(const Rational& r) { return denominator_of(r) == 1; }

std::string to_string(const Rational& r) {
    auto n = numerator_of(r);
    auto d = denominator_of(r);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational approximate(double x, long long max_den) {
    // continued fraction convergents
    long long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double v = x;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(v);
        long long ai = static_cast<long long>(a);
        long long h2 = ai * h1 + h0;
        long long k2 = ai * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1; h1 = h2; k0 = k1; k1 = k2;
        double frac = v - a;
        if (frac < 1e-12) break;
        v = 1.0 / frac;
    }
    if (k1 == 0) return make_rational(static_cast<long long>(std::llround(x)));
    return make_rational(h1, k1);
}

}  // namespace borel
