#pragma once

#include "borel/common.hpp"
#include "borel/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace borel {

/// Polynomial in t, coefficient of t^k at index k.
using TPoly = std::vector<cplx>;

TPoly tpoly_add(const TPoly& a, const TPoly& b);
TPoly tpoly_mul(const TPoly& a, const TPoly& b, int max_degree);
TPoly tpoly_scale(const TPoly& a, cplx s);
cplx tpoly_eval(const TPoly& a, double t);
bool tpoly_is_zero(const TPoly& a, double tol = 0.0);

/// x-side: exponent a stands for x^{-a}. p-side: exponent b stands for p^b.
enum class Side { x, p };

struct RamifiedMonomial {
    Rational exponent;
    TPoly coeff;
};

/// Finite ramified series, terms keyed (hence sorted and merged) by exponent.
class RamifiedSeries {
public:
    RamifiedSeries() = default;
    explicit RamifiedSeries(Side side, int ramification = 1)
        : side_(side), ramification_(ramification) {}

    Side side() const { return side_; }
    int ramification() const { return ramification_; }
    const std::map<Rational, TPoly>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    /// Adds c * monomial; zero results are erased. The exponent denominator
    /// must divide the ramification.
    void add(const Rational& exponent, const TPoly& coeff);
    void add(const Rational& exponent, cplx c) { add(exponent, TPoly{c}); }

    /// Raises the ramification to lcm(current, den(exponent)) instead of failing.
    void add_relaxed(const Rational& exponent, const TPoly& coeff);

    Rational min_exponent() const;
    int t_degree() const;

    /// x-side: sum c(t) x^{-a}; p-side: sum c(t) p^b (principal branch).
    cplx eval(cplx z, double t) const;

    RamifiedSeries operator+(const RamifiedSeries& o) const;
    RamifiedSeries scaled(cplx s) const;

private:
    Side side_ = Side::x;
    int ramification_ = 1;
    std::map<Rational, TPoly> terms_;
};

/// x^{-alpha} -> p^{alpha-1}/Gamma(alpha). Throws DomainError for alpha <= 0.
RamifiedMonomial borel_of_monomial(const Rational& alpha);

/// Term-wise Borel transform of an x-side series.
RamifiedSeries borel_transform(const RamifiedSeries& x_series);

/// Gamma(a+1)Gamma(b+1)/Gamma(a+b+2), via log-Gamma.
double beta_factor(double a, double b);

/// p^a * p^b = beta_factor(a,b) p^{a+b+1}, extended bilinearly.
RamifiedSeries convolve_series(const RamifiedSeries& a, const RamifiedSeries& b,
                               int max_t_degree = 64);

/// Product of two x-side series (exponents add).
RamifiedSeries multiply_series(const RamifiedSeries& a, const RamifiedSeries& b,
                               int max_t_degree, const Rational* exponent_cap = nullptr);

/// d/dx of an x-side series.
RamifiedSeries differentiate_x(const RamifiedSeries& a);

/// One term per line: "re im num/den [t-degree]".
std::string serialize(const RamifiedSeries& s);
RamifiedSeries deserialize(const std::string& text, Side side, int ramification);

/// Samples of G(p e^{2 pi i j}) for sheet index vectors j, at common nodes.
struct SheetSamples {
    std::vector<std::vector<cplx>> nodes;                  // node -> point (length d)
    std::map<std::vector<int>, std::vector<cplx>> values;  // sheet -> samples
};

struct Decomposition {
    std::map<std::vector<int>, std::vector<cplx>> components;  // k -> A_k at nodes
    double condition_estimate = 1.0;
    bool ill_conditioned = false;
};

/// Recovers A_k with G(p) = sum_k prod_i p_i^{k_i/N_i} A_k(p), dimension by
/// dimension in ascending order.
Decomposition decompose_ramified(const SheetSamples& samples, const std::vector<int>& N,
                                 double warn_threshold = 1e8);

/// sum_k prod_i p_i^{k_i/N_i} A_k(p) on sheet j.
std::vector<cplx> reconstruct_sheet(const Decomposition& dec, const SheetSamples& samples,
                                    const std::vector<int>& N, const std::vector<int>& sheet);

}  // namespace borel
