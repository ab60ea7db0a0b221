#pragma once

#include "borel/common.hpp"
#include "borel/rational.hpp"
#include "borel/series.hpp"

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace borel {

struct MultiIndex {
    std::vector<int> entries;

    int abs() const;
    bool operator<(const MultiIndex& o) const { return entries < o.entries; }
    bool operator==(const MultiIndex& o) const { return entries == o.entries; }
};

struct SectorSpec {
    double phi = 0.0;
    double rho = 0.0;
    std::vector<double> directions{0.0};
    int d = 1;
};

/// P_c(d/dx) = sum_j coeffs[c][j] d^j, one polynomial per component (diagonal form).
struct SymbolPolynomial {
    int n = 0;
    std::vector<std::map<MultiIndex, cplx>> coeffs;

    /// P_c(-p) for a point p (length d).
    cplx eval_minus(int component, const std::vector<cplx>& p) const;
    /// Principal (degree n) part at -p.
    cplx principal_minus(int component, const std::vector<cplx>& p) const;
    /// d = 1 convenience: P_c(-p).
    cplx eval_minus(int component, cplx p) const { return eval_minus(component, std::vector<cplx>{p}); }
    cplx constant_term(int component) const;
    int dimension() const;
};

/// One factor (d^j f_l)^power of the q multi-index.
struct QFactor {
    int l = 0;
    MultiIndex j;
    int power = 1;
    bool operator<(const QFactor& o) const {
        return std::tie(l, j, power) < std::tie(o.l, o.j, o.power);
    }
    bool operator==(const QFactor& o) const { return l == o.l && j == o.j && power == o.power; }
};

/// b_{q,k}(x,t) f^k prod (d^j f_l)^{q_{l,j}} in the equation for `component`.
struct NonlinearTerm {
    int component = 0;
    std::vector<int> k;
    std::vector<QFactor> q;
    RamifiedSeries coeff{Side::x};

    int k_abs() const;
    int q_abs() const;
    /// sum |j| q_{l,j}
    int derivative_weight() const;
    std::string q_key() const;
    std::string label() const;
};

/// Setting data for the small-time rescaled equation.
struct ScaledSetting {
    Rational n_hat;
    std::vector<Rational> omega;  // omega_1 < omega_2 < ...
    std::vector<Rational> beta_i;
    std::vector<Rational> gamma_i;
    Rational beta;                // decay per power of f
    bool setting2 = false;
};

struct PDEProblem {
    int d = 1;
    int n = 0;
    int m = 1;
    SymbolPolynomial symbol;
    std::vector<NonlinearTerm> terms;
    std::vector<RamifiedSeries> forcing;  // per component, x-side
    std::vector<RamifiedSeries> initial;  // per component, x-side
    Rational alpha_r{1};
    std::map<std::string, std::vector<Rational>> alpha_q;  // q_key -> alpha_{q,1} > alpha_{q,2} > ...
    double epsilon = 1.0;
    double rho0 = 0.0;
    SectorSpec sector;
    double horizon = 1.0;
    std::vector<int> ramification{1};
    std::optional<ScaledSetting> setting;
    std::string name;
};

struct Violation {
    std::string term;
    int weight = 0;
    std::string message;
};

/// Terms violating sum |j| q_{l,j} <= n, plus structural issues
/// (b_{0,0} present, alpha_r < 1, shape mismatches).
std::vector<Violation> validate_constraint(const PDEProblem& problem);

struct ConeReport {
    bool ok = false;
    double C = 0.0;
    double R = 0.0;
    double worst_ray = 0.0;
    int worst_component = 0;
    std::string message;
};

/// Samples Re P_{n;c}(-p) on |p| = 1, |arg p_i| <= phi. C is the sampled
/// infimum. R is the smallest radius beyond which Re P_c(-p) >= (C/2)|p|^n,
/// from the bound sum_{|j|<n} |c_j| r^{|j|} <= (C/2) r^n.
ConeReport check_cone_condition(const SymbolPolynomial& symbol, double phi, int sample_count = 512);

/// Common decay exponent of forcing and initial data (min over both and all
/// components); 1 when both vanish.
Rational data_decay(const PDEProblem& problem);

/// m_{q,k} of the rescaled equation; requires problem.setting.
Rational scaled_margin(const PDEProblem& problem, const NonlinearTerm& term);

/// alpha_{q,j} per q: the x-decay exponents of b_{q,k} x^{beta |k|} at t = 0,
/// extended when a t-monomial does not sit on any existing base of the
/// setting variables t^{gamma_i} x^{-beta_i}.
std::map<std::string, std::vector<Rational>> derive_alpha_table(const PDEProblem& problem);

/// Largest omega such that the Setting-2 quantities are integer multiples of n*omega.
std::optional<Rational> setting2_omega(const PDEProblem& problem);

}  // namespace borel
