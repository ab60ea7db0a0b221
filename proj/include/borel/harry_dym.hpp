#pragma once

#include "borel/exact_poly.hpp"
#include "borel/problem.hpp"
#include "borel/solver.hpp"

#include <string>
#include <vector>

namespace borel {

/// Modified Harry-Dym equation H_t = -H^3/2 + H^3 H_zzz, H(z,0) = z^{-1/2},
/// with x = (2/3) z^{3/2}. Exact work is done in X = 3x/2 = z^{3/2}, where all
/// coefficients stay rational; x-side series are produced at the end.
struct HarryDymCoeffs {
    int N = 0;
    /// H_n as exact polynomials in the single slot z.
    std::vector<ExactPoly> H_exact;
    /// H_n as z-series (exponent a stands for z^{-a}).
    std::vector<RamifiedSeries> H;
    /// g_N = sum_{n<=N} t^n H_n, exact in slots (t, X).
    ExactPoly gN_X;
    /// g_N as an x-series with t-polynomial coefficients.
    RamifiedSeries gN{Side::x, 3};
    int residual_order = -1;  // lowest total degree of the residual polynomial
};

/// H_0..H_N by matching powers of t after substituting sum t^n H_n:
/// (n+1) H_{n+1} = [-H^3/2 + H^3 H_zzz]_n.
HarryDymCoeffs harry_dym_series(int N);

/// Checks z^{1/2} H_n is a homogeneous degree-n polynomial in (z^{-9/2}, z^{-1}).
/// On failure `offending` names the first monomial outside that form.
bool harry_dym_structure_ok(const ExactPoly& Hn, int n, std::string* offending = nullptr);

struct ResidualMonomial {
    int degree = 0;  // total degree in (t x^{-3}, t x^{-2/3})
    int i = 0;       // power of t x^{-3}
    int l = 0;       // power of t x^{-2/3}
    Rational coeff;  // in the X variable
};

struct HarryDymResidual {
    int N = 0;
    ExactPoly residual;  // N(g_N) in slots (t, X)
    std::vector<ResidualMonomial> monomials;
    int lowest_degree = -1;
    int highest_degree = -1;
    bool structure_ok = false;
    std::string offending;
};

/// N(g_N) = g_t + g^3/2 - (3x/2) g^3 g_xxx - (3/2) g^3 g_xx + g^3 g_x/(6x),
/// expanded exactly and matched to t^{-1} x^{-1/3} p(t x^{-3}, t x^{-2/3}).
HarryDymResidual harry_dym_residual(int N);

/// Equation for f with H = g_N + x^{-2} f: f_t - f_xxx = r + sum b f^k (d^j f)^q,
/// with its scaled setting (n_hat = 3, omega_1 = beta = 5/3, beta_i = 3, 2/3,
/// gamma_i = 1, 1) and the alpha table derived from the coefficients.
PDEProblem harry_dym_problem(int N, double phi = 0.4);

/// Coefficients c_i of z^{-1/2 - 9i/2} in H_i: the large-zeta series of G_0.
std::vector<Rational> g0_asymptotic_coeffs(const HarryDymCoeffs& c);

struct G0Profile {
    std::vector<double> zeta;
    std::vector<double> G;
    double start = 0.0;          // zeta where the asymptotic series seeds the ODE
    double decay_exponent = 0.0; // slope of log G against log zeta on the outer half
};

/// -(1/9) G - (2/9) zeta G' = G^3 G''' integrated inward from `start`, seeded
/// with the truncated large-zeta series.
G0Profile g0_profile(const HarryDymCoeffs& c, const std::vector<double>& zeta, double start);

struct HarryDymScaled {
    int N = 0;
    double T = 0.0;
    std::vector<double> zeta;           // zeta = z t^{-2/9}
    std::vector<double> G0_numeric;     // series part plus the f contribution
    std::vector<double> G0_ode;
    double G0_max_diff = 0.0;
    double f_exponent_fit = 0.0;        // observed t-power of f_hat at fixed zeta_x
    double f_exponent_zeta = 0.0;       // zeta (z variable) used for that fit
    double f_exponent_deviation = 0.0;  // distance of the fit from the nearest ninth
    Rational f_exponent_expected;       // omega_1 / n_hat
    std::vector<Rational> exponents;    // observed t-exponents of H at fixed zeta
    bool lattice_7k_minus_1 = false;    // all exponents of the form (7k-1)/9
    bool lattice_7k_plus_1 = false;     // all exponents of the form (7k+1)/9
    double sector_z = 0.0;              // |arg z| bound implied by phi
    double sector_z_limit = 0.0;        // supremum over phi < pi/6: 4 pi / 9
    ThetaSeries theta;
};

/// Scaled solves of the f-equation at several t <= T and the resulting
/// representation H = sum t^{e_k} G_k(z t^{-2/9}).
HarryDymScaled harry_dym_scaled(int N, double T, const std::vector<double>& zeta, const SolveConfig& config,
                                int theta_degree = 3);

}  // namespace borel
