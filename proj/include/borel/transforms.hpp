#pragma once

#include "borel/common.hpp"
#include "borel/grid.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace borel {

struct LaplaceResult {
    cplx value;
    /// Bound on the part of the integral beyond the last grid node, assuming
    /// F keeps its fitted exponential rate there.
    double tail_estimate = 0.0;
    double growth_rate = 0.0;
};

/// int_0^{infinity e^{i theta}} F(p) e^{-p x} dp along the grid's ray, at time
/// node `it`. The origin power law is integrated exactly. `growth` overrides
/// the rate fitted from the outer quarter of the grid. Throws DomainError if
/// Re(e^{i theta} x) does not exceed the growth rate.
LaplaceResult laplace_ray(const RayGridFunction& F, cplx x, int it,
                          std::optional<double> growth = std::nullopt);

/// Same at an arbitrary t in [0, T] (barycentric over the per-node transforms).
LaplaceResult laplace_ray_at(const RayGridFunction& F, cplx x, double t,
                             std::optional<double> growth = std::nullopt);

struct ContourSpec {
    double rho1 = 0.0;       // offset radius; the vertex sits at rho1 + 1/|p|
    double phi = 0.3;        // arms leave the vertex at angles +-(pi/2 + phi)
    double truncation = 0.0; // arm length; 0 picks the length where e^{px} < e^{-37}
    int nodes = 16;          // Gauss-Legendre points per cell
    double tol = 1e-10;
};

struct ContourResult {
    cplx value;
    double error_estimate = 0.0;
    bool warning = false;
    std::string message;
};

/// (2 pi i)^{-1} int e^{p x} g(x) dx over the two-armed contour opening to the
/// left from Re x = rho1 + 1/|p|.
ContourResult inverse_laplace_contour(const std::function<cplx(cplx)>& g, cplx p,
                                      const ContourSpec& spec = {});

struct AccelerationSpec {
    int n = 2;
    double alpha() const { return double(n - 1) / n; }
    double bromwich_c = 1.0;  // lower bound for the contour scale
    double q_max = 0.0;       // 0: chosen from the kernel decay
    int quad_nodes = 16;      // Gauss-Legendre points per cell in q
    bool force_contour = false;
    double tail_tol = 1e-10;
};

struct KernelValue {
    double value = 0.0;
    double error = 0.0;
};

/// K(p,q) = (2 pi i)^{-1} int_{c-i inf}^{c+i inf} e^{p u - q u^alpha} du.
/// n = 2 uses the closed form unless force_contour is set; otherwise the
/// Bromwich line is replaced by a parabola through the saddle of the exponent,
/// integrated by the trapezoid rule with step halving.
KernelValue acceleration_kernel(double p, double q, const AccelerationSpec& spec);

/// Closed form for n = 2: q p^{-3/2} e^{-q^2/(4p)} / (2 sqrt(pi)).
double acceleration_kernel_n2(double p, double q);

/// int_0^inf K(p,q) q^k dq = k! p^{alpha(k+1)-1} / Gamma(alpha(k+1)).
double kernel_moment(int k, double p, int n);

/// |G(q)| <= C e^{nu (q + q^n)} on q >= 0.
struct GrowthCertificate {
    double C = 1.0;
    double nu = 0.0;
    int n = 2;
};

struct IdentityRow {
    double x = 0.0;
    cplx lhs;
    cplx rhs;
};

struct AccelerationResult {
    std::vector<double> p;
    std::vector<cplx> g1;
    std::vector<double> kernel_error;  // per p: quadrature plus tail estimate
    double kernel_error_max = 0.0;
    std::vector<IdentityRow> identity_check;
};

/// G_1(p) = int_0^inf K(p,q) G(q) dq on the supplied p-grid, plus the two sides
/// of the Laplace identity at `check_x`. Without a certificate the transform
/// is refused (InvalidProblem).
AccelerationResult accelerate(const std::function<cplx(double)>& G,
                              const std::optional<GrowthCertificate>& certificate,
                              const std::vector<double>& p_grid, const std::vector<double>& check_x,
                              const AccelerationSpec& spec);

/// Grid-function input at time node `it`; the certificate is taken from
/// exp_norm with the given nu, and q beyond the grid is not used.
AccelerationResult accelerate(const RayGridFunction& G, int it, double nu,
                              const std::vector<double>& p_grid, const std::vector<double>& check_x,
                              const AccelerationSpec& spec);

struct WatsonRow {
    int k = 0;
    double from_g = 0.0;   // k! G^{(k)}(0)/k!
    double from_g1 = 0.0;  // Gamma(alpha(k+1)) times the k-th coefficient of p^{1/n} G_1 in p^alpha
};

/// Coefficients of x^{-(k+1)} in the asymptotic expansion of the Laplace
/// transform, from G and from G_1 (Chebyshev fits near the origin).
std::vector<WatsonRow> watson_check(const std::function<cplx(double)>& G, int count,
                                    const AccelerationSpec& spec);

struct CAlphaFit {
    double c = 0.0;         // fitted decay rate
    double c_exact = 0.0;   // (1/n)((n-1)/n)^{n-1}
    double exponent = 0.0;  // fitted prefactor power
    double constant = 0.0;
};

/// Fits C(X) ~ A X^e e^{-c X} for C(X) = K(1, X^{1/n}) / X on [x_lo, x_hi].
CAlphaFit fit_c_alpha(int n, double x_lo, double x_hi, const AccelerationSpec& spec = {});

}  // namespace borel
