#pragma once

#include "borel/grid.hpp"
#include "borel/problem.hpp"

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace borel {

struct SolveConfig {
    double nu = 0.0;         // 0: chosen by doubling until the contraction estimate passes
    int max_iters = 60;
    double tol = 1e-12;
    double ball_factor = 2.0;
    int time_quad_order = 16;  // Gauss-Legendre points per Duhamel cell
    bool epsilon_guard = true;
    int grid_nodes = 1024;
    double p_max = 8.0;
    int time_nodes = 16;
    std::optional<double> theta;  // ray; default: first sector direction
    std::vector<double> check_x;  // epsilon-guard points; default 2, 4, 8 times max(rho, 1)
};

/// Scale factors turning the plain operator into the small-time rescaled one:
/// p = p_scale * s and physical time = time_scale * lambda.
struct OperatorScaling {
    double p_scale = 1.0;
    double time_scale = 1.0;
    double n_hat = 0.0;  // 0 for the plain equation
};

struct TermBound {
    std::string label;
    int power = 0;  // |k| + |q|
    double kappa = 0.0;
};

struct ContractionEstimate {
    double nu = 0.0;
    double F0_norm = 0.0;
    double ball_sum = 0.0;      // sum kappa (b |F0|)^m / (b |F0|), must be <= 1 - 1/b
    double ball_margin = 0.0;   // (1 - 1/b) - ball_sum
    double lipschitz = 0.0;     // sum kappa m (b |F0|)^{m-1}, must be < 1
    double contract_margin = 0.0;
    bool ball_ok = false;
    bool contract_ok = false;
    std::vector<TermBound> terms;
};

struct SolveReport {
    int iters = 0;
    bool converged = false;
    double nu = 0.0;
    double theta = 0.0;
    std::vector<double> norms;
    std::vector<double> diffs;
    std::vector<double> contraction_ratios;
    bool ball_ok = false;
    bool contract_ok = false;
    double residual = std::numeric_limits<double>::quiet_NaN();
    ContractionEstimate estimate;
    bool epsilon_ok = true;
    double max_abs_f = 0.0;
    std::vector<std::string> warnings;
};

/// The map F -> F0 + sum_terms Duhamel[B * F^{*k} * prod ((-p)^j F_l)^{*q}]
/// on one ray, with the Duhamel integral applied through precomputed weights
/// int_0^{t_i} e^{-a(t_i - tau)} l_j(tau) dtau for the Lagrange basis l_j of
/// the time nodes.
class IntegralOperator {
public:
    IntegralOperator(const PDEProblem& problem, GridPtr grid, std::vector<double> times,
                     const OperatorScaling& scaling = {}, int quad_order = 16);

    const GridPtr& grid() const { return grid_; }
    const std::vector<double>& times() const { return times_; }
    int components() const { return static_cast<int>(F0_.size()); }
    const std::vector<RayGridFunction>& F0() const { return F0_; }

    /// Sum of the nonlinear terms before the Duhamel integral, per component.
    std::vector<RayGridFunction> nonlinear(const std::vector<RayGridFunction>& F) const;
    /// F0 + Duhamel(nonlinear(F)).
    std::vector<RayGridFunction> apply(const std::vector<RayGridFunction>& F) const;

    ContractionEstimate estimate(double nu, double b) const;

    /// P(-p) (scaled: time_scale * P(-p_scale s)) at node k for component c.
    cplx symbol_at(int c, int k) const { return a_[c][k - 1]; }
    bool has_terms() const { return !terms_.empty(); }

    struct Term {
        int component = 0;
        std::vector<std::pair<int, int>> factors;  // (l, j): (-p)^j F_l, one entry per power
        std::optional<RayGridFunction> B_reg;
        std::vector<cplx> c_delta;                 // per time node; empty if no x^0 part
        double pref_reg = 1.0;
        double pref_delta = 1.0;
        std::string label;
        int derivative_weight = 0;
    };
    const std::vector<Term>& terms() const { return terms_; }

private:
    RayGridFunction duhamel(int c, const RayGridFunction& N) const;

    GridPtr grid_;
    std::vector<double> times_;
    OperatorScaling scaling_;
    std::vector<std::vector<cplx>> a_;          // [component][k-1]
    std::vector<std::vector<cplx>> W_;          // [component][(k-1)*nt*nt + i*nt + j]
    std::vector<RayGridFunction> F0_;
    std::vector<Term> terms_;
};

/// F0 = e^{-P(-p) t} F_I + int_0^t e^{-P(-p)(t-tau)} R(p,tau) dtau, exact for
/// t-polynomial R through phi-functions. Refuses if the cone condition fails
/// or the ray lies outside the sector.
std::vector<RayGridFunction> build_F0(const PDEProblem& problem, GridPtr grid, const std::vector<double>& times,
                                      const OperatorScaling& scaling = {});

/// t^{m+1} m! phi_{m+1}(-a t) = int_0^t e^{-a(t-tau)} tau^m dtau
cplx duhamel_monomial(cplx a, double t, int m);

std::vector<RayGridFunction> picard_step(const std::vector<RayGridFunction>& F, const IntegralOperator& op);

/// Sup-norm in the nu-weight over all components.
double vector_nu_norm(const std::vector<RayGridFunction>& F, double nu);

struct Solution {
    std::vector<RayGridFunction> F;
    SolveReport report;
};

/// Picard iteration of `op` from its F0; nu from the config or chosen by doubling.
SolveReport iterate_operator(const IntegralOperator& op, const PDEProblem& problem, const SolveConfig& config,
                             std::vector<RayGridFunction>& F);

/// Picard iteration from F0 on the configured ray.
Solution solve(const PDEProblem& problem, const SolveConfig& config);

/// Contraction constants for the problem's operator at the given nu.
ContractionEstimate estimate_contraction(const PDEProblem& problem, double nu, const SolveConfig& config);

/// Starts at 4 rho0 + alpha_r + 4 and doubles until both checks pass.
ContractionEstimate choose_nu(const IntegralOperator& op, const PDEProblem& problem, double b);

struct SmallPExponent {
    double estimate = 0.0;
    std::string nearest_rational;
    double K = 0.0;            // sup |F| / s^{estimate} on the fitted nodes
    double fit_residual = 0.0; // max deviation of log|F| from the fitted line
    int nodes_used = 0;
    bool inconclusive = false;
    bool bound_ok = true;      // |F| <= K s^{expected} on the fitted nodes, when an expectation is given
};

/// Least-squares slope of log|F| against log s on nodes with s < 0.1.
SmallPExponent small_p_exponent(const RayGridFunction& F, int it,
                                std::optional<double> expected = std::nullopt);

struct ScaledState {
    GridPtr s_grid;
    std::vector<double> lambda_nodes;
    Rational n_hat;
    double t = 0.0;
    std::vector<Rational> beta_i, gamma_i, omega;
    std::map<std::string, Rational> margins;  // m_{q,k} per term label
    std::vector<RayGridFunction> F;           // F_hat(s, lambda; t)
};

/// Rescaled problem at physical time t: s = p t^{1/n_hat}, lambda in [0,1].
/// Rejects (InvalidProblem) missing setting data, n_hat < n, or m_{q,k} < 0.
std::pair<ScaledState, SolveReport> scaled_solve(const PDEProblem& problem, double t, const SolveConfig& config);

/// Validation of the Setting data alone; returns m_{q,k} per term.
std::map<std::string, Rational> check_scaled_setting(const PDEProblem& problem);

/// f_hat(zeta, t) = t^{-1/n_hat} int_0^inf e^{-s zeta} F_hat(s, 1; t) ds on the ray.
cplx scaled_resum(const ScaledState& state, cplx zeta, int component = 0);

struct ThetaSeries {
    Rational omega;
    Rational leading;  // omega_1 / (n omega)
    std::vector<double> zeta;
    std::vector<std::vector<cplx>> coeffs;  // [zeta index][power of theta]
    std::vector<double> theta_nodes;
    std::vector<std::vector<cplx>> samples;  // [zeta index][node]: theta^{-leading} f_hat
    double fit_residual = 0.0;
    std::vector<SolveReport> reports;  // one per theta node
};

/// Fits theta^{-omega_1/(n omega)} f_hat(zeta, theta^{1/omega}) by a
/// polynomial in theta = t^omega from scaled solves at several t.
ThetaSeries theta_series(const PDEProblem& problem, const std::vector<double>& zeta, double t_max, int degree,
                         const SolveConfig& config);

}  // namespace borel
