#include "borel/solver.hpp"

#include "borel/transforms.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace borel {

std::map<std::string, Rational> check_scaled_setting(const PDEProblem& problem) {
    if (!problem.setting) throw InvalidProblem("scaled solve needs [setting] data (n_hat, omega, beta_i, gamma_i, beta)");
    const auto& s = *problem.setting;
    if (s.omega.empty() || s.beta_i.empty() || s.gamma_i.size() != s.beta_i.size())
        throw InvalidProblem("setting needs omega_1 and matching beta_i / gamma_i lists");
    if (s.gamma_i.front() == 0 || s.beta_i.front() / s.gamma_i.front() != s.n_hat)
        throw InvalidProblem("n_hat must equal beta_1 / gamma_1 (got n_hat = " + to_string(s.n_hat) + ")");
    if (s.n_hat < problem.n)
        throw InvalidProblem("n_hat = " + to_string(s.n_hat) + " is below the order n = " + std::to_string(problem.n));
    for (std::size_t i = 1; i < s.omega.size(); ++i)
        if (!(s.omega[i - 1] < s.omega[i])) throw InvalidProblem("omega_j must increase strictly");
    for (std::size_t i = 1; i < s.beta_i.size(); ++i) {
        Rational prev = s.beta_i[i - 1] / s.gamma_i[i - 1], cur = s.beta_i[i] / s.gamma_i[i];
        if (cur > prev || (cur == prev && !(s.beta_i[i - 1] > s.beta_i[i])))
            throw InvalidProblem("beta_i / gamma_i must be ordered non-increasingly");
    }
    std::map<std::string, Rational> out;
    for (const auto& t : problem.terms) {
        Rational m = scaled_margin(problem, t);
        if (m < 0) throw InvalidProblem("term " + t.label() + " violates the scaling condition: m_{q,k} = " + to_string(m));
        out[t.label()] = m;
    }
    return out;
}

std::pair<ScaledState, SolveReport> scaled_solve(const PDEProblem& problem, double t, const SolveConfig& config) {
    if (!(t > 0.0)) throw InvalidProblem("scaled solve needs t > 0");
    ScaledState st;
    st.margins = check_scaled_setting(problem);
    const auto& s = *problem.setting;
    st.n_hat = s.n_hat;
    st.beta_i = s.beta_i;
    st.gamma_i = s.gamma_i;
    st.omega = s.omega;
    st.t = t;
    double theta = config.theta ? *config.theta
                                : (problem.sector.directions.empty() ? 0.0 : problem.sector.directions.front());
    st.s_grid = RayGrid::make(theta, config.grid_nodes, config.p_max);
    st.lambda_nodes = chebyshev_lobatto(config.time_nodes, 1.0);
    OperatorScaling sc;
    sc.n_hat = to_double(s.n_hat);
    sc.p_scale = std::pow(t, -1.0 / sc.n_hat);
    sc.time_scale = t;
    IntegralOperator op(problem, st.s_grid, st.lambda_nodes, sc, config.time_quad_order);
    SolveReport rep = iterate_operator(op, problem, config, st.F);
    return {std::move(st), std::move(rep)};
}

cplx scaled_resum(const ScaledState& state, cplx zeta, int component) {
    const auto& F = state.F.at(component);
    LaplaceResult r = laplace_ray(F, zeta, F.nt() - 1);
    return std::pow(state.t, -1.0 / to_double(state.n_hat)) * r.value;
}

ThetaSeries theta_series(const PDEProblem& problem, const std::vector<double>& zeta, double t_max, int degree,
                         const SolveConfig& config) {
    if (!problem.setting || !problem.setting->setting2)
        throw InvalidProblem("theta series needs a Setting-2 problem");
    auto omega = setting2_omega(problem);
    if (!omega) throw InvalidProblem("no common rational step omega for the Setting-2 exponents");
    ThetaSeries ts;
    ts.omega = *omega;
    ts.leading = problem.setting->omega.front() / (problem.n * *omega);
    ts.zeta = zeta;
    const double w = to_double(*omega), L = to_double(ts.leading);
    const double th_max = std::pow(t_max, w);
    const int nodes = degree + 3;
    std::vector<std::vector<cplx>> samples(zeta.size());
    for (int i = 0; i < nodes; ++i) {
        double th = 0.5 * th_max * (1.0 - std::cos(pi * (i + 0.5) / nodes));
        ts.theta_nodes.push_back(th);
        auto [state, rep] = scaled_solve(problem, std::pow(th, 1.0 / w), config);
        if (!rep.converged) throw NumericalFailure("scaled solve did not converge at theta = " + std::to_string(th));
        ts.reports.push_back(rep);
        for (std::size_t z = 0; z < zeta.size(); ++z)
            samples[z].push_back(std::pow(th, -L) * scaled_resum(state, zeta[z]));
    }
    Eigen::MatrixXd A(nodes, degree + 1);
    for (int i = 0; i < nodes; ++i)
        for (int k = 0; k <= degree; ++k) A(i, k) = std::pow(ts.theta_nodes[i] / th_max, k);
    auto qr = A.colPivHouseholderQr();
    for (std::size_t z = 0; z < zeta.size(); ++z) {
        Eigen::VectorXd re(nodes), im(nodes);
        for (int i = 0; i < nodes; ++i) {
            re(i) = samples[z][i].real();
            im(i) = samples[z][i].imag();
        }
        Eigen::VectorXd cr = qr.solve(re), ci = qr.solve(im);
        std::vector<cplx> c(degree + 1);
        for (int k = 0; k <= degree; ++k) c[k] = cplx(cr(k), ci(k)) / std::pow(th_max, k);
        for (int i = 0; i < nodes; ++i) {
            cplx fit{};
            for (int k = 0; k <= degree; ++k) fit += c[k] * std::pow(ts.theta_nodes[i], k);
            ts.fit_residual = std::max(ts.fit_residual, std::abs(fit - samples[z][i]));
        }
        ts.coeffs.push_back(std::move(c));
    }
    ts.samples = std::move(samples);
    return ts;
}

}  // namespace borel
