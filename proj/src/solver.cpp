#include "borel/solver.hpp"

#include "borel/quadrature.hpp"
#include "borel/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace borel {

namespace {

double factorial(int m) { return std::tgamma(m + 1.0); }

// phi_k(z) = sum_j z^j / (j+k)!
cplx phi_function(int k, cplx z) {
    if (std::abs(z) < k + 2.0) {
        cplx term = 1.0 / factorial(k), sum = term;
        for (int j = 1; j < 200; ++j) {
            term *= z / double(j + k);
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum)) break;
        }
        return sum;
    }
    cplx v = std::exp(z);
    for (int i = 1; i <= k; ++i) v = (v - 1.0 / factorial(i - 1)) / z;
    return v;
}

void add_scaled(RayGridFunction& acc, const RayGridFunction& x, cplx scale) {
    if (x.origin_exponent() < acc.origin_exponent()) acc = acc.with_exponent(x.origin_exponent());
    auto& a = acc.values();
    const auto& b = x.values();
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += scale * b[i];
}

RayGridFunction difference(const RayGridFunction& a, const RayGridFunction& b) {
    RayGridFunction d = a.with_exponent(std::min(a.origin_exponent(), b.origin_exponent()));
    auto& v = d.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= b.values()[i];
    return d;
}

void check_ray(const PDEProblem& problem, double theta) {
    if (problem.d != 1)
        throw InvalidProblem("the grid solver handles d = 1 only (problem has d = " + std::to_string(problem.d) + ")");
    ConeReport cone = check_cone_condition(problem.symbol, problem.sector.phi);
    if (!cone.ok) throw InvalidProblem("cone condition not verified: " + cone.message);
    if (!(std::abs(theta) < problem.sector.phi))
        throw InvalidProblem("ray angle " + std::to_string(theta) + " lies outside the sector");
}

RamifiedSeries regular_part(const RamifiedSeries& x_series, TPoly* delta) {
    RamifiedSeries reg(Side::x, x_series.ramification());
    for (const auto& [e, c] : x_series.terms()) {
        if (e == 0) {
            if (delta) *delta = c;
        } else if (e < 0) {
            throw InvalidProblem("coefficient term x^{" + to_string(-e) +
                                 "} grows at infinity and has no Borel transform");
        } else {
            reg.add(e, c);
        }
    }
    return reg;
}

}  // namespace

cplx duhamel_monomial(cplx a, double t, int m) {
    if (t == 0.0) return 0.0;
    return factorial(m) * std::pow(t, m + 1) * phi_function(m + 1, -a * t);
}

std::vector<RayGridFunction> build_F0(const PDEProblem& problem, GridPtr grid, const std::vector<double>& times,
                                      const OperatorScaling& scaling) {
    check_ray(problem, grid->theta);
    const double c = scaling.p_scale, ts = scaling.time_scale;
    const cplx dir = grid->direction();
    std::vector<RayGridFunction> out;
    for (int comp = 0; comp < problem.m; ++comp) {
        RamifiedSeries R(Side::p), FI(Side::p);
        if (comp < static_cast<int>(problem.forcing.size()) && !problem.forcing[comp].empty())
            R = borel_transform(problem.forcing[comp]);
        if (comp < static_cast<int>(problem.initial.size()) && !problem.initial[comp].empty())
            FI = borel_transform(problem.initial[comp]);
        double alpha = 0.0;
        bool any = false;
        for (const auto* s : {&R, &FI})
            if (!s->empty()) {
                double e = to_double(s->min_exponent());
                alpha = any ? std::min(alpha, e) : e;
                any = true;
            }
        RayGridFunction F(grid, times, alpha);
        for (int k = 1; k <= grid->M; ++k) {
            const cplx p = c * grid->node(k) * dir;
            const cplx a = ts * problem.symbol.eval_minus(comp, p);
            for (std::size_t it = 0; it < times.size(); ++it) {
                const double lam = times[it];
                cplx v{};
                if (!FI.empty()) v += std::exp(-a * lam) * FI.eval(p, 0.0);
                for (const auto& [e, coeff] : R.terms()) {
                    cplx pw = std::pow(p, to_double(e));
                    for (std::size_t m = 0; m < coeff.size(); ++m) {
                        if (coeff[m] == cplx{}) continue;
                        v += ts * std::pow(ts, double(m)) * coeff[m] * pw * duhamel_monomial(a, lam, int(m));
                    }
                }
                F.at(k, static_cast<int>(it)) = v;
            }
        }
        out.push_back(std::move(F));
    }
    return out;
}

IntegralOperator::IntegralOperator(const PDEProblem& problem, GridPtr grid, std::vector<double> times,
                                   const OperatorScaling& scaling, int quad_order)
    : grid_(std::move(grid)), times_(std::move(times)), scaling_(scaling) {
    F0_ = build_F0(problem, grid_, times_, scaling_);
    const int M = grid_->M, nt = static_cast<int>(times_.size());
    const double c = scaling_.p_scale, ts = scaling_.time_scale;
    const cplx dir = grid_->direction();

    a_.assign(problem.m, std::vector<cplx>(M));
    for (int comp = 0; comp < problem.m; ++comp)
        for (int k = 1; k <= M; ++k) a_[comp][k - 1] = ts * problem.symbol.eval_minus(comp, c * grid_->node(k) * dir);

    // Duhamel weights by composite Gauss-Legendre in u = t_i - tau
    const auto& rule = gauss_legendre01(quad_order);
    const auto bw = barycentric_weights(times_);
    std::vector<double> ell(nt);
    auto basis = [&](double tau) {
        for (int j = 0; j < nt; ++j)
            if (tau == times_[j]) {
                std::fill(ell.begin(), ell.end(), 0.0);
                ell[j] = 1.0;
                return;
            }
        double den = 0.0;
        for (int j = 0; j < nt; ++j) {
            ell[j] = bw[j] / (tau - times_[j]);
            den += ell[j];
        }
        for (int j = 0; j < nt; ++j) ell[j] /= den;
    };
    W_.assign(problem.m, std::vector<cplx>(static_cast<std::size_t>(M) * nt * nt));
    for (int comp = 0; comp < problem.m; ++comp) {
        for (int k = 1; k <= M; ++k) {
            const cplx a = a_[comp][k - 1];
            cplx* Wk = W_[comp].data() + static_cast<std::size_t>(k - 1) * nt * nt;
            for (int i = 0; i < nt; ++i) {
                const double ti = times_[i];
                if (ti == 0.0) continue;
                double span = ti;
                if (a.real() > 0.0) span = std::min(span, 40.0 / a.real());
                double cell = std::abs(a) > 0.0 ? std::min(4.0 / std::abs(a), span) : span;
                int ncell = std::min(4096, std::max(1, static_cast<int>(std::ceil(span / cell))));
                cell = span / ncell;
                for (int ce = 0; ce < ncell; ++ce) {
                    for (std::size_t g = 0; g < rule.x.size(); ++g) {
                        double u = (ce + rule.x[g]) * cell;
                        cplx w = rule.w[g] * cell * std::exp(-a * u);
                        basis(ti - u);
                        for (int j = 0; j < nt; ++j) Wk[i * nt + j] += w * ell[j];
                    }
                }
            }
        }
    }

    for (const auto& t : problem.terms) {
        Term term;
        term.component = t.component;
        term.label = t.label();
        for (int l = 0; l < static_cast<int>(t.k.size()); ++l)
            for (int r = 0; r < t.k[l]; ++r) term.factors.emplace_back(l, 0);
        int J = 0;
        for (const auto& f : t.q) {
            int j = f.j.entries.empty() ? 0 : f.j.entries[0];
            for (int r = 0; r < f.power; ++r) term.factors.emplace_back(f.l, j);
            J += j * f.power;
        }
        std::sort(term.factors.begin(), term.factors.end());
        term.derivative_weight = J;
        const int mf = static_cast<int>(term.factors.size());
        if (mf == 0) throw InvalidProblem("term " + term.label + " has no unknown factor");
        TPoly delta;
        RamifiedSeries reg = regular_part(t.coeff, &delta);
        if (!reg.empty()) term.B_reg = sample_series(borel_transform(reg), grid_, times_, c, ts);
        if (!tpoly_is_zero(delta)) {
            term.c_delta.resize(nt);
            for (int i = 0; i < nt; ++i) term.c_delta[i] = tpoly_eval(delta, ts * times_[i]);
        }
        term.pref_reg = ts * std::pow(c, mf + J);
        term.pref_delta = ts * std::pow(c, mf - 1 + J);
        terms_.push_back(std::move(term));
    }
}

std::vector<RayGridFunction> IntegralOperator::nonlinear(const std::vector<RayGridFunction>& F) const {
    const int m = components();
    std::vector<RayGridFunction> out;
    for (int c = 0; c < m; ++c) out.emplace_back(grid_, times_, 1e9);
    std::vector<bool> touched(m, false);
    std::map<std::pair<std::pair<int, int>, int>, RayGridFunction> powers;
    std::function<const RayGridFunction&(std::pair<int, int>, int)> power_of =
        [&](std::pair<int, int> f, int count) -> const RayGridFunction& {
        auto key = std::make_pair(f, count);
        auto it = powers.find(key);
        if (it != powers.end()) return it->second;
        RayGridFunction v = f.second == 0 ? F.at(f.first) : multiply_minus_p_power(F.at(f.first), f.second);
        if (count > 1) v = convolve_grid(power_of(f, count - 1), power_of(f, 1));
        return powers.emplace(key, std::move(v)).first->second;
    };
    for (const auto& term : terms_) {
        // group equal factors into convolution powers
        std::vector<std::pair<std::pair<int, int>, int>> groups;
        for (const auto& f : term.factors) {
            if (!groups.empty() && groups.back().first == f) ++groups.back().second;
            else groups.push_back({f, 1});
        }
        RayGridFunction X = power_of(groups[0].first, groups[0].second);
        for (std::size_t g = 1; g < groups.size(); ++g) X = convolve_grid(X, power_of(groups[g].first, groups[g].second));
        RayGridFunction& acc = out[term.component];
        if (term.B_reg) add_scaled(acc, convolve_grid(*term.B_reg, X), term.pref_reg);
        if (!term.c_delta.empty()) {
            RayGridFunction Y = X;
            for (int it = 0; it < Y.nt(); ++it) {
                cplx cd = term.pref_delta * term.c_delta[it];
                cplx* s = Y.slice(it);
                for (int k = 0; k < Y.M(); ++k) s[k] *= cd;
            }
            add_scaled(acc, Y, 1.0);
        }
        touched[term.component] = true;
    }
    for (int c = 0; c < m; ++c)
        if (!touched[c]) out[c] = out[c].with_exponent(F0_[c].origin_exponent());
    return out;
}

RayGridFunction IntegralOperator::duhamel(int c, const RayGridFunction& N) const {
    RayGridFunction D = N;
    const int M = grid_->M, nt = static_cast<int>(times_.size());
    std::vector<cplx> col(nt);
    for (int k = 1; k <= M; ++k) {
        const cplx* Wk = W_[c].data() + static_cast<std::size_t>(k - 1) * nt * nt;
        for (int j = 0; j < nt; ++j) col[j] = N.at(k, j);
        for (int i = 0; i < nt; ++i) {
            cplx v{};
            for (int j = 0; j < nt; ++j) v += Wk[i * nt + j] * col[j];
            D.at(k, i) = v;
        }
    }
    return D;
}

std::vector<RayGridFunction> IntegralOperator::apply(const std::vector<RayGridFunction>& F) const {
    if (static_cast<int>(F.size()) != components()) throw InvalidProblem("iterate has the wrong number of components");
    std::vector<RayGridFunction> out = F0_;
    if (terms_.empty()) return out;
    auto N = nonlinear(F);
    for (int c = 0; c < components(); ++c) {
        bool any = std::any_of(terms_.begin(), terms_.end(), [&](const Term& t) { return t.component == c; });
        if (!any) continue;
        add_scaled(out[c], duhamel(c, N[c]), 1.0);
    }
    return out;
}

std::vector<RayGridFunction> picard_step(const std::vector<RayGridFunction>& F, const IntegralOperator& op) {
    auto next = op.apply(F);
    for (std::size_t c = 0; c < next.size(); ++c) {
        if (next[c].all_finite()) continue;
        for (int it = 0; it < next[c].nt(); ++it)
            for (int k = 1; k <= next[c].M(); ++k)
                if (!std::isfinite(std::abs(next[c].at(k, it)))) {
                    std::ostringstream msg;
                    msg << "Picard iterate diverged: component " << c << ", s = " << next[c].grid()->node(k)
                        << ", t = " << next[c].times()[it];
                    throw NumericalFailure(msg.str());
                }
    }
    return next;
}

double vector_nu_norm(const std::vector<RayGridFunction>& F, double nu) {
    double v = 0.0;
    NuNormParams params;
    params.nu = nu;
    for (const auto& f : F) v = std::max(v, nu_norm(f, params).value);
    return v;
}

ContractionEstimate IntegralOperator::estimate(double nu, double b) const {
    ContractionEstimate est;
    est.nu = nu;
    est.F0_norm = vector_nu_norm(F0_, nu);
    const int M = grid_->M;
    const double T = times_.back();
    // E(p) = int_0^T e^{-Re a u} du
    std::vector<std::vector<double>> E(components(), std::vector<double>(M));
    for (int c = 0; c < components(); ++c)
        for (int k = 1; k <= M; ++k) {
            double ra = a_[c][k - 1].real();
            E[c][k - 1] = std::abs(ra * T) < 1e-12 ? T : -std::expm1(-ra * T) / ra;
        }
    // 1/(1+s^2) on the grid, for the weighted convolution
    RayGridFunction w(grid_, {0.0}, 0.0);
    for (int k = 1; k <= M; ++k) {
        double s = grid_->node(k);
        w.at(k, 0) = 1.0 / (1.0 + s * s);
    }
    const cplx dir = grid_->direction();
    for (const auto& term : terms_) {
        TermBound tb;
        tb.label = term.label;
        tb.power = static_cast<int>(term.factors.size());
        const int J = term.derivative_weight;
        double kappa = 0.0;
        if (term.B_reg) {
            // int_0^p |B(s)| e^{-nu s} / (1 + (p-s)^2) ds, sup over time of |B|
            RayGridFunction Bw(grid_, {0.0}, term.B_reg->origin_exponent());
            for (int k = 1; k <= M; ++k) {
                double mx = 0.0;
                for (int it = 0; it < term.B_reg->nt(); ++it) mx = std::max(mx, std::abs(term.B_reg->at(k, it)));
                Bw.at(k, 0) = mx * std::exp(-nu * grid_->node(k));
            }
            RayGridFunction K = convolve_grid(Bw, w);
            for (int k = 1; k <= M; ++k) {
                double s = grid_->node(k);
                // convolve_grid includes the ray factor; only the modulus matters here
                double v = E[term.component][k - 1] * std::pow(s, J) * (1.0 + s * s) * std::abs(K.at(k, 0) / dir);
                kappa = std::max(kappa, std::abs(term.pref_reg) * v);
            }
        }
        if (!term.c_delta.empty()) {
            double cmax = 0.0;
            for (cplx v : term.c_delta) cmax = std::max(cmax, std::abs(v));
            double sup = 0.0;
            for (int k = 1; k <= M; ++k) sup = std::max(sup, E[term.component][k - 1] * std::pow(grid_->node(k), J));
            kappa += std::abs(term.pref_delta) * cmax * sup;
        }
        tb.kappa = kappa;
        est.terms.push_back(tb);
    }
    const double r = b * est.F0_norm;
    for (const auto& tb : est.terms) {
        if (r > 0.0) est.ball_sum += tb.kappa * std::pow(r, tb.power) / r;
        est.lipschitz += tb.kappa * tb.power * (tb.power > 1 ? std::pow(r, tb.power - 1) : 1.0);
    }
    est.ball_margin = (1.0 - 1.0 / b) - est.ball_sum;
    est.contract_margin = 1.0 - est.lipschitz;
    est.ball_ok = est.ball_margin >= 0.0;
    est.contract_ok = est.lipschitz < 1.0;
    return est;
}

ContractionEstimate choose_nu(const IntegralOperator& op, const PDEProblem& problem, double b) {
    double nu = 4.0 * problem.rho0 + to_double(problem.alpha_r) + 4.0;
    ContractionEstimate est;
    for (int i = 0; i < 16; ++i, nu *= 2.0) {
        est = op.estimate(nu, b);
        if (est.ball_ok && est.contract_ok) return est;
    }
    return est;
}

namespace {

GridPtr make_grid(const PDEProblem& problem, const SolveConfig& config) {
    double theta = config.theta ? *config.theta
                                : (problem.sector.directions.empty() ? 0.0 : problem.sector.directions.front());
    return RayGrid::make(theta, config.grid_nodes, config.p_max);
}

}  // namespace

SolveReport iterate_operator(const IntegralOperator& op, const PDEProblem& problem, const SolveConfig& config,
                             std::vector<RayGridFunction>& F) {
    SolveReport rep;
    rep.theta = op.grid()->theta;
    if (config.ball_factor <= 1.0) throw InvalidProblem("ball factor must exceed 1");
    if (!(config.tol > 0.0)) throw InvalidProblem("tolerance must be positive");
    rep.estimate = config.nu > 0.0 ? op.estimate(config.nu, config.ball_factor)
                                   : choose_nu(op, problem, config.ball_factor);
    rep.nu = rep.estimate.nu;
    rep.ball_ok = rep.estimate.ball_ok;
    F = op.F0();
    rep.norms.push_back(vector_nu_norm(F, rep.nu));
    for (int k = 0; k < config.max_iters; ++k) {
        auto next = picard_step(F, op);
        std::vector<RayGridFunction> d;
        for (std::size_t c = 0; c < F.size(); ++c) d.push_back(difference(next[c], F[c]));
        double diff = vector_nu_norm(d, rep.nu);
        F = std::move(next);
        rep.iters = k + 1;
        rep.norms.push_back(vector_nu_norm(F, rep.nu));
        if (!rep.diffs.empty() && rep.diffs.back() > 0.0) rep.contraction_ratios.push_back(diff / rep.diffs.back());
        rep.diffs.push_back(diff);
        if (diff < config.tol) {
            rep.converged = true;
            break;
        }
    }
    auto again = op.apply(F);
    std::vector<RayGridFunction> d;
    for (std::size_t c = 0; c < F.size(); ++c) d.push_back(difference(F[c], again[c]));
    rep.residual = vector_nu_norm(d, rep.nu);
    rep.contract_ok = rep.estimate.contract_ok && rep.converged;
    if (!rep.converged) rep.warnings.push_back("no convergence within max_iters");
    return rep;
}

Solution solve(const PDEProblem& problem, const SolveConfig& config) {
    GridPtr grid = make_grid(problem, config);
    IntegralOperator op(problem, grid, chebyshev_lobatto(config.time_nodes, problem.horizon), {},
                        config.time_quad_order);
    Solution sol;
    sol.report = iterate_operator(op, problem, config, sol.F);
    if (config.epsilon_guard) {
        std::vector<double> xs = config.check_x;
        if (xs.empty()) {
            double base = std::max(problem.sector.rho, 1.0);
            xs = {2.0 * base, 4.0 * base, 8.0 * base};
        }
        for (double x : xs) {
            for (const auto& f : sol.F)
                for (int it = 0; it < f.nt(); ++it) {
                    try {
                        double v = std::abs(laplace_ray(f, x, it).value);
                        sol.report.max_abs_f = std::max(sol.report.max_abs_f, v);
                    } catch (const DomainError& e) {
                        sol.report.warnings.push_back(std::string("epsilon guard skipped: ") + e.what());
                    }
                }
        }
        if (sol.report.max_abs_f >= problem.epsilon) {
            sol.report.epsilon_ok = false;
            sol.report.warnings.push_back("resummed |f| reaches " + std::to_string(sol.report.max_abs_f) +
                                          " >= epsilon = " + std::to_string(problem.epsilon) +
                                          "; the analyticity ball assumption is not met");
        }
    }
    return sol;
}

ContractionEstimate estimate_contraction(const PDEProblem& problem, double nu, const SolveConfig& config) {
    GridPtr grid = make_grid(problem, config);
    IntegralOperator op(problem, grid, chebyshev_lobatto(config.time_nodes, problem.horizon), {},
                        config.time_quad_order);
    return op.estimate(nu, config.ball_factor);
}

SmallPExponent small_p_exponent(const RayGridFunction& F, int it, std::optional<double> expected) {
    SmallPExponent r;
    std::vector<double> xs, ys;
    for (int k = 1; k <= F.M(); ++k) {
        double s = F.grid()->node(k);
        if (s >= 0.1) break;
        double a = std::abs(F.at(k, it));
        if (!(a > 0.0)) continue;
        xs.push_back(std::log(s));
        ys.push_back(std::log(a));
    }
    r.nodes_used = static_cast<int>(xs.size());
    if (r.nodes_used < 8) {
        r.inconclusive = true;
        return r;
    }
    const double n = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i]; sy += ys[i]; sxx += xs[i] * xs[i]; sxy += xs[i] * ys[i];
    }
    r.estimate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double icpt = (sy - r.estimate * sx) / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        r.fit_residual = std::max(r.fit_residual, std::abs(ys[i] - icpt - r.estimate * xs[i]));
        r.K = std::max(r.K, std::exp(ys[i] - r.estimate * xs[i]));
    }
    r.inconclusive = r.fit_residual > 0.1;
    r.nearest_rational = to_string(approximate(r.estimate, 12));
    if (expected) {
        // |F| / s^{expected} must stay bounded as s -> 0
        double first = std::exp(ys.front() - *expected * xs.front());
        double last = std::exp(ys.back() - *expected * xs.back());
        r.bound_ok = first <= 10.0 * last;
    }
    return r;
}

}  // namespace borel
