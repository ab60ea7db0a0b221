#include "borel/bounds.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>

namespace borel {

using boost::math::quadrature::gauss_kronrod;
using boost::math::quadrature::tanh_sinh;

InequalitySides ine1(double alpha, double mu) {
    // int_0^1 s^{alpha-1} e^{-mu s} ds = mu^{-alpha} gamma(alpha, mu)
    double integral = boost::math::tgamma_lower(alpha, mu) * std::pow(mu, -alpha);
    return {(1.0 + std::pow(mu, alpha)) * integral, 2.0 * std::tgamma(alpha)};
}

InequalitySides minilemma(double alpha, double mu, double nu, int m, int sigma) {
    auto smooth = [&](double s) {
        double e = std::exp(-nu * mu * (1.0 - std::pow(1.0 - s, m)));
        return sigma == 0 ? e : e / std::pow(1.0 + mu * mu * (1.0 - s) * (1.0 - s), sigma);
    };
    // the factor e^{-nu mu m s} confines the mass to s of order 1/(nu mu m);
    // split there so both pieces are well resolved
    const double cut = std::min(1.0, 40.0 / (nu * mu * m));
    tanh_sinh<double> ts;
    double inner = ts.integrate([&](double s) { return std::pow(s, alpha - 1.0) * smooth(s); }, 0.0, cut);
    double outer = 0.0;
    if (cut < 1.0)
        outer = gauss_kronrod<double, 31>::integrate(
            [&](double s) { return std::pow(s, alpha - 1.0) * smooth(s); }, cut, 1.0, 12, 1e-13);
    double lhs = std::pow(mu * nu, alpha) * (inner + outer);
    double rhs = 8.0 * (std::pow(2.0, alpha) + 1.0) * std::tgamma(alpha) * std::pow(1.0 + mu * mu, -sigma);
    return {lhs, rhs};
}

double pd_lhs_scaled(int n, double nu, double p) {
    if (p <= 0.0) return 0.0;
    const double pn = std::pow(p, n);
    auto f = [&](double s) { return std::exp(nu * (std::pow(s, n) + std::pow(p - s, n) - pn)); };
    return gauss_kronrod<double, 31>::integrate(f, 0.0, p, 20, 1e-13);
}

double pd_profile(int n, double mu) {
    auto f = [&](double u) { return std::exp(mu * (std::pow(u, n) + std::pow(1.0 - u, n) - 1.0)); };
    return (1.0 + mu) * gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 20, 1e-13);
}

double pd_constant(int n) {
    double best_mu = 0.0, best = pd_profile(n, 0.0);
    for (int i = 0; i <= 400; ++i) {
        double mu = std::pow(10.0, -2.0 + 6.0 * i / 400.0);
        double v = pd_profile(n, mu);
        if (v > best) best = v, best_mu = mu;
    }
    // golden-section refinement in log mu around the best sample
    double a = std::log(std::max(best_mu, 1e-2)) - 0.05, b = a + 0.1;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 60; ++it) {
        double c = b - g * (b - a), d = a + g * (b - a);
        if (pd_profile(n, std::exp(c)) > pd_profile(n, std::exp(d))) b = d;
        else a = c;
    }
    return std::max(best, pd_profile(n, std::exp(0.5 * (a + b))));
}

double monomial_growth_bound(double alpha, double rho, double p_abs, double C) {
    return C * std::pow(p_abs, alpha - 1.0) * std::exp(2.0 * rho * p_abs) / std::tgamma(alpha);
}

}  // namespace borel
