#pragma once

namespace borel {

/// Both sides of (1 + mu^alpha) int_0^1 s^{alpha-1} e^{-mu s} ds <= 2 Gamma(alpha).
struct InequalitySides {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds() const { return lhs <= rhs; }
};

InequalitySides ine1(double alpha, double mu);

/// mu^alpha nu^alpha int_0^1 e^{-nu mu [1-(1-s)^m]} s^{alpha-1} / [1 + mu^2 (1-s)^2]^sigma ds
/// against 8 (2^alpha + 1) Gamma(alpha) (1 + mu^2)^{-sigma}.
InequalitySides minilemma(double alpha, double mu, double nu, int m, int sigma);

/// e^{-nu p^n} int_0^p e^{nu s^n + nu (p-s)^n} ds, computed without overflow.
double pd_lhs_scaled(int n, double nu, double p);

/// (1 + mu) e^{-mu} int_0^1 e^{mu [u^n + (1-u)^n]} du
double pd_profile(int n, double mu);

/// sup over mu >= 0 of pd_profile, located by a scan and refined; this is the
/// constant in int_0^p e^{nu s^n + nu (p-s)^n} ds <= C p e^{nu p^n} / (1 + p^n), nu >= 1.
double pd_constant(int n);

/// C |p|^{alpha-1} e^{2 rho |p|} / Gamma(alpha)
double monomial_growth_bound(double alpha, double rho, double p_abs, double C = 1.0);

}  // namespace borel
