#pragma once

#include "borel/exact_poly.hpp"
#include "borel/problem.hpp"

#include <map>

namespace borel {

/// Scalar quasilinear equation in one space dimension,
///   u_t + sum_j c_j d^j u + g2 * d^n u = g1,   u(x,0) = u_I(x),
/// with g1, g2 polynomials in u_0 .. u_{n-1} (u_j = d^j u) whose coefficients
/// are exact monomials x^e t^a. Variable slots: 0 = x, 1 = t, 2 + j = u_j
/// for j < 2n.
struct RawEquation {
    int n = 0;
    std::map<int, Rational> symbol;
    ExactPoly g1;
    ExactPoly g2;
    ExactPoly initial;  // same slot layout, u-free
    double horizon = 1.0;
    double epsilon = 1.0;
    double rho0 = 0.0;
    SectorSpec sector;

    int nvars() const { return 2 + 2 * n; }
    static int x_slot() { return 0; }
    static int t_slot() { return 1; }
    static int u_slot(int j) { return 2 + j; }
};

/// Total x-derivative: d/dx + sum_j u_{j+1} d/du_j.
ExactPoly total_derivative(const ExactPoly& e, int n);

/// Extended system for f_l = d^l u, l < n. Each equation is d^l applied to the
/// raw one; u_j maps to f_j for j < n and to d^{j-n+1} f_{n-1} otherwise.
PDEProblem normalize(const RawEquation& raw);

/// Right-hand side of the l-th extended equation, before classification.
ExactPoly extended_rhs(const RawEquation& raw, int l);

}  // namespace borel
