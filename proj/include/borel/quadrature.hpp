#pragma once

#include <vector>

namespace borel {

struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
};

/// Gauss-Legendre rule on [0,1]. Cached per n.
const QuadRule& gauss_legendre01(int n);

/// Gauss-Jacobi rule on [0,1] for the weight u^a (1-u)^b, a,b > -1.
/// Golub-Welsch on the Jacobi matrix; cached per (n,a,b).
const QuadRule& gauss_jacobi01(int n, double a, double b);

/// Lagrange basis values at x for the given nodes.
void lagrange_weights(const double* nodes, int count, double x, double* out);

/// Weights of the composite piecewise sixth-order rule on the unit-spaced
/// nodes 0..n (panels use the six nearest nodes). Requires n >= 5.
std::vector<double> composite_weights(int n);

}  // namespace borel
