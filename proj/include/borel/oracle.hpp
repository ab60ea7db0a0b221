#pragma once

#include "borel/grid.hpp"
#include "borel/problem.hpp"

#include <functional>
#include <vector>

namespace borel {

struct OracleConfig {
    double theta_x = 0.0;  // only the real ray is integrated
    double x_min = 4.0;
    double x_max = 40.0;
    double h = 0.05;
    double dt = 1.0 / 1024;
    double t_end = 1.0;
    bool richardson = true;          // combine dt and dt/2 runs
    std::vector<double> output_times;  // default: k t_end / 8
};

struct OracleResult {
    std::vector<double> x;                  // interior nodes
    std::vector<double> times;
    std::vector<std::vector<cplx>> values;  // [time][node]
    int steps = 0;
};

/// Values of f outside [x_min, x_max] as functions of t (the ghost layer of
/// the centred stencils).
using BoundaryData = std::function<cplx(double x, double t)>;

/// Method of lines for the scalar normalized equation
///   f_t + P(d/dx) f = r + sum b f^k prod (d^j f)^q
/// on the real segment: sixth-order centred differences (9-point stencils,
/// four ghost nodes per side supplied by `boundary`) and IMEX-BDF2 in time
/// with the linear part implicit.
OracleResult oracle_integrate(const PDEProblem& problem, const OracleConfig& config, const BoundaryData& boundary);

/// Ghost values from a Borel-plane solution: the Laplace transform at each
/// ghost node and time node, interpolated in t.
BoundaryData borel_boundary(const RayGridFunction& F, const OracleConfig& config);

/// Fornberg weights for derivative `order` at 0 on the given offsets.
std::vector<double> fd_weights(const std::vector<double>& offsets, int order);

}  // namespace borel
