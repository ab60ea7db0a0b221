#pragma once

#include "borel/problem.hpp"

namespace borel {

struct FormalSeriesResult {
    std::vector<RamifiedSeries> components;  // x-side, t-polynomial coefficients
    std::vector<Rational> exponents;         // solved orders, ascending
    int requested = 0;
    int achieved = 0;
    bool complete = false;  // no further nonzero orders below the exponent cap
    std::string note;
};

/// Order-by-order formal solution in powers x^{-a} (d = 1). At each order a
/// the coefficient solves A' + P_c(0) A = [rhs]_a with A(0) from the initial
/// data; t-dependence is kept as a Taylor polynomial of degree kt.
FormalSeriesResult formal_series_solve(const PDEProblem& problem, int K, int kt = 8);

/// Right-hand side r + N(f) - sum_{j>=1} c_j d^j f of the normalized
/// equation evaluated on x-side series, exponents above `cap` dropped.
std::vector<RamifiedSeries> formal_rhs(const PDEProblem& problem,
                                       const std::vector<RamifiedSeries>& f, int kt,
                                       const Rational& cap);

}  // namespace borel
