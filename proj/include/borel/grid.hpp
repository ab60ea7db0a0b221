#pragma once

#include "borel/common.hpp"
#include "borel/series.hpp"

#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

namespace borel {

/// Radial nodes s_k = k h, k = 1..M, on the ray p = s e^{i theta}. The origin
/// itself is never sampled: grid functions carry an origin power law and are
/// integrated against it exactly (product integration), so no geometric
/// refinement near s = 0 is needed.
struct RayGrid {
    double theta = 0.0;
    double h = 0.0;
    int M = 0;

    double node(int k) const { return k * h; }  // k = 1..M
    double p_max() const { return M * h; }
    cplx direction() const { return std::polar(1.0, theta); }

    static std::shared_ptr<const RayGrid> make(double theta, int M, double p_max);
};

using GridPtr = std::shared_ptr<const RayGrid>;

/// Samples F(s e^{i theta}, t) at grid nodes and time nodes, with
/// F ~ s^alpha * smooth as s -> 0.
class RayGridFunction {
public:
    RayGridFunction() = default;
    RayGridFunction(GridPtr grid, std::vector<double> times, double origin_exponent);

    const GridPtr& grid() const { return grid_; }
    const std::vector<double>& times() const { return times_; }
    double origin_exponent() const { return alpha_; }
    int M() const { return grid_->M; }
    int nt() const { return static_cast<int>(times_.size()); }

    /// k = 1..M, it = time index
    cplx& at(int k, int it) { return values_[static_cast<std::size_t>(it) * grid_->M + (k - 1)]; }
    cplx at(int k, int it) const { return values_[static_cast<std::size_t>(it) * grid_->M + (k - 1)]; }
    cplx* slice(int it) { return values_.data() + static_cast<std::size_t>(it) * grid_->M; }
    const cplx* slice(int it) const { return values_.data() + static_cast<std::size_t>(it) * grid_->M; }
    std::vector<cplx>& values() { return values_; }
    const std::vector<cplx>& values() const { return values_; }

    /// F / s^alpha at node k (the smooth factor).
    cplx phi(int k, int it) const;
    /// Smooth factor at any s in [0, p_max] (8-point Lagrange, extrapolated to s < h).
    cplx phi_at(double s, int it) const;
    /// F at radius s in (0, p_max].
    cplx eval(double s, int it) const;
    /// F at radius s and time t (barycentric interpolation over the time nodes).
    cplx eval(double s, double t) const;

    bool all_finite() const;

    /// Same samples re-labelled with a different origin exponent.
    RayGridFunction with_exponent(double alpha) const;

    static RayGridFunction sample(GridPtr grid, std::vector<double> times, double origin_exponent,
                                  const std::function<cplx(cplx p, double t)>& f);

private:
    GridPtr grid_;
    std::vector<double> times_;
    double alpha_ = 0.0;
    std::vector<cplx> values_;
};

/// Worker threads used inside grid kernels (convolution targets). Each
/// target keeps its own summation order, so results do not depend on it.
void set_thread_count(int n);
int thread_count();

/// (f*g)(p) = int_0^p f(s) g(p-s) ds along the common ray. Each half of the
/// path is integrated with weights exact for s^alpha times a local degree-5
/// polynomial; targets below 64h use Gauss-Jacobi on the whole path.
RayGridFunction convolve_grid(const RayGridFunction& f, const RayGridFunction& g);

/// int_0^{s_end} F(s) k(s) ds over the radial variable (no ray factor), with
/// the origin power law integrated exactly and the smooth factor interpolated
/// per panel. `tail` receives |F k| at s_end.
cplx integrate_ray(const RayGridFunction& F, int it, const std::function<cplx(double)>& kernel,
                   double s_end, double* tail = nullptr);

/// Pointwise product with (-p)^j; raises the origin exponent by j.
RayGridFunction multiply_minus_p_power(const RayGridFunction& f, int j);

/// Samples a p-side ramified series (t-polynomial coefficients) on the grid.
/// The origin exponent is the series' leading exponent.
RayGridFunction sample_series(const RamifiedSeries& s, GridPtr grid, const std::vector<double>& times,
                              double p_scale = 1.0, double t_scale = 1.0);

enum class NormMode { polynomial, exponential };

struct NuNormParams {
    double nu = 1.0;
    NormMode mode = NormMode::polynomial;
    int n = 1;
    int d = 1;
};

struct NormResult {
    double value = 0.0;
    double argsup_s = 0.0;
    double argsup_t = 0.0;
    bool divergent = false;  // sup attained at the outermost node
};

double m0_constant();

/// M0^d sup (1+s^2) e^{-nu s} |F|, including s = 0 when the origin exponent is 0.
NormResult nu_norm(const RayGridFunction& F, const NuNormParams& params);

/// sup |F| e^{-nu (t+1)(s + s^n)}.
NormResult exp_norm(const RayGridFunction& F, const NuNormParams& params);

void write_csv(std::ostream& out, const RayGridFunction& F, const std::string& label);

/// Chebyshev-Lobatto points on [0, T], ascending.
std::vector<double> chebyshev_lobatto(int n, double T);

/// Barycentric Lagrange weights for arbitrary distinct nodes.
std::vector<double> barycentric_weights(const std::vector<double>& x);

}  // namespace borel
