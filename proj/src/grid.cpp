#include "borel/grid.hpp"

#include "borel/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <array>
#include <map>
#include <tuple>
#include <mutex>
#include <thread>

namespace borel {

std::shared_ptr<const RayGrid> RayGrid::make(double theta, int M, double p_max) {
    if (M < 16) throw InvalidProblem("grid needs at least 16 nodes");
    if (!(p_max > 0.0)) throw InvalidProblem("grid extent must be positive");
    auto g = std::make_shared<RayGrid>();
    g->theta = theta;
    g->M = M;
    g->h = p_max / M;
    return g;
}

RayGridFunction::RayGridFunction(GridPtr grid, std::vector<double> times, double origin_exponent)
    : grid_(std::move(grid)), times_(std::move(times)), alpha_(origin_exponent) {
    if (!grid_) throw InvalidProblem("grid function without grid");
    if (times_.empty()) throw InvalidProblem("grid function needs at least one time node");
    if (!(alpha_ > -1.0)) throw DomainError("origin exponent must exceed -1");
    values_.assign(static_cast<std::size_t>(grid_->M) * times_.size(), cplx{});
}

cplx RayGridFunction::phi(int k, int it) const {
    return at(k, it) / std::pow(grid_->node(k), alpha_);
}

namespace {

constexpr int kStencil = 8;

int stencil_start(double s, double h, int M) {
    int c = static_cast<int>(std::floor(s / h + 0.5));
    return std::clamp(c - kStencil / 2 + 1, 1, M - kStencil + 1);
}

}  // namespace

cplx RayGridFunction::phi_at(double s, int it) const {
    const double h = grid_->h;
    int st = stencil_start(s, h, grid_->M);
    double nodes[kStencil], w[kStencil];
    for (int i = 0; i < kStencil; ++i) nodes[i] = st + i;
    lagrange_weights(nodes, kStencil, s / h, w);
    cplx v{};
    for (int i = 0; i < kStencil; ++i) v += w[i] * phi(st + i, it);
    return v;
}

cplx RayGridFunction::eval(double s, int it) const {
    if (s <= 0.0) {
        if (alpha_ > 0.0) return 0.0;
        if (alpha_ == 0.0) return phi_at(0.0, it);
        return std::numeric_limits<double>::infinity();
    }
    return phi_at(s, it) * std::pow(s, alpha_);
}

std::vector<double> barycentric_weights(const std::vector<double>& x) {
    std::vector<double> w(x.size(), 1.0);
    for (std::size_t j = 0; j < x.size(); ++j)
        for (std::size_t k = 0; k < x.size(); ++k)
            if (k != j) w[j] /= (x[j] - x[k]);
    return w;
}

cplx RayGridFunction::eval(double s, double t) const {
    if (times_.size() == 1) return eval(s, 0);
    for (std::size_t j = 0; j < times_.size(); ++j)
        if (t == times_[j]) return eval(s, static_cast<int>(j));
    auto w = barycentric_weights(times_);
    cplx num{};
    double den = 0.0;
    for (std::size_t j = 0; j < times_.size(); ++j) {
        double c = w[j] / (t - times_[j]);
        num += c * eval(s, static_cast<int>(j));
        den += c;
    }
    return num / den;
}

bool RayGridFunction::all_finite() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

RayGridFunction RayGridFunction::with_exponent(double alpha) const {
    RayGridFunction r(*this);
    if (!(alpha > -1.0)) throw DomainError("origin exponent must exceed -1");
    r.alpha_ = alpha;
    return r;
}

RayGridFunction RayGridFunction::sample(GridPtr grid, std::vector<double> times, double origin_exponent,
                                        const std::function<cplx(cplx, double)>& f) {
    RayGridFunction r(grid, std::move(times), origin_exponent);
    const cplx dir = grid->direction();
    for (int it = 0; it < r.nt(); ++it)
        for (int k = 1; k <= grid->M; ++k) r.at(k, it) = f(grid->node(k) * dir, r.times_[it]);
    return r;
}

namespace {

// Product-integration weights for int_0^{Jh} s^alpha psi(s) ds with psi
// sampled at nodes 1..M; panel j uses the six nodes from clamp(j-2, 1, M-5).
struct SingularWeights {
    std::vector<double> full;                // full[m], m = 1..M
    std::vector<std::array<double, 5>> tail;  // tail[J][i] for node J-2+i
};

const SingularWeights& singular_weights(double alpha, double h, int M) {
    static std::map<std::tuple<double, double, int>, SingularWeights> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(alpha, h, M);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    const auto& gj = gauss_jacobi01(8, alpha, 0.0);
    const auto& gl = gauss_legendre01(12);
    const double scale = std::pow(h, alpha + 1.0);
    const int P = M;  // panels 0..P-1
    std::vector<std::array<double, 6>> contrib(P);
    std::vector<int> start(P);
    double nodes[6], lw[6];
    for (int j = 0; j < P; ++j) {
        start[j] = std::clamp(j - 2, 1, M - 5);
        for (int r = 0; r < 6; ++r) nodes[r] = start[j] + r;
        contrib[j].fill(0.0);
        if (j == 0) {
            for (std::size_t g = 0; g < gj.x.size(); ++g) {
                lagrange_weights(nodes, 6, gj.x[g], lw);
                for (int r = 0; r < 6; ++r) contrib[j][r] += gj.w[g] * lw[r];
            }
        } else {
            for (std::size_t g = 0; g < gl.x.size(); ++g) {
                double u = j + gl.x[g];
                lagrange_weights(nodes, 6, u, lw);
                double wt = gl.w[g] * std::pow(u, alpha);
                for (int r = 0; r < 6; ++r) contrib[j][r] += wt * lw[r];
            }
        }
        for (auto& c : contrib[j]) c *= scale;
    }
    SingularWeights sw;
    sw.full.assign(M + 8, 0.0);
    for (int j = 0; j < P; ++j)
        for (int r = 0; r < 6; ++r)
            if (start[j] + r < static_cast<int>(sw.full.size())) sw.full[start[j] + r] += contrib[j][r];
    sw.tail.assign(M + 1, {0, 0, 0, 0, 0});
    for (int J = 3; J <= M; ++J) {
        auto& t = sw.tail[J];
        for (int j = std::max(0, J - 10); j < J; ++j)
            for (int r = 0; r < 6; ++r) {
                int m = start[j] + r;
                if (m >= J - 2 && m <= J + 2) t[m - (J - 2)] += contrib[j][r];
            }
    }
    return cache.emplace(key, std::move(sw)).first->second;
}

// sum_{m=1}^{J-3} full[m] a_m b_{k-m} + tail terms, a = smooth factor of the
// singular function, b = the other function's samples.
cplx half_sum(const SingularWeights& w, int J, int k, const cplx* a, const cplx* b) {
    cplx acc{};
    // a, b are 1-based views
    for (int m = 1; m <= J - 3; ++m) acc += w.full[m] * (a[m] * b[k - m]);
    for (int i = 0; i < 5; ++i) {
        int m = J - 2 + i;
        acc += w.tail[J][i] * (a[m] * b[k - m]);
    }
    return acc;
}

}  // namespace

namespace {
std::atomic<int> g_threads{1};
}  // namespace

void set_thread_count(int n) { g_threads = std::max(1, n); }
int thread_count() { return g_threads; }

RayGridFunction convolve_grid(const RayGridFunction& f, const RayGridFunction& g) {
    if (f.grid() != g.grid() &&
        (f.grid()->theta != g.grid()->theta || f.grid()->h != g.grid()->h || f.grid()->M != g.grid()->M))
        throw InvalidProblem("convolution of functions on different rays/grids");
    if (f.times() != g.times()) throw InvalidProblem("convolution of functions with different time nodes");
    const double a = f.origin_exponent(), b = g.origin_exponent();
    // each factor must be integrable at its own endpoint; the result exponent a+b+1 must exceed -1
    if (a <= -1.0 || b <= -1.0 || a + b + 1.0 <= -1.0)
        throw DomainError("origin exponents give a non-integrable convolution");
    const auto& grid = *f.grid();
    const int M = grid.M;
    const double h = grid.h;
    RayGridFunction out(f.grid(), f.times(), a + b + 1.0);
    const auto& wa = singular_weights(a, h, M);
    const auto& wb = singular_weights(b, h, M);
    const auto& gjac = gauss_jacobi01(32, a, b);
    const cplx dir = grid.direction();
    constexpr int small = 64;

    std::vector<cplx> fa(M + 1), fs(M + 1), ga(M + 1), gs(M + 1);
    for (int it = 0; it < f.nt(); ++it) {
        for (int k = 1; k <= M; ++k) {
            fs[k] = f.at(k, it);
            gs[k] = g.at(k, it);
            fa[k] = fs[k] / std::pow(k * h, a);
            ga[k] = gs[k] / std::pow(k * h, b);
        }
        cplx* o = out.slice(it);
        auto targets = [&](int k0, int k1) {
            for (int k = k0; k <= k1; ++k) {
                cplx v{};
                if (k < small) {
                    double s = k * h;
                    for (std::size_t q = 0; q < gjac.x.size(); ++q) {
                        double u = gjac.x[q];
                        v += gjac.w[q] * f.phi_at(s * u, it) * g.phi_at(s * (1.0 - u), it);
                    }
                    v *= std::pow(s, a + b + 1.0);
                } else {
                    int J = k / 2;
                    v = half_sum(wa, J, k, fa.data(), gs.data()) + half_sum(wb, k - J, k, ga.data(), fs.data());
                }
                o[k - 1] = v * dir;
            }
        };
        const int nthreads = std::min(thread_count(), M / 64 + 1);
        if (nthreads <= 1) {
            targets(1, M);
        } else {
            // later targets cost more (longer paths): interleave blocks of 16
            std::vector<std::thread> pool;
            for (int w = 0; w < nthreads; ++w)
                pool.emplace_back([&, w] {
                    for (int k0 = 1 + 16 * w; k0 <= M; k0 += 16 * nthreads) targets(k0, std::min(M, k0 + 15));
                });
            for (auto& th : pool) th.join();
        }
    }
    return out;
}

cplx integrate_ray(const RayGridFunction& F, int it, const std::function<cplx(double)>& kernel,
                   double s_end, double* tail) {
    const auto& grid = *F.grid();
    const double h = grid.h;
    const double a = F.origin_exponent();
    s_end = std::min(s_end, grid.p_max());
    const auto& gj = gauss_jacobi01(10, a, 0.0);
    const auto& gl = gauss_legendre01(10);
    double nodes[6], lw[6];
    cplx acc{};
    const int panels = static_cast<int>(std::ceil(s_end / h - 1e-12));
    for (int j = 0; j < panels; ++j) {
        int st = std::clamp(j - 2, 1, grid.M - 5);
        for (int r = 0; r < 6; ++r) nodes[r] = st + r;
        cplx ph[6];
        for (int r = 0; r < 6; ++r) ph[r] = F.phi(st + r, it);
        double lo = j * h, width = std::min(h, s_end - lo);
        const QuadRule& rule = j == 0 ? gj : gl;
        cplx part{};
        for (std::size_t g = 0; g < rule.x.size(); ++g) {
            double s = lo + width * rule.x[g];
            lagrange_weights(nodes, 6, s / h, lw);
            cplx phi{};
            for (int r = 0; r < 6; ++r) phi += lw[r] * ph[r];
            double w = j == 0 ? rule.w[g] * std::pow(width, a) : rule.w[g] * std::pow(s, a);
            part += w * phi * kernel(s);
        }
        acc += part * width;
    }
    if (tail) *tail = std::abs(F.eval(s_end, it) * kernel(s_end));
    return acc;
}

RayGridFunction multiply_minus_p_power(const RayGridFunction& f, int j) {
    RayGridFunction out = f.with_exponent(f.origin_exponent() + j);
    const cplx dir = f.grid()->direction();
    for (int it = 0; it < f.nt(); ++it)
        for (int k = 1; k <= f.M(); ++k) out.at(k, it) *= std::pow(-f.grid()->node(k) * dir, j);
    return out;
}

RayGridFunction sample_series(const RamifiedSeries& s, GridPtr grid, const std::vector<double>& times,
                              double p_scale, double t_scale) {
    if (s.side() != Side::p) throw InvalidProblem("sample_series expects a p-side series");
    double alpha = s.empty() ? 0.0 : to_double(s.min_exponent());
    return RayGridFunction::sample(grid, times, alpha, [&](cplx p, double t) {
        return s.eval(p * p_scale, t * t_scale);
    });
}

double m0_constant() {
    static const double value = [] {
        auto g = [](double s) {
            return 2.0 * (1.0 + s * s) * (std::log1p(s * s) + s * std::atan(s)) / (s * (s * s + 4.0));
        };
        // coarse scan then golden section
        double best = 1e-3, bv = g(best);
        for (double s = 1e-3; s < 100.0; s *= 1.01)
            if (g(s) > bv) bv = g(s), best = s;
        double lo = best / 1.01, hi = best * 1.01;
        const double r = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 200; ++it) {
            double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
            (g(x1) < g(x2) ? lo : hi) = (g(x1) < g(x2) ? x1 : x2);
        }
        return g(0.5 * (lo + hi));
    }();
    return value;
}

NormResult nu_norm(const RayGridFunction& F, const NuNormParams& params) {
    if (F.M() == 0) throw InvalidProblem("empty grid");
    if (!(params.nu > 0.0)) throw InvalidProblem("nu must be positive");
    NormResult r;
    const double m0d = std::pow(m0_constant(), params.d);
    if (F.origin_exponent() < 0.0) {
        bool nonzero = std::any_of(F.values().begin(), F.values().end(), [](cplx v) { return v != cplx{}; });
        if (nonzero) {
            r.value = std::numeric_limits<double>::infinity();
            return r;
        }
    }
    for (int it = 0; it < F.nt(); ++it) {
        if (F.origin_exponent() == 0.0) {
            double v = std::abs(F.phi_at(0.0, it));
            if (v > r.value) r = {v, 0.0, F.times()[it], false};
        }
        for (int k = 1; k <= F.M(); ++k) {
            double s = F.grid()->node(k);
            double v = (1.0 + s * s) * std::exp(-params.nu * s) * std::abs(F.at(k, it));
            if (v > r.value) r = {v, s, F.times()[it], k == F.M()};
        }
    }
    r.value *= m0d;
    return r;
}

NormResult exp_norm(const RayGridFunction& F, const NuNormParams& params) {
    if (F.M() == 0) throw InvalidProblem("empty grid");
    NormResult r;
    for (int it = 0; it < F.nt(); ++it) {
        double t = F.times()[it];
        if (F.origin_exponent() == 0.0) {
            double v = std::abs(F.phi_at(0.0, it));
            if (v > r.value) r = {v, 0.0, t, false};
        }
        for (int k = 1; k <= F.M(); ++k) {
            double s = F.grid()->node(k);
            double v = std::abs(F.at(k, it)) * std::exp(-params.nu * (t + 1.0) * (s + std::pow(s, params.n)));
            if (v > r.value) r = {v, s, t, k == F.M()};
        }
    }
    return r;
}

void write_csv(std::ostream& out, const RayGridFunction& F, const std::string& label) {
    char buf[160];
    out << "# " << label << " theta=" << F.grid()->theta << " h=" << F.grid()->h << " M=" << F.M()
        << " nt=" << F.nt() << " origin_exponent=" << F.origin_exponent() << '\n';
    out << "ray_theta,p,t,re_F,im_F\n";
    for (int it = 0; it < F.nt(); ++it)
        for (int k = 1; k <= F.M(); ++k) {
            cplx v = F.at(k, it);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", F.grid()->theta,
                          F.grid()->node(k), F.times()[it], v.real(), v.imag());
            out << buf;
        }
}

std::vector<double> chebyshev_lobatto(int n, double T) {
    if (n < 2) return {T};
    std::vector<double> t(n);
    for (int j = 0; j < n; ++j) t[j] = 0.5 * T * (1.0 - std::cos(pi * j / (n - 1)));
    t.front() = 0.0;
    t.back() = T;
    return t;
}

}  // namespace borel
