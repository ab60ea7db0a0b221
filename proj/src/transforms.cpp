#include "borel/transforms.hpp"

#include "borel/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace borel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// least-squares slope of log|F| against s over the outer quarter of the grid
double fitted_growth(const RayGridFunction& F, int it) {
    const int M = F.M();
    const int k0 = M - M / 4;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int k = k0; k <= M; ++k) {
        double a = std::abs(F.at(k, it));
        if (!(a > 0.0)) continue;
        double s = F.grid()->node(k), y = std::log(a);
        sx += s; sy += y; sxx += s * s; sxy += s * y;
        ++cnt;
    }
    if (cnt < 4) return -kInf;
    double den = cnt * sxx - sx * sx;
    return (cnt * sxy - sx * sy) / den;
}

template <class Fn>
cplx gl_cell(const Fn& f, double a, double b, const QuadRule& rule) {
    cplx acc{};
    for (std::size_t i = 0; i < rule.x.size(); ++i) acc += rule.w[i] * f(a + (b - a) * rule.x[i]);
    return acc * (b - a);
}

}  // namespace

LaplaceResult laplace_ray(const RayGridFunction& F, cplx x, int it, std::optional<double> growth) {
    const auto& grid = *F.grid();
    const cplx e = grid.direction();
    const cplx y = e * x;  // kernel e^{-s y} in the radial variable
    LaplaceResult res;
    res.growth_rate = growth ? *growth : fitted_growth(F, it);
    if (!(y.real() > res.growth_rate))
        throw DomainError("Laplace transform needs Re(e^{i theta} x) > " + std::to_string(res.growth_rate) +
                          " (growth rate of F on ray " + std::to_string(grid.theta) + "), got " +
                          std::to_string(y.real()));
    // stop where the integrand has fallen far below its peak
    double peak = 0.0;
    int last = grid.M;
    for (int k = 1; k <= grid.M; ++k) {
        double s = grid.node(k);
        double mag = std::abs(F.at(k, it)) * std::exp(-s * y.real());
        peak = std::max(peak, mag);
        if (k > 16 && mag < 1e-17 * peak) {
            bool quiet = true;
            for (int j = k; j <= std::min(grid.M, k + 8); ++j)
                if (std::abs(F.at(j, it)) * std::exp(-grid.node(j) * y.real()) >= 1e-17 * peak) quiet = false;
            if (quiet) {
                last = k;
                break;
            }
        }
    }
    double tail_mag = 0.0;
    cplx v = integrate_ray(F, it, [&](double s) { return std::exp(-s * y); }, grid.node(last), &tail_mag);
    res.value = e * v;
    if (last == grid.M) {
        double rate = y.real() - std::max(res.growth_rate, -1e300);
        res.tail_estimate = rate > 0 ? tail_mag / rate : kInf;
    }
    return res;
}

LaplaceResult laplace_ray_at(const RayGridFunction& F, cplx x, double t, std::optional<double> growth) {
    const auto& times = F.times();
    if (times.size() == 1) return laplace_ray(F, x, 0, growth);
    std::vector<LaplaceResult> per(times.size());
    for (std::size_t j = 0; j < times.size(); ++j) {
        per[j] = laplace_ray(F, x, static_cast<int>(j), growth);
        if (t == times[j]) return per[j];
    }
    auto w = barycentric_weights(times);
    cplx num{};
    double den = 0.0;
    LaplaceResult out;
    for (std::size_t j = 0; j < times.size(); ++j) {
        double c = w[j] / (t - times[j]);
        num += c * per[j].value;
        den += c;
        out.tail_estimate = std::max(out.tail_estimate, per[j].tail_estimate);
        out.growth_rate = std::max(out.growth_rate, per[j].growth_rate);
    }
    out.value = num / den;
    return out;
}

ContourResult inverse_laplace_contour(const std::function<cplx(cplx)>& g, cplx p, const ContourSpec& spec) {
    const double ap = std::abs(p);
    if (!(ap > 0.0)) throw InvalidProblem("inverse Laplace transform needs p != 0");
    if (!(spec.phi > 0.0 && spec.phi < pi / 2)) throw InvalidProblem("contour arm angle must lie in (0, pi/2)");
    const double argp = std::arg(p);
    const double decay = ap * std::min(std::sin(spec.phi + argp), std::sin(spec.phi - argp));
    if (!(decay > 0.0)) throw InvalidProblem("contour arms do not decay for this p (|arg p| >= arm angle)");
    const double sigma = spec.rho1 + 1.0 / ap;
    const double L = spec.truncation > 0.0 ? spec.truncation : 37.0 / decay;
    const double cell = std::min(0.5 / ap, L / 8.0);
    const int ncell = static_cast<int>(std::ceil(L / cell));
    const auto& hi = gauss_legendre01(spec.nodes);
    const auto& lo = gauss_legendre01(std::max(2, spec.nodes / 2));

    ContourResult res;
    cplx total_hi{}, total_lo{};
    double tail = 0.0;
    for (int side = 0; side < 2; ++side) {
        const double psi = side == 0 ? pi / 2 + spec.phi : -(pi / 2 + spec.phi);
        const cplx dir = std::polar(1.0, psi);
        auto f = [&](double r) {
            cplx x = sigma + r * dir;
            return std::exp(p * x) * g(x) * dir;
        };
        const double sgn = side == 0 ? 1.0 : -1.0;
        for (int c = 0; c < ncell; ++c) {
            double a = c * cell, b = std::min(L, (c + 1) * cell);
            total_hi += sgn * gl_cell(f, a, b, hi);
            total_lo += sgn * gl_cell(f, a, b, lo);
        }
        tail += std::abs(f(L)) / decay;
    }
    const cplx norm = 1.0 / cplx(0.0, 2.0 * pi);
    res.value = total_hi * norm;
    res.error_estimate = (std::abs(total_hi - total_lo) + tail) / (2.0 * pi);
    if (!(res.error_estimate <= spec.tol * std::max(1.0, std::abs(res.value)))) {
        res.warning = true;
        res.message = "contour quadrature error estimate " + std::to_string(res.error_estimate) +
                      " exceeds tolerance";
    }
    return res;
}

double acceleration_kernel_n2(double p, double q) {
    return q * std::pow(p, -1.5) * std::exp(-q * q / (4.0 * p)) / (2.0 * std::sqrt(pi));
}

namespace {

// K(1, Q) on the parabola u = mu (1 + i theta)^2 through the saddle of u - Q u^alpha
KernelValue kernel_unit_contour(double Q, double alpha, double c0) {
    const double ustar = Q > 0 ? std::pow(alpha * Q, 1.0 / (1.0 - alpha)) : 0.0;
    const double mu = std::max(ustar, c0);
    auto log_mag = [&](double th) {
        cplx u = mu * (1.0 + cplx(0, th)) * (1.0 + cplx(0, th));
        cplx ex = u - Q * std::pow(u, alpha);
        return ex.real() + std::log(std::hypot(1.0, th));
    };
    auto f = [&](double th) {
        cplx z = 1.0 + cplx(0, th);
        cplx u = mu * z * z;
        return (std::exp(u - Q * std::pow(u, alpha)) * z).real();
    };
    const double peak = log_mag(0.0);
    // far tail: the saddle value underflows (or mu overflows), the kernel is zero in double
    if (!std::isfinite(mu) || !(peak > -740.0)) return {};
    double Th = 1.0;
    while (log_mag(Th) > peak - 50.0 && Th < 1e4) Th *= 1.25;
    // trapezoid on [0, Th] for the even real part; integrand is analytic so the
    // error falls geometrically with the step
    int n = 32;
    auto trap = [&](int count) {
        double h = Th / count, acc = 0.5 * f(0.0);
        for (int i = 1; i <= count; ++i) acc += f(i * h);
        return acc * h;
    };
    double prev = trap(n), err = kInf;
    double scale = std::exp(peak);
    for (int lvl = 0; lvl < 14; ++lvl) {
        n *= 2;
        double cur = trap(n);
        err = std::abs(cur - prev);
        prev = cur;
        if (err <= 1e-15 * std::max(std::abs(cur), 1e-300) || err <= 1e-17 * scale) break;
    }
    KernelValue kv;
    kv.value = 2.0 * mu / pi * prev;
    kv.error = 2.0 * mu / pi * err;
    return kv;
}

}  // namespace

KernelValue acceleration_kernel(double p, double q, const AccelerationSpec& spec) {
    if (!(p > 0.0) || !(q >= 0.0)) throw InvalidProblem("acceleration kernel needs p > 0, q >= 0");
    if (spec.n < 2) throw InvalidProblem("acceleration order must be at least 2");
    if (spec.n == 2 && !spec.force_contour) return {acceleration_kernel_n2(p, q), 0.0};
    const double a = spec.alpha();
    // homogeneity: K(p, q) = p^{-1} K(1, q p^{-alpha})
    KernelValue kv = kernel_unit_contour(q * std::pow(p, -a), a, spec.bromwich_c);
    kv.value /= p;
    kv.error /= p;
    return kv;
}

double kernel_moment(int k, double p, int n) {
    const double a = double(n - 1) / n;
    return std::exp(std::lgamma(k + 1.0) - std::lgamma(a * (k + 1))) * std::pow(p, a * (k + 1) - 1.0);
}

namespace {

struct UnitKernelTable {
    std::vector<double> v, w, K, err;
};

constexpr double kVCell = 0.25;

double decay_rate(int n) { return std::pow(double(n - 1) / n, n - 1) / n; }

UnitKernelTable unit_kernel_table(double v_max, const AccelerationSpec& spec) {
    UnitKernelTable t;
    const auto& rule = gauss_legendre01(spec.quad_nodes);
    const int cells = static_cast<int>(std::ceil(v_max / kVCell));
    for (int c = 0; c < cells; ++c) {
        double a = c * kVCell;
        for (std::size_t i = 0; i < rule.x.size(); ++i) {
            double v = a + kVCell * rule.x[i];
            KernelValue kv = acceleration_kernel(1.0, v, spec);
            t.v.push_back(v);
            t.w.push_back(rule.w[i] * kVCell);
            t.K.push_back(kv.value);
            t.err.push_back(kv.error);
        }
    }
    return t;
}

// log of the certificate bound for G at q
double log_bound(const GrowthCertificate& c, double q) {
    return std::log(c.C) + c.nu * (q + std::pow(q, c.n));
}

// v where the kernel times the certificate bound has dropped by e^{-45}
double v_extent(const GrowthCertificate& cert, double w, int n) {
    const double c = decay_rate(n);
    const double eff = c - cert.nu * std::pow(w, n);
    if (!(eff > 0.0)) return kInf;
    double v = 1.0;
    while (eff * std::pow(v, n) - cert.nu * w * v - std::log(std::max(cert.C, 1.0)) < 45.0) v *= 1.1;
    return v;
}

struct HValue {
    cplx value;
    double error = 0.0;
};

HValue H_at(const std::function<cplx(double)>& G, const UnitKernelTable& tab, const GrowthCertificate& cert,
            double w, double q_limit) {
    HValue h;
    double kerr = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < tab.v.size(); ++i) {
        double q = w * tab.v[i];
        if (q > q_limit) break;
        cplx g = G(q);
        h.value += tab.w[i] * tab.K[i] * g;
        kerr += tab.w[i] * tab.err[i] * std::abs(g);
        last = i;
    }
    // tail beyond the last node used, from the certificate
    double vl = tab.v.empty() ? 0.0 : tab.v[last];
    double ql = w * vl;
    double slope = decay_rate(cert.n) * cert.n * std::pow(vl, cert.n - 1) -
                   cert.nu * (w + cert.n * std::pow(w, cert.n) * std::pow(vl, cert.n - 1));
    double tail = std::abs(tab.K.empty() ? 0.0 : tab.K[last]) * std::exp(log_bound(cert, ql));
    h.error = kerr + (slope > 0 ? tail / slope : kInf);
    return h;
}


AccelerationResult run_accelerate(const std::function<cplx(double)>& G, const GrowthCertificate& cert,
                                  const std::vector<double>& p_grid, const std::vector<double>& check_x,
                                  const AccelerationSpec& spec, double q_limit) {
    const int n = spec.n;
    const double a = spec.alpha();
    AccelerationResult res;

    // w range: p-grid and the identity integrals
    double w_hi = 0.0;
    for (double p : p_grid) {
        if (!(p > 0.0)) throw InvalidProblem("acceleration p-grid must be positive");
        w_hi = std::max(w_hi, std::pow(p, a));
    }
    const double expo = double(n) / (n - 1);
    double w_end = 0.0;
    for (double x : check_x) {
        if (!(x > 0.0)) throw InvalidProblem("identity check points must be positive");
        w_end = std::max(w_end, std::pow(42.0, 1.0 / expo) / x);
    }
    double v_max = 0.0;
    for (double w : {0.0, w_hi, w_end}) {
        double e = v_extent(cert, w, n);
        if (std::isfinite(e)) v_max = std::max(v_max, e);
    }
    if (spec.q_max > 0.0) q_limit = std::min(q_limit, spec.q_max);
    UnitKernelTable tab = unit_kernel_table(v_max, spec);

    for (double p : p_grid) {
        double w = std::pow(p, a);
        res.p.push_back(p);
        if (!std::isfinite(v_extent(cert, w, n))) {
            res.g1.push_back(cplx(std::numeric_limits<double>::quiet_NaN(), 0.0));
            res.kernel_error.push_back(kInf);
            res.kernel_error_max = kInf;
            continue;
        }
        HValue h = H_at(G, tab, cert, w, q_limit);
        double pref = std::pow(p, -1.0 / n);
        res.g1.push_back(pref * h.value);
        res.kernel_error.push_back(pref * h.error);
        res.kernel_error_max = std::max(res.kernel_error_max, pref * h.error);
    }

    const auto& rule = gauss_legendre01(16);
    for (double x : check_x) {
        IdentityRow row;
        row.x = x;
        // left: int e^{-q x} G(q) dq, cells of width 1/(4x) until negligible
        {
            const double cell = 0.25 / x;
            double peak = 0.0;
            int quiet = 0;
            for (int c = 0; c < 400000 && quiet < 4; ++c) {
                double lo = c * cell, hi = lo + cell;
                if (lo >= q_limit) break;
                hi = std::min(hi, q_limit);
                double mag = 0.0;
                cplx part{};
                for (std::size_t i = 0; i < rule.x.size(); ++i) {
                    double q = lo + (hi - lo) * rule.x[i];
                    cplx v = std::exp(-q * x) * G(q);
                    part += rule.w[i] * v;
                    mag = std::max(mag, std::abs(v));
                }
                row.lhs += part * (hi - lo);
                peak = std::max(peak, mag);
                quiet = mag < 1e-18 * peak ? quiet + 1 : 0;
            }
        }
        // right: (n/(n-1)) int e^{-(w x)^{n/(n-1)}} H(w) dw
        {
            const double W = std::pow(42.0, 1.0 / expo) / x;
            const double cell = std::min(0.25, W / 16);
            const int cells = static_cast<int>(std::ceil(W / cell));
            cplx acc{};
            for (int c = 0; c < cells; ++c) {
                double lo = c * cell, hi = std::min(W, lo + cell);
                cplx part{};
                for (std::size_t i = 0; i < rule.x.size(); ++i) {
                    double w = lo + (hi - lo) * rule.x[i];
                    if (!std::isfinite(v_extent(cert, w, n))) {
                        part = cplx(std::numeric_limits<double>::quiet_NaN());
                        break;
                    }
                    part += rule.w[i] * std::exp(-std::pow(w * x, expo)) * H_at(G, tab, cert, w, q_limit).value;
                }
                acc += part * (hi - lo);
            }
            row.rhs = expo * acc;
        }
        res.identity_check.push_back(row);
    }
    return res;
}

}  // namespace

AccelerationResult accelerate(const std::function<cplx(double)>& G,
                              const std::optional<GrowthCertificate>& certificate,
                              const std::vector<double>& p_grid, const std::vector<double>& check_x,
                              const AccelerationSpec& spec) {
    if (!certificate)
        throw InvalidProblem("acceleration refused: no exponential growth certificate for G");
    if (certificate->n != spec.n)
        throw InvalidProblem("growth certificate order differs from the acceleration order");
    if (!(certificate->C > 0.0) || certificate->nu < 0.0)
        throw InvalidProblem("growth certificate needs C > 0 and nu >= 0");
    return run_accelerate(G, *certificate, p_grid, check_x, spec, kInf);
}

AccelerationResult accelerate(const RayGridFunction& G, int it, double nu, const std::vector<double>& p_grid,
                              const std::vector<double>& check_x, const AccelerationSpec& spec) {
    GrowthCertificate cert;
    cert.n = spec.n;
    cert.nu = nu;
    cert.C = 0.0;
    for (int k = 1; k <= G.M(); ++k) {
        double s = G.grid()->node(k);
        cert.C = std::max(cert.C, std::abs(G.at(k, it)) * std::exp(-nu * (s + std::pow(s, spec.n))));
    }
    if (G.origin_exponent() >= 0.0) {
        cert.C = std::max(cert.C, std::abs(G.eval(0.0, it)));
    } else {
        throw InvalidProblem("acceleration refused: G is unbounded at the origin, no growth certificate");
    }
    if (!(cert.C > 0.0)) cert.C = 1e-300;
    auto fn = [&](double q) { return G.eval(q, it); };
    return run_accelerate(fn, cert, p_grid, check_x, spec, G.grid()->p_max());
}

namespace {

// monomial coefficients of a degree-`deg` fit of f on [0, r] at Chebyshev points
std::vector<double> taylor_fit(const std::function<double(double)>& f, double r, int deg) {
    const int m = 2 * deg + 8;
    Eigen::MatrixXd A(m, deg + 1);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
        double u = 0.5 * (1.0 - std::cos(pi * (i + 0.5) / m));
        double pw = 1.0;
        for (int k = 0; k <= deg; ++k, pw *= u) A(i, k) = pw;
        b(i) = f(u * r);
    }
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    std::vector<double> out(deg + 1);
    for (int k = 0; k <= deg; ++k) out[k] = c(k) / std::pow(r, k);
    return out;
}

}  // namespace

std::vector<WatsonRow> watson_check(const std::function<cplx(double)>& G, int count,
                                    const AccelerationSpec& spec) {
    const int deg = 12;
    const double r = 0.5;
    const double a = spec.alpha();
    GrowthCertificate cert{1.0, 0.0, spec.n};
    // H(w) needs only |G| bounded on the sampled range
    double gmax = 0.0;
    for (int i = 0; i <= 200; ++i) gmax = std::max(gmax, std::abs(G(i * 0.05)));
    cert.C = std::max(gmax, 1.0);
    UnitKernelTable tab = unit_kernel_table(v_extent(cert, 0.0, spec.n), spec);
    auto gc = taylor_fit([&](double q) { return G(q).real(); }, r, deg);
    auto hc = taylor_fit([&](double w) { return H_at(G, tab, cert, w, kInf).value.real(); }, r, deg);
    std::vector<WatsonRow> rows;
    for (int k = 0; k < count && k <= deg; ++k) {
        WatsonRow row;
        row.k = k;
        row.from_g = gc[k] * std::tgamma(k + 1.0);
        row.from_g1 = hc[k] * std::tgamma(a * (k + 1));
        rows.push_back(row);
    }
    return rows;
}

CAlphaFit fit_c_alpha(int n, double x_lo, double x_hi, const AccelerationSpec& base) {
    AccelerationSpec spec = base;
    spec.n = n;
    spec.force_contour = true;
    const int m = 24;
    Eigen::MatrixXd A(m, 3);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
        double X = x_lo * std::pow(x_hi / x_lo, double(i) / (m - 1));
        double K = acceleration_kernel(1.0, std::pow(X, 1.0 / n), spec).value;
        A(i, 0) = 1.0;
        A(i, 1) = std::log(X);
        A(i, 2) = -X;
        b(i) = std::log(K / X);
    }
    Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    CAlphaFit fit;
    fit.constant = std::exp(c(0));
    fit.exponent = c(1);
    fit.c = c(2);
    fit.c_exact = decay_rate(n);
    return fit;
}

}  // namespace borel
