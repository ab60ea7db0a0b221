#include "borel/oracle.hpp"

#include "borel/transforms.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <map>

namespace borel {

std::vector<double> fd_weights(const std::vector<double>& z, int order) {
    // Fornberg's recursion, evaluated at 0.
    const int n = static_cast<int>(z.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(order + 1, 0.0));
    double c1 = 1.0, c4 = z[0];
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        int mn = std::min(i, order);
        double c2 = 1.0, c5 = c4;
        c4 = z[i];
        for (int j = 0; j < i; ++j) {
            double c3 = z[i] - z[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][order];
    return w;
}

namespace {

constexpr int G = 4;  // ghost nodes per side

struct Segment {
    int N = 0;
    double x0 = 0.0, h = 0.0;
    double x(int i) const { return x0 + i * h; }  // i may be negative or >= N (ghosts)
};

Segment make_segment(const OracleConfig& c) {
    if (!(c.x_max > c.x_min) || !(c.h > 0.0)) throw InvalidProblem("oracle segment needs x_max > x_min and h > 0");
    Segment s;
    s.N = static_cast<int>(std::lround((c.x_max - c.x_min) / c.h)) + 1;
    if (s.N < 2 * G + 2) throw InvalidProblem("oracle segment too short for the 9-point stencil");
    s.x0 = c.x_min;
    s.h = (c.x_max - c.x_min) / (s.N - 1);
    return s;
}

using Vec = Eigen::VectorXcd;

class Integrator {
public:
    Integrator(const PDEProblem& pb, const Segment& seg, const BoundaryData& bd) : pb_(pb), seg_(seg), bd_(bd) {
        std::vector<double> off;
        for (int o = -G; o <= G; ++o) off.push_back(o);
        int max_order = pb.n;
        for (const auto& t : pb.terms)
            for (const auto& q : t.q) max_order = std::max(max_order, q.j.entries.at(0));
        if (max_order > 2 * G) throw InvalidProblem("derivative order exceeds the 9-point stencil");
        for (int j = 0; j <= max_order; ++j) {
            auto w = fd_weights(off, j);
            for (double& v : w) v /= std::pow(seg.h, j);
            D_.push_back(w);
        }
        Lw_.assign(2 * G + 1, cplx{});
        for (const auto& [mi, c] : pb.symbol.coeffs.at(0))
            for (int o = 0; o <= 2 * G; ++o) Lw_[o] += c * D_[mi.entries.at(0)][o];
    }

    /// Interior values plus ghosts at time t.
    Vec extend(const Vec& f, double t) const {
        Vec e(seg_.N + 2 * G);
        for (int g = 0; g < G; ++g) {
            e(g) = bd_(seg_.x(g - G), t);
            e(G + seg_.N + g) = bd_(seg_.x(seg_.N + g), t);
        }
        e.segment(G, seg_.N) = f;
        return e;
    }

    cplx deriv(const Vec& e, int i, int j) const {
        cplx s{};
        for (int o = 0; o <= 2 * G; ++o) s += D_[j][o] * e(i + o);
        return s;
    }

    /// Forcing plus nonlinear terms at time t.
    Vec explicit_part(const Vec& f, double t) const {
        Vec e = extend(f, t);
        Vec out(seg_.N);
        for (int i = 0; i < seg_.N; ++i) {
            double x = seg_.x(i);
            cplx v = pb_.forcing.empty() ? cplx{} : pb_.forcing[0].eval(x, t);
            for (const auto& term : pb_.terms) {
                cplx m = term.coeff.eval(x, t);
                if (!term.k.empty()) m *= std::pow(f(i), term.k[0]);
                for (const auto& q : term.q) m *= std::pow(deriv(e, i, q.j.entries.at(0)), q.power);
                v += m;
            }
            out(i) = v;
        }
        return out;
    }

    /// P(d/dx) applied to the ghost layer only (interior entries zero).
    Vec ghost_part(double t) const {
        Vec e = extend(Vec::Zero(seg_.N), t);
        Vec out(seg_.N);
        for (int i = 0; i < seg_.N; ++i) {
            cplx s{};
            for (int o = 0; o <= 2 * G; ++o) s += Lw_[o] * e(i + o);
            out(i) = s;
        }
        return out;
    }

    Eigen::SparseMatrix<cplx> system(cplx diag, cplx scale) const {
        std::vector<Eigen::Triplet<cplx>> trip;
        for (int i = 0; i < seg_.N; ++i) {
            trip.emplace_back(i, i, diag);
            for (int o = -G; o <= G; ++o) {
                int col = i + o;
                if (col >= 0 && col < seg_.N && Lw_[o + G] != cplx{}) trip.emplace_back(i, col, scale * Lw_[o + G]);
            }
        }
        Eigen::SparseMatrix<cplx> A(seg_.N, seg_.N);
        A.setFromTriplets(trip.begin(), trip.end());
        return A;
    }

private:
    const PDEProblem& pb_;
    Segment seg_;
    const BoundaryData& bd_;
    std::vector<std::vector<double>> D_;
    std::vector<cplx> Lw_;
};

std::vector<Vec> run(const PDEProblem& pb, const Segment& seg, const BoundaryData& bd, int steps, double t_end,
                     const std::vector<int>& record) {
    Integrator I(pb, seg, bd);
    const double dt = t_end / steps;
    Vec f(seg.N);
    for (int i = 0; i < seg.N; ++i) f(i) = pb.initial.empty() ? cplx{} : pb.initial[0].eval(seg.x(i), 0.0);

    std::map<int, Vec> kept;
    auto keep = [&](int s, const Vec& v) {
        for (int r : record)
            if (r == s) kept[s] = v;
    };
    keep(0, f);

    // backward Euler start, then BDF2 with extrapolated explicit part
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> be, bdf;
    auto A1 = I.system(1.0, dt);
    be.compute(A1);
    auto A2 = I.system(3.0, 2.0 * dt);
    bdf.compute(A2);
    if (be.info() != Eigen::Success || bdf.info() != Eigen::Success)
        throw NumericalFailure("oracle: factorization of the implicit operator failed");

    Vec N_prev = I.explicit_part(f, 0.0);
    Vec f_prev = f;
    {
        Vec rhs = f + dt * (N_prev - I.ghost_part(dt));
        f = be.solve(rhs);
    }
    keep(1, f);
    for (int s = 2; s <= steps; ++s) {
        double t_old = (s - 1) * dt, t_new = s * dt;
        Vec N_cur = I.explicit_part(f, t_old);
        Vec rhs = 4.0 * f - f_prev + 2.0 * dt * (2.0 * N_cur - N_prev - I.ghost_part(t_new));
        Vec f_new = bdf.solve(rhs);
        if (!f_new.allFinite())
            throw NumericalFailure("oracle: non-finite values at t = " + std::to_string(t_new));
        f_prev = f;
        f = f_new;
        N_prev = N_cur;
        keep(s, f);
    }
    std::vector<Vec> out;
    for (int r : record) out.push_back(kept.at(r));
    return out;
}

}  // namespace

OracleResult oracle_integrate(const PDEProblem& problem, const OracleConfig& config, const BoundaryData& boundary) {
    if (problem.m != 1 || problem.d != 1) throw InvalidProblem("the finite-difference oracle handles scalar d = 1 problems only");
    if (config.theta_x != 0.0) throw InvalidProblem("the finite-difference oracle integrates on the real axis only");
    if (!(config.dt > 0.0) || !(config.t_end > 0.0)) throw InvalidProblem("oracle needs dt > 0 and t_end > 0");
    Segment seg = make_segment(config);
    const int steps = static_cast<int>(std::lround(config.t_end / config.dt));
    if (steps < 2) throw InvalidProblem("oracle needs at least two time steps");

    OracleResult res;
    res.times = config.output_times;
    if (res.times.empty())
        for (int k = 1; k <= 8; ++k) res.times.push_back(config.t_end * k / 8.0);
    std::vector<int> rec;
    for (double t : res.times) {
        double s = t / config.t_end * steps;
        if (t < 0.0 || t > config.t_end + 1e-12 || std::abs(s - std::lround(s)) > 1e-9)
            throw InvalidProblem("oracle output time " + std::to_string(t) + " is not on the step lattice");
        rec.push_back(static_cast<int>(std::lround(s)));
    }
    for (int i = 0; i < seg.N; ++i) res.x.push_back(seg.x(i));

    auto coarse = run(problem, seg, boundary, steps, config.t_end, rec);
    res.steps = steps;
    if (config.richardson) {
        std::vector<int> rec2;
        for (int r : rec) rec2.push_back(2 * r);
        auto fine = run(problem, seg, boundary, 2 * steps, config.t_end, rec2);
        for (std::size_t k = 0; k < rec.size(); ++k) coarse[k] = (4.0 * fine[k] - coarse[k]) / 3.0;
        res.steps += 2 * steps;
    }
    for (const auto& v : coarse) res.values.emplace_back(v.data(), v.data() + v.size());
    return res;
}

BoundaryData borel_boundary(const RayGridFunction& F, const OracleConfig& config) {
    Segment seg = make_segment(config);
    auto table = std::make_shared<std::map<long, std::vector<cplx>>>();
    auto key = [h = seg.h, x0 = seg.x0](double x) { return std::lround((x - x0) / h); };
    for (int g = 1; g <= G; ++g)
        for (int i : {-g, seg.N - 1 + g}) {
            std::vector<cplx> vals;
            for (int it = 0; it < F.nt(); ++it) vals.push_back(laplace_ray(F, seg.x(i), it).value);
            (*table)[i] = std::move(vals);
        }
    auto times = F.times();
    auto w = barycentric_weights(times);
    return [table, key, times, w, Fc = F, seg](double x, double t) -> cplx {
        long k = key(x);
        auto it = table->find(k);
        if (it == table->end() || std::abs(seg.x(static_cast<int>(k)) - x) > 1e-9 * seg.h)
            return laplace_ray_at(Fc, x, t).value;
        const auto& v = it->second;
        cplx num{};
        double den = 0.0;
        for (std::size_t j = 0; j < times.size(); ++j) {
            double d = t - times[j];
            if (d == 0.0) return v[j];
            num += w[j] / d * v[j];
            den += w[j] / d;
        }
        return num / den;
    };
}

}  // namespace borel
