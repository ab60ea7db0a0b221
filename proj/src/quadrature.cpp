#include "borel/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace borel {

namespace {

QuadRule golub_welsch(int n, double alpha, double beta) {
    // Jacobi polynomials on [-1,1], weight (1-x)^alpha (1+x)^beta
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    const double ab = alpha + beta;
    for (int k = 0; k < n; ++k) {
        double denom = (2.0 * k + ab) * (2.0 * k + ab + 2.0);
        J(k, k) = (k == 0) ? (beta - alpha) / (ab + 2.0)
                           : (beta * beta - alpha * alpha) / denom;
        if (k + 1 < n) {
            double kk = k + 1.0;
            double b;
            if (kk == 1.0) {
                b = 4.0 * (1.0 + alpha) * (1.0 + beta) /
                    ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
            } else {
                double s = 2.0 * kk + ab;
                b = 4.0 * kk * (kk + alpha) * (kk + beta) * (kk + ab) /
                    (s * s * (s + 1.0) * (s - 1.0));
            }
            J(k, k + 1) = J(k + 1, k) = std::sqrt(b);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    // weights on [0,1] for u^beta (1-u)^alpha: total mass B(beta+1, alpha+1)
    double mass = std::exp(std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                           std::lgamma(ab + 2.0));
    QuadRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double v0 = es.eigenvectors()(0, i);
        r.x[i] = 0.5 * (1.0 + es.eigenvalues()(i));
        r.w[i] = mass * v0 * v0;
    }
    return r;
}

std::mutex cache_mutex;

}  // namespace

const QuadRule& gauss_legendre01(int n) {
    return gauss_jacobi01(n, 0.0, 0.0);
}

const QuadRule& gauss_jacobi01(int n, double a, double b) {
    static std::map<std::tuple<int, double, double>, QuadRule> cache;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto key = std::make_tuple(n, a, b);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    // u^a (1-u)^b  <->  (1+x)^a (1-x)^b
    return cache.emplace(key, golub_welsch(n, b, a)).first->second;
}

void lagrange_weights(const double* nodes, int count, double x, double* out) {
    for (int m = 0; m < count; ++m) {
        double v = 1.0;
        for (int k = 0; k < count; ++k)
            if (k != m) v *= (x - nodes[k]) / (nodes[m] - nodes[k]);
        out[m] = v;
    }
}

std::vector<double> composite_weights(int n) {
    std::vector<double> w(n + 1, 0.0);
    const auto& gl = gauss_legendre01(4);
    double nodes[6];
    double lw[6];
    for (int j = 0; j < n; ++j) {
        int s = std::clamp(j - 2, 0, n - 5);
        for (int m = 0; m < 6; ++m) nodes[m] = s + m;
        for (std::size_t g = 0; g < gl.x.size(); ++g) {
            lagrange_weights(nodes, 6, j + gl.x[g], lw);
            for (int m = 0; m < 6; ++m) w[s + m] += gl.w[g] * lw[m];
        }
    }
    return w;
}

}  // namespace borel
