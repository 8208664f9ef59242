#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"

namespace caphom {

/// Gauss-Legendre nodes/weights on [-1, 1], Newton on P_n.
inline void gauss_legendre(int n, std::vector<double> &x, std::vector<double> &w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev-based initial guess, then Newton.
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (t * p1 - p0) / (t * t - 1.0);
        x[n - 1 - i] = t;
        w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

/// Quadrature on the unit sphere: product of Gauss-Legendre in cos(theta)
/// and the uniform trapezoid rule in azimuth. Weights sum to 4 pi; exact for
/// spherical polynomials up to degree min(2 n_theta - 1, n_phi - 1).
struct SphereRule {
    std::vector<Eigen::Vector3d> nodes;
    std::vector<double> weights;
    int exact_degree = 0;

    static SphereRule product(int n_theta, int n_phi) {
        SphereRule r;
        std::vector<double> ct, wt;
        gauss_legendre(n_theta, ct, wt);
        const double wphi = 2.0 * M_PI / n_phi;
        r.nodes.reserve(static_cast<std::size_t>(n_theta) * n_phi);
        r.weights.reserve(static_cast<std::size_t>(n_theta) * n_phi);
        for (int i = 0; i < n_theta; ++i) {
            double c = ct[i], s = std::sqrt(std::max(0.0, 1.0 - c * c));
            for (int j = 0; j < n_phi; ++j) {
                double phi = wphi * j;
                r.nodes.emplace_back(s * std::cos(phi), s * std::sin(phi), c);
                r.weights.push_back(wt[i] * wphi);
            }
        }
        r.exact_degree = std::min(2 * n_theta - 1, n_phi - 1);
        return r;
    }

    static SphereRule for_degree(int degree) {
        int n_theta = degree / 2 + 1;
        return product(n_theta, 2 * n_theta);
    }

    std::size_t size() const { return nodes.size(); }

    /// Integral over the unit sphere.
    template <class F>
    double integrate(F &&f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
        return s;
    }
};

/// Exact moment of x^p y^q z^r over the unit sphere (double factorial
/// formula); zero for any odd exponent.
inline double sphere_monomial_moment(int p, int q, int r) {
    if (p % 2 || q % 2 || r % 2) return 0.0;
    auto dfac = [](int n) {
        double v = 1.0;
        for (int k = n; k > 1; k -= 2) v *= k;
        return v;
    };
    return 4.0 * M_PI * dfac(p - 1) * dfac(q - 1) * dfac(r - 1) / dfac(p + q + r + 1);
}

} // namespace caphom
