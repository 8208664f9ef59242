#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "capillary.hpp"
#include "common.hpp"
#include "poly3.hpp"
#include "sphere_rule.hpp"

namespace caphom {

// ---------------------------------------------------------------------------
// Real spherical harmonics up to degree 4, as homogeneous solid polynomials.
//
// Y_lm on the sphere is P_lm(x)/r^l with P_lm homogeneous of degree l,
//   P_lm = N_lm * Re/Im[(x+iy)^|m|] * G_l|m|(z, r^2),
// where G is the sinus-reduced associated Legendre polynomial homogenized
// with r^2 = x^2+y^2+z^2. Normalized to be orthonormal in L^2 of the unit
// sphere (verified by quadrature in the tests; sign conventions are
// irrelevant for projections and Rayleigh quotients).
// ---------------------------------------------------------------------------

namespace detail {

/// Reduced associated Legendre G_lm(c) with P_l^m(c) = (1-c^2)^(m/2) G_lm(c),
/// homogenized: returns polynomial in (z, r2) of homogeneous degree l-m.
inline Poly3 legendre_reduced_homog(int l, int m) {
    // Coefficient table for G_lm(c) = sum_k g_k c^k, k = l-m, l-m-2, ...
    auto poly = [](std::initializer_list<std::pair<int, double>> cs) {
        std::vector<std::pair<int, double>> v(cs);
        return v;
    };
    std::vector<std::pair<int, double>> g;
    switch (l * 10 + m) {
    case 0:  g = poly({{0, 1.0}}); break;
    case 10: g = poly({{1, 1.0}}); break;
    case 11: g = poly({{0, 1.0}}); break;
    case 20: g = poly({{2, 1.5}, {0, -0.5}}); break;
    case 21: g = poly({{1, 3.0}}); break;
    case 22: g = poly({{0, 3.0}}); break;
    case 30: g = poly({{3, 2.5}, {1, -1.5}}); break;
    case 31: g = poly({{2, 7.5}, {0, -1.5}}); break;
    case 32: g = poly({{1, 15.0}}); break;
    case 33: g = poly({{0, 15.0}}); break;
    case 40: g = poly({{4, 35.0 / 8}, {2, -30.0 / 8}, {0, 3.0 / 8}}); break;
    case 41: g = poly({{3, 17.5}, {1, -7.5}}); break;
    case 42: g = poly({{2, 52.5}, {0, -7.5}}); break;
    case 43: g = poly({{1, 105.0}}); break;
    case 44: g = poly({{0, 105.0}}); break;
    default: throw DomainFault("legendre_reduced_homog: degree out of range");
    }
    // Homogenize: c^k -> z^k * r2^((l-m-k)/2).
    Poly3 out;
    Poly3 r2 = Poly3::r2();
    for (auto [k, coef] : g) {
        Poly3 term(coef);
        for (int i = 0; i < k; ++i) term = term * Poly3::z();
        int half = (l - m - k) / 2;
        for (int i = 0; i < half; ++i) term = term * r2;
        out += term;
    }
    return out;
}

/// Re[(x+iy)^m] and Im[(x+iy)^m].
inline Poly3 azimuthal_part(int m, bool imag) {
    Poly3 re(1.0), im(0.0);
    for (int k = 0; k < m; ++k) {
        Poly3 re2 = re * Poly3::x() - im * Poly3::y();
        Poly3 im2 = re * Poly3::y() + im * Poly3::x();
        re = re2;
        im = im2;
    }
    return imag ? im : re;
}

inline double factorial(int n) {
    double v = 1.0;
    for (int k = 2; k <= n; ++k) v *= k;
    return v;
}

} // namespace detail

/// Solid harmonic P_lm, homogeneous of degree l; m in [-l, l], negative m are
/// the sine branch. Y_lm(x) = P_lm(x)/|x|^l is orthonormal on the unit sphere.
inline Poly3 solid_harmonic(int l, int m) {
    if (l < 0 || l > 4 || std::abs(m) > l) throw DomainFault("solid_harmonic: invalid (l, m)");
    int am = std::abs(m);
    double norm = std::sqrt((2.0 * l + 1.0) / (4.0 * M_PI) * detail::factorial(l - am) /
                            detail::factorial(l + am));
    if (am > 0) norm *= std::sqrt(2.0);
    Poly3 p = detail::legendre_reduced_homog(l, am);
    if (am > 0) p = p * detail::azimuthal_part(am, m < 0);
    return norm * p;
}

inline int harmonic_count(int lmax) { return (lmax + 1) * (lmax + 1); }

/// Flat index over (l, m), l <= lmax, m = -l..l.
inline std::pair<int, int> harmonic_lm(int flat) {
    int l = 0;
    while ((l + 1) * (l + 1) <= flat) ++l;
    return {l, flat - l * l - l};
}

// ---------------------------------------------------------------------------
// Scalar samples on the sphere of radius a at the nodes of a rule.
// ---------------------------------------------------------------------------
struct SphereField {
    double a = 1.0;
    const SphereRule *rule = nullptr;
    Eigen::VectorXd values; // one sample per rule node
    // Ambient gradient of the field's extension, evaluated at a point of
    // the sphere of radius a. Empty when only samples are known.
    std::function<Eigen::Vector3d(const Eigen::Vector3d &)> ambient_gradient;

    template <class F>
    static SphereField from_function(const SphereRule &rule, double a, F &&f) {
        SphereField s;
        s.a = a;
        s.rule = &rule;
        s.values.resize(static_cast<Eigen::Index>(rule.size()));
        for (std::size_t i = 0; i < rule.size(); ++i) s.values[static_cast<Eigen::Index>(i)] = f(a * rule.nodes[i]);
        return s;
    }

    /// Band-limited field sum_lm c_lm Y_lm(x/|x|) with the exact ambient
    /// gradient of its degree-homogeneous extension P(x)/|x|^l.
    static SphereField from_harmonics(const SphereRule &rule, double a, const Eigen::VectorXd &coeffs) {
        int n = static_cast<int>(coeffs.size());
        auto polys = std::make_shared<std::vector<std::pair<Poly3, int>>>();
        for (int f = 0; f < n; ++f) {
            if (coeffs[f] == 0.0) continue;
            auto [l, m] = harmonic_lm(f);
            polys->emplace_back(coeffs[f] * solid_harmonic(l, m), l);
        }
        SphereField s = from_function(rule, a, [polys](const Eigen::Vector3d &x) {
            double r = x.norm(), v = 0.0;
            for (const auto &[p, l] : *polys) v += p(x) / std::pow(r, l);
            return v;
        });
        s.ambient_gradient = [polys](const Eigen::Vector3d &x) {
            double r = x.norm();
            Eigen::Vector3d g = Eigen::Vector3d::Zero();
            for (const auto &[p, l] : *polys) {
                double rl = std::pow(r, l);
                g += p.eval_gradient(x) / rl - l * p(x) / (rl * r * r) * x;
            }
            return g;
        };
        return s;
    }

    double integral() const {
        double s = 0.0;
        for (Eigen::Index i = 0; i < values.size(); ++i) s += rule->weights[static_cast<std::size_t>(i)] * values[i];
        return a * a * s;
    }

    double norm2() const {
        double s = 0.0;
        for (Eigen::Index i = 0; i < values.size(); ++i)
            s += rule->weights[static_cast<std::size_t>(i)] * values[i] * values[i];
        return a * a * s;
    }
};

struct ProjectionSplit {
    double p0;              // constant value of P0 phi
    Eigen::Vector3d p1;     // P1 phi(x) = p1 . x/|x|
    SphereField p2;         // remainder samples
    double norm2_p0, norm2_p1, norm2_p2;
};

/// L^2(dB_a) split phi = P0 phi + P1 phi + P2 phi, computed from the four
/// moments that define the constant and linear eigenspaces.
inline ProjectionSplit project_components(const SphereField &phi) {
    const SphereRule &R = *phi.rule;
    const double area = sphere_area(phi.a);
    double m0 = phi.integral();
    Eigen::Vector3d m1 = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < R.size(); ++i)
        m1 += R.weights[i] * phi.values[static_cast<Eigen::Index>(i)] * R.nodes[i];
    m1 *= phi.a * phi.a;

    ProjectionSplit out;
    out.p0 = m0 / area;
    out.p1 = 3.0 / area * m1;
    out.p2 = phi;
    out.p2.ambient_gradient = nullptr;
    for (std::size_t i = 0; i < R.size(); ++i)
        out.p2.values[static_cast<Eigen::Index>(i)] -= out.p0 + out.p1.dot(R.nodes[i]);
    out.norm2_p0 = out.p0 * out.p0 * area;
    out.norm2_p1 = out.p1.squaredNorm() * area / 3.0;
    out.norm2_p2 = out.p2.norm2();
    return out;
}

/// Nodal tangential gradient grad phi - (grad phi . nu) nu. Requires the
/// ambient gradient; throws ExpansionRequired otherwise.
inline std::vector<Eigen::Vector3d> tangential_gradient(const SphereField &phi) {
    if (!phi.ambient_gradient)
        throw ExpansionRequired("tangential_gradient: field carries no closed-form gradient");
    const SphereRule &R = *phi.rule;
    std::vector<Eigen::Vector3d> g(R.size());
    for (std::size_t i = 0; i < R.size(); ++i) {
        const Eigen::Vector3d &nu = R.nodes[i];
        Eigen::Vector3d grad = phi.ambient_gradient(phi.a * nu);
        g[i] = grad - grad.dot(nu) * nu;
    }
    return g;
}

inline double tangential_norm2(const SphereField &phi) {
    auto g = tangential_gradient(phi);
    const SphereRule &R = *phi.rule;
    double s = 0.0;
    for (std::size_t i = 0; i < R.size(); ++i) s += R.weights[i] * g[i].squaredNorm();
    return phi.a * phi.a * s;
}

/// Rayleigh quotient of Y_lm; equals l(l+1)/a^2.
inline double eigencheck(int l, int m, double a, const SphereRule &rule) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(harmonic_count(4));
    c[l * l + l + m] = 1.0;
    SphereField f = SphereField::from_harmonics(rule, a, c);
    return tangential_norm2(f) / f.norm2();
}

/// Poincare gap (a^2/2)||grad_tau phi||^2 + (int phi)^2/(4 pi a^2) - ||phi||^2,
/// nonnegative with equality on constants and pure degree-1 fields.
inline double poincare_gap(const SphereField &phi) {
    return 0.5 * phi.a * phi.a * tangential_norm2(phi) +
           phi.integral() * phi.integral() / sphere_area(phi.a) - phi.norm2();
}

struct CoercivityGap {
    double lhs;
    double rhs;
    double slack;
};

/// Surface form vs its coercive lower bound:
///   lhs = (gamma/2)||grad phi||^2 - (gamma/a^2)||phi||^2
///         + lambda_fl/(2|B_a|) (int phi)^2
///   rhs = (gamma/3)||grad P2 phi||^2
///         + (3 lambda_fl/2 - gamma/a)/(4 pi a^3) (int phi)^2.
/// slack = lhs - rhs >= 0 under the stability condition.
inline CoercivityGap coercivity_gap(const SphereField &phi, const CapillaryParams &prm) {
    if (!prm.stable()) throw StabilityFault("coercivity_gap: parameters are unstable");
    double gp = tangential_norm2(phi);
    double n2 = phi.norm2();
    double I = phi.integral();
    double a = phi.a;
    CoercivityGap g;
    g.lhs = 0.5 * prm.gamma * gp - prm.gamma / (a * a) * n2 +
            prm.lambda_fl / (2.0 * prm.ball_vol()) * I * I;

    // ||grad P2 phi||^2 = ||grad phi||^2 - (2/a^2) ||P1 phi||^2.
    ProjectionSplit s = project_components(phi);
    double gp2 = gp - 2.0 / (a * a) * s.norm2_p1;
    g.rhs = prm.gamma / 3.0 * gp2 +
            (1.5 * prm.lambda_fl - prm.gamma / a) / (4.0 * M_PI * a * a * a) * I * I;
    g.slack = g.lhs - g.rhs;
    return g;
}

} // namespace caphom
