#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "capillary.hpp"
#include "common.hpp"
#include "elastic_tensor.hpp"
#include "mat3.hpp"
#include "sphere_rule.hpp"

namespace caphom {

// ---------------------------------------------------------------------------
// Closed-form trial fields for the spherical-shell assemblage: an elastic
// shell a < |y| < b around the pressurized liquid inclusion, loaded by an
// axisymmetric traction sigma_bar e_r on |y| = b and extended by the constant
// stress sigma_bar into the rest of the cell. The stress is divergence free,
// carries radial-only traction on the cavity, and matches the outer traction,
// which makes the triple (sigma, xi, t) admissible in the duality bound.
// ---------------------------------------------------------------------------

struct ShellCoeffs {
    double lambda, mu, lambda_fl, gamma, a, b;
    double K;
    double k[7]; // 1-based, k[1]..k[6]
};

/// Transcribed shell coefficients. Throws DegenerateDenominator when K or the
/// k5/k6 denominator is smaller than 1e-12 of its term-magnitude scale.
inline ShellCoeffs shell_coeffs(double lambda, double mu, double lambda_fl, double gamma, double a,
                                double b) {
    if (!(mu > 0.0)) throw DomainFault("shell_coeffs: mu must be positive");
    if (!(0.0 < a && a < b && b <= 0.5)) throw DomainFault("shell_coeffs: need 0 < a < b <= 1/2");
    const double lam = lambda, lfl = lambda_fl, gam = gamma;

    auto p2 = [](double x) { return x * x; };
    const double a3 = a * a * a, a5 = a3 * a * a, a7 = a5 * a * a;
    const double b3 = b * b * b, b5 = b3 * b * b, b7 = b5 * b * b;

    const double Kterms[10] = {
        2.0 * std::pow(a, 11) * mu * (14 * mu + 9 * lam) * (14 * mu + 19 * lam),
        -8.0 * std::pow(a, 10) * gam * (7 * mu + 5 * lam) * (14 * mu + 9 * lam),
        -50.0 * std::pow(a, 8) * b3 * mu * (28 * mu * mu + 56 * mu * lam + 27 * lam * lam),
        -200.0 * a7 * b3 * gam * (7 * mu * mu + 11 * mu * lam + 3 * lam * lam),
        2016.0 * std::pow(a, 6) * b5 * mu * p2(mu + lam),
        1008.0 * a5 * b5 * gam * mu * (mu + lam),
        -50.0 * std::pow(a, 4) * b7 * mu * (28 * mu * mu + 56 * mu * lam + 27 * lam * lam),
        25.0 * a3 * b7 * gam * (28 * mu * mu + 56 * mu * lam + 27 * lam * lam),
        2.0 * a * std::pow(b, 10) * mu * (14 * mu + 9 * lam) * (14 * mu + 19 * lam),
        std::pow(b, 10) * gam * (34 * mu + 15 * lam) * (14 * mu + 19 * lam)};
    double K = 0.0, Kscale = 0.0;
    for (double t : Kterms) {
        K += t;
        Kscale += std::abs(t);
    }
    K *= mu;
    Kscale *= mu;
    if (std::abs(K) < 1e-12 * Kscale) throw DegenerateDenominator("shell_coeffs: K vanishes");

    ShellCoeffs c{lambda, mu, lambda_fl, gamma, a, b, K, {}};
    c.k[1] = -20.0 * a3 * b3 / K * (mu + lam) *
             (2 * a3 * mu * (mu + lam) + a * a * gam * mu - 2 * a * b * b * mu * (mu + lam) +
              b * b * gam * (mu + lam));
    c.k[2] = (1.0 / 6.0) * b3 / K *
             (50 * std::pow(a, 8) * mu * (28 * mu * mu + 56 * mu * lam + 27 * lam * lam) +
              200 * a7 * gam * (7 * mu * mu + 11 * mu * lam + 3 * lam * lam) -
              1008 * std::pow(a, 6) * b * b * mu * p2(mu + lam) -
              504 * a5 * b * b * gam * mu * (mu + lam) -
              2 * a * b7 * mu * (14 * mu + 9 * lam) * (14 * mu + 19 * lam) -
              b7 * gam * (34 * mu + 15 * lam) * (14 * mu + 19 * lam));
    c.k[3] = (5.0 / 6.0) * a3 * b3 / K * (mu + lam) *
             (2 * std::pow(a, 8) * mu * (14 * mu + 19 * lam) - 8 * a7 * gam * (7 * mu + 5 * lam) -
              2 * a * b7 * mu * (14 * mu + 19 * lam) + b7 * gam * (14 * mu + 19 * lam));
    c.k[4] = a5 * b5 / K *
             (2 * std::pow(a, 6) * mu * (mu + lam) * (14 * mu + 19 * lam) -
              8 * a5 * gam * (mu + lam) * (7 * mu + 5 * lam) -
              2 * a * b5 * mu * (mu + lam) * (14 * mu + 19 * lam) - b5 * gam * mu * (14 * mu + 19 * lam));

    const double den56_terms[4] = {12 * std::pow(a, 4) * mu * (2 * mu + 3 * lam - 3 * lfl),
                                   24 * a3 * gam * mu,
                                   -3 * a * b3 * (2 * mu + 3 * lam) * (4 * mu + 3 * lfl),
                                   6 * b3 * gam * (2 * mu + 3 * lam)};
    double den56 = 0.0, den56_scale = 0.0;
    for (double t : den56_terms) {
        den56 += t;
        den56_scale += std::abs(t);
    }
    if (std::abs(den56) < 1e-12 * den56_scale)
        throw DegenerateDenominator("shell_coeffs: k5/k6 denominator vanishes");
    c.k[5] = b3 * (2 * gam - 4 * a * mu - 3 * a * lfl) / den56;
    // k6's printed denominator is den56/3 with an overall factor 3 in front.
    c.k[6] = -a3 * b3 * (2 * gam + a * (2 * mu + 3 * lam - 3 * lfl)) / den56;
    return c;
}

/// beta_1..beta_8 for a given axisymmetric far stress (s11, s11, s33).
struct ShellBetas {
    double b[9]; // 1-based
};

inline ShellBetas shell_betas(const ShellCoeffs &c, double s11, double s33) {
    ShellBetas B{};
    const double d = s11 - s33, s = 2.0 * s11 + s33;
    B.b[1] = c.k[1] * d;
    B.b[2] = c.k[2] * d;
    B.b[3] = c.k[3] * d;
    B.b[4] = c.k[4] * d;
    B.b[5] = c.k[5] * s;
    B.b[6] = c.k[6] * s;
    const double a = c.a, lam = c.lambda, mu = c.mu;
    B.b[7] = 6.0 * B.b[2] + (18.0 * std::pow(a, 7) * B.b[1] * lam + 6.0 * a * a * B.b[3] * (5 * mu + 3 * lam) -
                             9.0 * B.b[4] * (mu + lam)) /
                                (std::pow(a, 5) * (mu + lam));
    B.b[8] = 3.0 * (B.b[6] / (a * a * a) + B.b[5]) * ball_volume(a);
    return B;
}

/// Radial functions alpha_1..alpha_7 at radius r.
inline std::array<double, 8> shell_alphas(double r, const ShellCoeffs &c, const ShellBetas &B) {
    const double lam = c.lambda, mu = c.mu, mpl = mu + lam;
    const double r2 = r * r, r3 = r2 * r, r5 = r3 * r2, r7 = r5 * r2, r9 = r7 * r2;
    const double b1 = B.b[1], b2 = B.b[2], b3 = B.b[3], b4 = B.b[4], b5 = B.b[5], b6 = B.b[6];
    std::array<double, 8> al{};
    al[1] = 15.0 * b1 * mu * lam * r2 / mpl - 2.0 * b2 * mu + b5 * (2 * mu + 3 * lam) +
            (2.0 * b6 * mu - 10.0 * b3 * mu * mu / mpl) / r3 + 3.0 * b4 * mu / r5;
    al[2] = -12.0 * b1 * mu * lam / mpl + 3.0 * mu * (2.0 * b3 * (5 * mu + 3 * lam) / mpl - 2.0 * b6) / r5 -
            15.0 * b4 * mu / r7;
    al[3] = -3.0 * b1 * mu * (14 * mu + 25 * lam) / mpl + 18.0 * b3 * mu * mu / (r5 * mpl) -
            15.0 * b4 * mu / r7;
    al[4] = 105.0 * b4 * mu / r9 - 90.0 * b3 * mu / r7;
    al[5] = 6.0 * b1 * mu * lam / mpl + (6.0 * b3 * mu * (5 * mu + 6 * lam) / mpl - 6.0 * b6 * mu) / r5 -
            45.0 * b4 * mu / r7;
    al[6] = 3.0 * b1 * mu * r2 * (14 * mu + 15 * lam) / mpl + 4.0 * b2 * mu + b5 * (2 * mu + 3 * lam) +
            (2.0 * b3 * mu * mu / mpl + 2.0 * b6 * mu) / r3 + 9.0 * b4 * mu / r5;
    al[7] = -3.0 * b1 * mu * (14 * mu + 17 * lam) / mpl -
            6.0 * mu * (b6 * mpl - b3 * (8 * mu + 9 * lam)) / (r5 * mpl) - 90.0 * b4 * mu / r7;
    return al;
}

inline Mat3 axisymmetric_far_stress(double s11, double s33) {
    Mat3 s = Mat3::Zero();
    s(0, 0) = s(1, 1) = s11;
    s(2, 2) = s33;
    return s;
}

/// Piecewise trial stress: shell solution in a < |y| < b, constant sigma_bar
/// outside. Throws InsideCavity for |y| < a.
inline Mat3 shell_stress(const Vec3 &y, const ShellCoeffs &c, const ShellBetas &B, double s11,
                         double s33) {
    double r = y.norm();
    if (r < c.a * (1.0 - 1e-12)) throw InsideCavity("shell_stress: point inside the cavity");
    if (r > c.b) return axisymmetric_far_stress(s11, s33);
    auto al = shell_alphas(std::max(r, c.a), c, B);
    const double y1 = y.x(), y2 = y.y(), y3 = y.z();
    Mat3 s;
    s(0, 0) = al[1] + al[2] * y1 * y1 + al[3] * y3 * y3 + al[4] * y1 * y1 * y3 * y3;
    s(1, 1) = al[1] + al[2] * y2 * y2 + al[3] * y3 * y3 + al[4] * y2 * y2 * y3 * y3;
    s(2, 2) = al[6] + al[7] * y3 * y3 + al[4] * y3 * y3 * y3 * y3;
    s(0, 1) = s(1, 0) = al[2] * y1 * y2 + al[4] * y1 * y2 * y3 * y3;
    s(0, 2) = s(2, 0) = al[5] * y1 * y3 + al[4] * y1 * y3 * y3 * y3;
    s(1, 2) = s(2, 1) = al[5] * y2 * y3 + al[4] * y2 * y3 * y3 * y3;
    return s;
}

/// Interface traction field xi on the cavity sphere and its ambient gradient.
inline Vec3 shell_xi(const Vec3 &y, double beta7, double a) {
    const double a3 = a * a * a;
    return beta7 * Vec3(-y.x() * y.z() * y.z() / a3, -y.y() * y.z() * y.z() / a3,
                        y.z() / a - y.z() * y.z() * y.z() / a3);
}

inline double shell_xi_div_tau(const Vec3 &y, double beta7, double a) {
    const double a3 = a * a * a;
    Mat3 G = Mat3::Zero(); // G(i,j) = d xi_i / d y_j
    G(0, 0) = -beta7 * y.z() * y.z() / a3;
    G(0, 2) = -2.0 * beta7 * y.x() * y.z() / a3;
    G(1, 1) = -beta7 * y.z() * y.z() / a3;
    G(1, 2) = -2.0 * beta7 * y.y() * y.z() / a3;
    G(2, 2) = beta7 * (1.0 / a - 3.0 * y.z() * y.z() / a3);
    Vec3 nu = y.normalized();
    return G.trace() - nu.dot(G * nu);
}

// ---------------------------------------------------------------------------
// Admissibility verification.
// ---------------------------------------------------------------------------

struct AdmissibilityReport {
    double div_residual = 0.0;        // FD divergence in the open shell, relative
    double traction_b_residual = 0.0; // |sigma e_r - sigma_bar e_r| / |sigma_bar e_r| at r = b
    double parallel_a_residual = 0.0; // tangential fraction of sigma e_r at r = a
    double cond_i_residual = 0.0;     // weighted first interface condition
    double cond_ii_residual = 0.0;    // max pointwise second interface condition
    bool pass = false;
};

struct AdmissibilityTolerances {
    double div_tol = 1e-6;
    double traction_tol = 1e-8;
    double parallel_tol = 1e-8;
    double cond_tol = 1e-7;
};

/// Interface conditions: (i) int (-div_tau xi + (2/a) xi.e_r) y dH = 0 and
/// (ii) (2 gamma/3)(-div_tau xi + (2/a) xi.e_r) - sigma e_r.e_r
///      + (lambda_fl - 2 gamma/(3a))/|B_a| t = 0 pointwise on the cavity.
/// A multiplicative tweak on beta7/beta8 (perturb != 1) breaks (ii) and is
/// used as a negative control.
inline void verify_interface_conditions(const ShellCoeffs &c, double s11, double s33,
                                        const SphereRule &rule, AdmissibilityReport &rep,
                                        double perturb = 1.0) {
    ShellBetas B = shell_betas(c, s11, s33);
    double b7 = B.b[7] * perturb, b8 = B.b[8] * perturb;
    const double a = c.a;
    Vec3 I1 = Vec3::Zero();
    double scale1 = 0.0, worst2 = 0.0, scale2 = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        Vec3 nu = rule.nodes[i];
        Vec3 y = a * nu;
        double q = -shell_xi_div_tau(y, b7, a) + 2.0 / a * shell_xi(y, b7, a).dot(nu);
        double w = rule.weights[i] * a * a;
        I1 += w * q * y;
        scale1 += w * std::abs(q) * a;
        double snn = nu.dot(shell_stress(y, c, B, s11, s33) * nu);
        double tterm = (c.lambda_fl - 2.0 * c.gamma / (3.0 * a)) / ball_volume(a) * b8;
        double lhs = (2.0 * c.gamma / 3.0) * q - snn + tterm;
        double sc = std::abs(2.0 * c.gamma / 3.0 * q) + std::abs(snn) + std::abs(tterm);
        worst2 = std::max(worst2, std::abs(lhs));
        scale2 = std::max(scale2, sc);
    }
    rep.cond_i_residual = I1.norm() / (scale1 + 1e-300);
    rep.cond_ii_residual = worst2 / (scale2 + 1e-300);
}

/// Full admissibility check: FD divergence in the shell, traction continuity
/// at |y| = b, radial-only traction at |y| = a, and both interface conditions.
inline AdmissibilityReport check_admissibility(const ShellCoeffs &c, double s11, double s33,
                                               int npoints, std::uint64_t seed,
                                               const AdmissibilityTolerances &tol = {},
                                               double perturb = 1.0) {
    AdmissibilityReport rep;
    ShellBetas B = shell_betas(c, s11, s33);
    Pcg32 rng(seed);
    auto rand_dir = [&rng]() {
        while (true) {
            Vec3 v(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
            double n = v.norm();
            if (n > 1e-3 && n <= 1.0) return (v / n).eval();
        }
    };
    const double h = 1e-5 * c.a;
    for (int k = 0; k < npoints; ++k) {
        Vec3 n = rand_dir();
        // divergence in the open shell, away from both interfaces by 4h
        double r = rng.uniform(c.a + 4.0 * h, c.b - 4.0 * h);
        Vec3 y = r * n;
        Vec3 div = Vec3::Zero();
        for (int j = 0; j < 3; ++j) {
            Vec3 e = Vec3::Zero();
            e[j] = h;
            div += (shell_stress(y + e, c, B, s11, s33).col(j) -
                    shell_stress(y - e, c, B, s11, s33).col(j)) /
                   (2.0 * h);
        }
        double scale = shell_stress(y, c, B, s11, s33).cwiseAbs().maxCoeff() / c.a;
        rep.div_residual = std::max(rep.div_residual, div.norm() / (scale + 1e-300));

        Vec3 tb = shell_stress(c.b * n, c, B, s11, s33) * n;
        Vec3 tbar = axisymmetric_far_stress(s11, s33) * n;
        rep.traction_b_residual =
            std::max(rep.traction_b_residual, (tb - tbar).norm() / (tbar.norm() + 1e-300));

        Vec3 ta = shell_stress(c.a * n, c, B, s11, s33) * n;
        Vec3 tang = ta - ta.dot(n) * n;
        rep.parallel_a_residual = std::max(rep.parallel_a_residual, tang.norm() / (ta.norm() + 1e-300));
    }
    SphereRule rule = SphereRule::for_degree(20);
    verify_interface_conditions(c, s11, s33, rule, rep, perturb);
    rep.pass = rep.div_residual <= tol.div_tol && rep.traction_b_residual <= tol.traction_tol &&
               rep.parallel_a_residual <= tol.parallel_tol && rep.cond_i_residual <= tol.cond_tol &&
               rep.cond_ii_residual <= tol.cond_tol;
    return rep;
}

// ---------------------------------------------------------------------------
// Duality lower bound.
// ---------------------------------------------------------------------------

struct BoundResult {
    double value = 0.0;  // certified lower bound for (1/2) A_hom F.F
    double s11 = 0.0, s33 = 0.0;
    double matrix_energy = 0.0; // (3 mu/2) f^2
    AdmissibilityReport admissibility;
    double f = 0.0, lambda = 0.0, mu = 0.0, gamma = 0.0, lambda_fl = 0.0, a = 0.0, b = 0.0;
};

/// Axisymmetric shear F(f) = -f/2 (e1 x e1 + e2 x e2) + f e3 x e3.
inline Mat3 axisymmetric_shear(double f) {
    Mat3 F = Mat3::Zero();
    F(0, 0) = F(1, 1) = -0.5 * f;
    F(2, 2) = f;
    return F;
}

namespace detail {

/// Bound bracket at a fixed (s11, s33): the F-linear stress terms minus the
/// dual quadratic terms. Radial log-Gauss x sphere rule over the shell, the
/// constant branch integrated exactly.
inline double bound_bracket(const ShellCoeffs &c, double s11, double s33, const Mat3 &F,
                            const ElasticTensor &A, int n_radial, const SphereRule &rule) {
    ShellBetas B = shell_betas(c, s11, s33);
    std::vector<double> xr, wr;
    gauss_legendre(n_radial, xr, wr);
    const double smax = std::log(c.b / c.a);

    Mat3 int_sigma = Mat3::Zero();
    double int_dual = 0.0;
    for (int iq = 0; iq < n_radial; ++iq) {
        double s = 0.5 * smax * (xr[iq] + 1.0);
        double r = c.a * std::exp(s);
        double wrad = 0.5 * smax * wr[iq] * r; // dr = r ds
        for (std::size_t i = 0; i < rule.size(); ++i) {
            Vec3 y = r * rule.nodes[i];
            Mat3 sig = shell_stress(y, c, B, s11, s33);
            double w = rule.weights[i] * r * r * wrad;
            int_sigma += w * sig;
            int_dual += w * A.dual_form(sig);
        }
    }
    Mat3 sbar = axisymmetric_far_stress(s11, s33);
    double vol_out = 1.0 - ball_volume(c.b);
    int_sigma += vol_out * sbar;
    int_dual += vol_out * A.dual_form(sbar);

    Mat3 int_trac = Mat3::Zero();
    double int_xi2 = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        Vec3 nu = rule.nodes[i];
        Vec3 y = c.a * nu;
        double w = rule.weights[i] * c.a * c.a;
        Vec3 t = shell_stress(y, c, B, s11, s33) * nu;
        int_trac += w * t * y.transpose();
        int_xi2 += w * shell_xi(y, B.b[7], c.a).squaredNorm();
    }

    double tterm = (c.lambda_fl - 2.0 * c.gamma / (3.0 * c.a)) / (2.0 * ball_volume(c.a)) * B.b[8] * B.b[8];
    return ((int_sigma + int_trac).array() * F.array()).sum() - 0.5 * int_dual -
           c.gamma / 3.0 * int_xi2 - tterm;
}

} // namespace detail

/// Evaluates the restricted duality bound and maximizes the concave quadratic
/// in (s11, s33) by its 2x2 stationarity system. Admissibility is verified
/// first; ConcavityFault signals a non-negative-definite Hessian.
inline BoundResult lower_bound(double f, double lambda, double mu, double gamma, double lambda_fl,
                               double a, double b, int n_radial = 48, int sphere_degree = 20,
                               std::uint64_t seed = 12345) {
    CapillaryParams prm = gamma == 0.0 && lambda_fl == 0.0 ? CapillaryParams::void_like(a)
                                                           : CapillaryParams::make(gamma, lambda_fl, a);
    if (!prm.stable()) throw StabilityFault("lower_bound: parameters violate the stability condition");
    ShellCoeffs c = shell_coeffs(lambda, mu, lambda_fl, gamma, a, b);
    ElasticTensor A = ElasticTensor::isotropic(lambda, mu);
    Mat3 F = axisymmetric_shear(f);
    SphereRule rule = SphereRule::for_degree(sphere_degree);

    BoundResult out;
    out.f = f;
    out.lambda = lambda;
    out.mu = mu;
    out.gamma = gamma;
    out.lambda_fl = lambda_fl;
    out.a = a;
    out.b = b;
    out.matrix_energy = 0.5 * A.quadratic_form(F);
    out.admissibility = check_admissibility(c, 1.3, -0.7, 200, seed);

    if (f == 0.0) return out; // F = 0: zero bound at the zero triple

    auto g = [&](double x1, double x3) {
        return detail::bound_bracket(c, x1, x3, F, A, n_radial, rule);
    };
    // g(s) = L.s - 1/2 s.M s with g(0) = 0; extract by evaluation.
    double g10 = g(1, 0), gm10 = g(-1, 0), g01 = g(0, 1), g0m1 = g(0, -1), g11 = g(1, 1);
    Eigen::Vector2d L(0.5 * (g10 - gm10), 0.5 * (g01 - g0m1));
    Eigen::Matrix2d M;
    M(0, 0) = -(g10 + gm10);
    M(1, 1) = -(g01 + g0m1);
    M(0, 1) = M(1, 0) = -g11 + L[0] + L[1] - 0.5 * M(0, 0) - 0.5 * M(1, 1);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(M);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw ConcavityFault("lower_bound: objective is not concave in (s11, s33)");
    Eigen::Vector2d sopt = M.ldlt().solve(L);
    out.s11 = sopt[0];
    out.s33 = sopt[1];
    out.value = 0.5 * L.dot(sopt);
    return out;
}

/// Dimensionless dilute enhancement coefficient
///   (*) = 15 (lambda + 2 mu)(gamma/(2 mu a) - 1)
///         / (14 mu + 9 lambda + (34 mu + 15 lambda) gamma/(2 mu a)),
/// the O(theta) slope of the certified bound over the matrix energy.
inline double dilute_coefficient(double lambda, double mu, double gamma, double a) {
    if (!(mu > 0.0) || !(a > 0.0)) throw DomainFault("dilute_coefficient: mu and a must be positive");
    double g = gamma / (2.0 * mu * a);
    double den = 14.0 * mu + 9.0 * lambda + (34.0 * mu + 15.0 * lambda) * g;
    if (!(den > 0.0)) throw DegenerateDenominator("dilute_coefficient: denominator not positive");
    return 15.0 * mu * (lambda + 2.0 * mu) * (g - 1.0) / den / mu;
}

/// Dilute bound value (3 mu/2) f^2 (1 + (*) theta).
inline double dilute_bound_estimate(double f, double lambda, double mu, double gamma, double a,
                                    double theta) {
    return 1.5 * mu * f * f * (1.0 + dilute_coefficient(lambda, mu, gamma, a) * theta);
}

/// Strict enhancement predicate gamma/mu > 2a.
inline bool enhancement_predicate(double gamma, double mu, double a) {
    if (!(mu > 0.0) || !(a > 0.0)) throw DomainFault("enhancement_predicate: mu and a must be positive");
    return gamma / mu > 2.0 * a;
}

struct DiluteCheck {
    std::vector<double> thetas;
    std::vector<double> slopes;      // ((bound / matrix energy) - 1) / theta
    double richardson = 0.0;         // extrapolated slope at theta -> 0
    double star = 0.0;               // closed-form coefficient
    double rel_deviation = 0.0;
};

/// Finite-theta slope study at fixed gamma/(2 mu a): the cavity radius follows
/// a = (3 theta / 4 pi)^(1/3) and the surface tension is rescaled with it, so
/// the slope converges to the closed-form coefficient as theta -> 0.
inline DiluteCheck dilute_limit_check(double lambda, double mu, double gamma_over_2mua,
                                      const std::vector<double> &thetas, double b,
                                      double lambda_fl_over_mu = 0.0, double f = 1.0) {
    DiluteCheck out;
    out.thetas = thetas;
    double lfl_over = lambda_fl_over_mu > 0.0 ? lambda_fl_over_mu
                                              : 4.0 * std::max(1.0, gamma_over_2mua);
    for (double th : thetas) {
        double a = std::cbrt(3.0 * th / (4.0 * M_PI));
        double gamma = 2.0 * mu * a * gamma_over_2mua;
        BoundResult r = lower_bound(f, lambda, mu, gamma, lfl_over * mu, a, b);
        out.slopes.push_back((r.value / r.matrix_energy - 1.0) / th);
    }
    // Richardson on the last two thetas assuming an O(theta) error term.
    if (out.slopes.size() >= 2) {
        std::size_t n = out.slopes.size();
        double t1 = thetas[n - 2], t2 = thetas[n - 1];
        out.richardson = out.slopes[n - 1] + (out.slopes[n - 1] - out.slopes[n - 2]) * t2 / (t1 - t2);
    } else if (!out.slopes.empty()) {
        out.richardson = out.slopes.back();
    }
    double a_ref = std::cbrt(3.0 * thetas.back() / (4.0 * M_PI));
    out.star = dilute_coefficient(lambda, mu, 2.0 * mu * a_ref * gamma_over_2mua, a_ref);
    out.rel_deviation = std::abs(out.richardson - out.star) /
                        (std::abs(out.star) > 1e-12 ? std::abs(out.star) : 1.0);
    return out;
}

} // namespace caphom
