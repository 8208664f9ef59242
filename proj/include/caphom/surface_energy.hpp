#pragma once

#include <functional>
#include <vector>

#include "capillary.hpp"
#include "common.hpp"
#include "mat3.hpp"
#include "sphere_rule.hpp"

namespace caphom {

/// Closed-form deformation of a neighborhood of the cavity sphere, given as
/// position and gradient callbacks. When no gradient is supplied it falls
/// back to central differences with step 1e-6 a.
struct SurfaceDeformation {
    std::function<Vec3(const Vec3 &)> position;
    std::function<Mat3(const Vec3 &)> gradient; // optional
    double a = 1.0;

    Mat3 grad(const Vec3 &x) const {
        if (gradient) return gradient(x);
        double h = 1e-6 * a;
        Mat3 G;
        for (int j = 0; j < 3; ++j) {
            Vec3 e = Vec3::Zero();
            e[j] = h;
            G.col(j) = (position(x + e) - position(x - e)) / (2.0 * h);
        }
        return G;
    }
};

/// Default quadrature for the nonlinear surface functional.
inline const SphereRule &default_j_rule() {
    static SphereRule r = SphereRule::product(32, 64);
    return r;
}

/// Nonlinear surface + fluid energy
///   J(y) = gamma int_{dB_a} |cof(grad y) e_r| dH
///        + (lambda_fl/2)|B_a| (|y(B_a)|/|B_a| - 1)^2 - p |y(B_a)|,
/// with the cavity image volume in divergence form
///   |y(B_a)| = 1/3 int_{dB_a} cof(grad y) e_r . y dH.
/// Throws OrientationFault if a sampled det(grad y) is nonpositive.
inline double surface_energy_J(const SurfaceDeformation &def, const CapillaryParams &prm,
                               const SphereRule &rule = default_j_rule()) {
    const double a = prm.a;
    double area = 0.0, vol3 = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const Vec3 &nu = rule.nodes[i];
        Vec3 x = a * nu;
        Mat3 G = def.grad(x);
        if (G.determinant() <= 0.0)
            throw OrientationFault("surface_energy_J: sampled det(grad y) <= 0");
        auto [cn, cn_norm] = cof_normal_on_sphere(G, nu);
        double w = rule.weights[i] * a * a;
        area += w * cn_norm;
        vol3 += w * cn.dot(def.position(x));
    }
    double vol = vol3 / 3.0;
    double V = prm.ball_vol();
    return prm.gamma * area + 0.5 * prm.lambda_fl * V * (vol / V - 1.0) * (vol / V - 1.0) - prm.p * vol;
}

/// Smooth displacement field with its gradient, for expansion checks.
struct SmoothField {
    std::function<Vec3(const Vec3 &)> u;
    std::function<Mat3(const Vec3 &)> grad_u;
};

/// Second variation of J at the identity:
///   Q_surf(u) = (gamma/2) int |grad_tau (u.e_r)|^2 - (gamma/a^2) int (u.e_r)^2
///             + lambda_fl/(2 |B_a|) (int u.e_r)^2.
inline double surface_quadratic_form(const SmoothField &u, const CapillaryParams &prm,
                                     const SphereRule &rule = default_j_rule()) {
    const double a = prm.a;
    double grad2 = 0.0, phi2 = 0.0, phi1 = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const Vec3 &nu = rule.nodes[i];
        Vec3 x = a * nu;
        Vec3 uv = u.u(x);
        Mat3 G = u.grad_u(x);
        double phi = uv.dot(nu);
        // grad(u . x/|x|) = (grad u)^T nu + (I - nu nu^T) u / |x|
        Vec3 gphi = G.transpose() * nu + (uv - uv.dot(nu) * nu) / a;
        Vec3 gtau = gphi - gphi.dot(nu) * nu;
        double w = rule.weights[i] * a * a;
        grad2 += w * gtau.squaredNorm();
        phi2 += w * phi * phi;
        phi1 += w * phi;
    }
    return 0.5 * prm.gamma * grad2 - prm.gamma / (a * a) * phi2 +
           prm.lambda_fl / (2.0 * prm.ball_vol()) * phi1 * phi1;
}

/// r(eps) = |J(id + eps u) - J(id) - eps^2 Q_surf(u)|; decays like eps^3 for
/// smooth u. J(id) is evaluated with the same rule so its quadrature error
/// cancels instead of polluting the small residual.
inline std::vector<double> linearization_residual(const SmoothField &u, const CapillaryParams &prm,
                                                  const std::vector<double> &eps_list,
                                                  const SphereRule &rule = default_j_rule()) {
    SurfaceDeformation id_def{[](const Vec3 &x) { return x; },
                              [](const Vec3 &) { return Mat3::Identity(); }, prm.a};
    double J0 = surface_energy_J(id_def, prm, rule);
    double Q = surface_quadratic_form(u, prm, rule);
    std::vector<double> out;
    out.reserve(eps_list.size());
    for (double eps : eps_list) {
        SurfaceDeformation def{
            [&u, eps](const Vec3 &x) { return (x + eps * u.u(x)).eval(); },
            [&u, eps](const Vec3 &x) { return (Mat3::Identity() + eps * u.grad_u(x)).eval(); }, prm.a};
        double J = surface_energy_J(def, prm, rule);
        out.push_back(std::abs(J - J0 - eps * eps * Q));
    }
    return out;
}

} // namespace caphom
