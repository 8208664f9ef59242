#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "elastic_tensor.hpp"
#include "mesh.hpp"
#include "parallel.hpp"
#include "sparse.hpp"

namespace caphom {

// P1 tetrahedral elements throughout; displacement unknowns are nodal
// 3-vectors, DOF (node, c) -> 3 node + c.

namespace femdetail {

/// Constant shape-function gradients and volume of a P1 tet.
struct TetGeom {
    Vec3 grad[4];
    double volume;
};

inline TetGeom tet_geometry(const Vec3 &p0, const Vec3 &p1, const Vec3 &p2, const Vec3 &p3) {
    Mat3 J;
    J.col(0) = p1 - p0;
    J.col(1) = p2 - p0;
    J.col(2) = p3 - p0;
    TetGeom g;
    g.volume = J.determinant() / 6.0;
    Mat3 Jinv = J.inverse();
    for (int i = 0; i < 3; ++i) g.grad[i + 1] = Jinv.row(i);
    g.grad[0] = -(g.grad[1] + g.grad[2] + g.grad[3]);
    return g;
}

/// Kelvin strain vector of the shape function (node i, component c):
/// sym(grad_i x e_c).
inline Vec6 strain_row(const Vec3 &grad, int c) {
    Mat3 E = Mat3::Zero();
    E.row(c) = grad.transpose();
    return to_kelvin(E); // to_kelvin symmetrizes
}

/// In-plane P1 gradients of a surface triangle and its area.
struct TriGeom {
    Vec3 grad[3];
    double area;
    Vec3 normal;
};

inline TriGeom tri_geometry(const Vec3 &p0, const Vec3 &p1, const Vec3 &p2) {
    TriGeom g;
    Vec3 n = (p1 - p0).cross(p2 - p0);
    double n2 = n.squaredNorm();
    g.area = 0.5 * std::sqrt(n2);
    g.normal = n / std::sqrt(n2);
    // grad lambda_i = (n x e_i) / |n|^2 * |n| ... use the edge-rotation form:
    // grad lambda_0 = n x (p2 - p1) / (2 area * |n|) normalized within plane
    g.grad[0] = n.cross(p2 - p1) / n2;
    g.grad[1] = n.cross(p0 - p2) / n2;
    g.grad[2] = n.cross(p1 - p0) / n2;
    return g;
}

} // namespace femdetail

/// Bulk elasticity stiffness: U . K U = int A E(u_h) . E(u_h) dx.
inline SparseSym assemble_bulk(const MeshBase &mesh, const ElasticTensor &A) {
    const int n = static_cast<int>(mesh.node_count());
    const Mat6 &Ak = A.kelvin();
    const std::size_t ntet = mesh.tet_count();
    // per-element 12x12 blocks computed in parallel, merged in element order
    std::vector<Eigen::Matrix<double, 12, 12>> ke(ntet);
    parallel_for(ntet, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t e = lo; e < hi; ++e) {
            const auto &t = mesh.tets[e];
            auto g = femdetail::tet_geometry(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]],
                                             mesh.nodes[t[3]]);
            Eigen::Matrix<double, 6, 12> B;
            for (int i = 0; i < 4; ++i)
                for (int c = 0; c < 3; ++c) B.col(3 * i + c) = femdetail::strain_row(g.grad[i], c);
            ke[e] = g.volume * B.transpose() * Ak * B;
        }
    });
    std::vector<Triplet> trips;
    trips.reserve(ntet * 78);
    for (std::size_t e = 0; e < ntet; ++e) {
        const auto &t = mesh.tets[e];
        for (int i = 0; i < 4; ++i)
            for (int ci = 0; ci < 3; ++ci)
                for (int j = 0; j < 4; ++j)
                    for (int cj = 0; cj < 3; ++cj) {
                        int r = 3 * t[i] + ci, c = 3 * t[j] + cj;
                        if (r <= c) trips.push_back({r, c, ke[e](3 * i + ci, 3 * j + cj)});
                    }
    }
    return SparseSym::from_triplets(3 * n, trips);
}

/// Surface pair (K_LB, M_neg) acting on the nodal radial scalar
/// phi_h = u_h . e_r: U . K_LB U = gamma int |grad_tau phi_h|^2 dH and
/// U . M_neg U = (2 gamma / a^2) int phi_h^2 dH, so the energy contribution
/// is 1/2 U.K_LB U - 1/2 U.M_neg U. The radius in the mass coefficient is
/// the exact analytic a, not the faceted area.
inline std::pair<SparseSym, SparseSym> assemble_surface(const SurfacePatch &patch,
                                                        const MeshBase &mesh, double gamma,
                                                        double a) {
    const int n = static_cast<int>(mesh.node_count());
    std::vector<Triplet> t_lb, t_m;
    t_lb.reserve(patch.tris.size() * 45);
    t_m.reserve(patch.tris.size() * 45);
    for (const auto &tri : patch.tris) {
        auto g = femdetail::tri_geometry(mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]);
        Vec3 er[3];
        for (int i = 0; i < 3; ++i) er[i] = mesh.nodes[tri[i]].normalized();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s_lb = gamma * g.area * g.grad[i].dot(g.grad[j]);
                // consistent P1 mass (equals the 3-point edge-midpoint rule)
                double s_m = 2.0 * gamma / (a * a) * g.area * (i == j ? 1.0 / 6.0 : 1.0 / 12.0);
                for (int ci = 0; ci < 3; ++ci)
                    for (int cj = 0; cj < 3; ++cj) {
                        int r = 3 * tri[i] + ci, c = 3 * tri[j] + cj;
                        if (r > c) continue;
                        double w = er[i][ci] * er[j][cj];
                        t_lb.push_back({r, c, s_lb * w});
                        t_m.push_back({r, c, s_m * w});
                    }
            }
    }
    return {SparseSym::from_triplets(3 * n, t_lb), SparseSym::from_triplets(3 * n, t_m)};
}

/// Factored nonlocal fluid term: g . U = int phi_h dH (P1-exact lumping),
/// coefficient c = lambda_fl / (2 |B_a|).
inline RankOneTerm assemble_nonlocal(const SurfacePatch &patch, const MeshBase &mesh,
                                     double lambda_fl, double a) {
    RankOneTerm r;
    r.g = Eigen::VectorXd::Zero(3 * mesh.node_count());
    for (std::size_t k = 0; k < patch.tris.size(); ++k) {
        const auto &tri = patch.tris[k];
        double w = patch.tri_areas[k] / 3.0;
        for (int i = 0; i < 3; ++i) {
            Vec3 er = mesh.nodes[tri[i]].normalized();
            for (int c = 0; c < 3; ++c) r.g[3 * tri[i] + c] += w * er[c];
        }
    }
    r.c = lambda_fl / (2.0 * ball_volume(a));
    return r;
}

/// P1 load vector for a body force density over the solid part.
inline Eigen::VectorXd assemble_load(const MeshBase &mesh,
                                     const std::function<Vec3(const Vec3 &)> &f) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(3 * mesh.node_count());
    for (const auto &t : mesh.tets) {
        double V = tet_volume(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]],
                              mesh.nodes[t[3]]);
        // exact P1 x P1 products: int lambda_i lambda_j = V/20 (V/10 on the
        // diagonal), applied to the nodal interpolant of f
        for (int i = 0; i < 4; ++i) {
            Vec3 val = Vec3::Zero();
            for (int j = 0; j < 4; ++j) val += (i == j ? 2.0 : 1.0) / 20.0 * f(mesh.nodes[t[j]]);
            b.segment<3>(3 * t[i]) += V * val;
        }
    }
    return b;
}

inline Eigen::VectorXd assemble_load(const MeshBase &mesh, const Vec3 &f_const) {
    return assemble_load(mesh, [&](const Vec3 &) { return f_const; });
}

/// Lumped nodal volumes (row sums of the P1 mass matrix).
inline Eigen::VectorXd lumped_volume_weights(const MeshBase &mesh) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(mesh.node_count());
    for (const auto &t : mesh.tets) {
        double V = tet_volume(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]], mesh.nodes[t[3]]);
        for (int i = 0; i < 4; ++i) w[t[i]] += 0.25 * V;
    }
    return w;
}

/// Combined operator of the linearized model:
/// H = K_bulk + K_LB - M_neg, plus the factored rank-one fluid term.
struct CellOperator {
    SparseSym H;
    RankOneTerm fluid;

    double energy(const Eigen::VectorXd &u) const { return 0.5 * u.dot(H * u) + fluid.energy(u); }

    Eigen::VectorXd gradient(const Eigen::VectorXd &u) const {
        Eigen::VectorXd g = H * u;
        if (fluid.c != 0.0) g += 2.0 * fluid.c * fluid.g.dot(u) * fluid.g;
        return g;
    }
};

inline CellOperator assemble_operator(const MeshBase &mesh, const SurfacePatch &patch,
                                      const ElasticTensor &A, double gamma, double lambda_fl,
                                      double a) {
    SparseSym kb = assemble_bulk(mesh, A);
    std::vector<Triplet> trips;
    kb.emit(trips);
    if (gamma != 0.0) {
        auto [klb, mneg] = assemble_surface(patch, mesh, gamma, a);
        klb.emit(trips, 1.0);
        mneg.emit(trips, -1.0);
    }
    CellOperator op;
    op.H = SparseSym::from_triplets(3 * static_cast<int>(mesh.node_count()), trips);
    op.fluid = assemble_nonlocal(patch, mesh, lambda_fl, a);
    return op;
}

/// apply_constraints: the reduced view of (H + rank-one) under the constraint
/// set. The ReducedSystem owns nothing; keep the operator alive alongside it.
inline ReducedSystem apply_constraints(const CellOperator &op, const ConstraintSet &cs) {
    return ReducedSystem(op.H, cs, 3, op.fluid.c != 0.0 ? &op.fluid : nullptr);
}

} // namespace caphom
