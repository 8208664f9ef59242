#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "assembly.hpp"
#include "capillary.hpp"
#include "elastic_tensor.hpp"
#include "mesh.hpp"
#include "sparse.hpp"

namespace caphom {

struct CellProblemResult {
    Eigen::VectorXd corrector; // periodic, translation-projected nodal field
    double energy = 0.0;       // value of the cell functional at the minimizer
    SolveStats stats;
};

/// Nodal interpolant of the affine field x -> F x (F symmetrized).
inline Eigen::VectorXd affine_field(const MeshBase &mesh, const Mat3 &F) {
    Mat3 S = sym(F);
    Eigen::VectorXd u(3 * mesh.node_count());
    for (std::size_t i = 0; i < mesh.node_count(); ++i) u.segment<3>(3 * i) = S * mesh.nodes[i];
    return u;
}

/// Periodic cell solver: assembles the operator once and serves any number of
/// macroscopic strains. The functional per strain F is
///   F_per(F, psi) = 1/2 (U_F + psi) . H (U_F + psi) + c (g.(U_F + psi))^2
/// minimized over periodic, translation-free psi.
class CellSolver {
public:
    CellSolver(const PeriodicMesh &mesh, const ElasticTensor &A, const CapillaryParams &prm,
               SolveOptions opt = {})
        : mesh_(mesh), opt_(opt) {
        if (!prm.stable()) throw StabilityFault("cell problem: unstable capillary parameters");
        op_ = assemble_operator(mesh, mesh.cavity, A, prm.gamma, prm.lambda_fl, prm.a);
        ConstraintSet cs;
        cs.periodic_pairs = mesh.pairs;
        cs.mean_zero = true;
        rs_ = std::make_unique<ReducedSystem>(op_.H, cs, 3,
                                              op_.fluid.c != 0.0 ? &op_.fluid : nullptr);
    }

    CellProblemResult solve(const Mat3 &F) const {
        CellProblemResult r;
        Eigen::VectorXd uF = affine_field(mesh_, F);
        Eigen::VectorXd b = -op_.gradient(uF);
        r.corrector = rs_->solve(b, r.stats, opt_);
        r.energy = op_.energy(uF + r.corrector);
        return r;
    }

    double energy_at(const Mat3 &F, const Eigen::VectorXd &psi) const {
        return op_.energy(affine_field(mesh_, F) + psi);
    }

    const CellOperator &op() const { return op_; }
    const ReducedSystem &reduced() const { return *rs_; }
    const PeriodicMesh &mesh() const { return mesh_; }

private:
    const PeriodicMesh &mesh_;
    SolveOptions opt_;
    CellOperator op_;
    std::unique_ptr<ReducedSystem> rs_;
};

inline CellProblemResult solve_cell(const Mat3 &F, const PeriodicMesh &mesh, const ElasticTensor &A,
                                    const CapillaryParams &prm, const SolveOptions &opt = {}) {
    return CellSolver(mesh, A, prm, opt).solve(F);
}

/// Deviation from the three-constant cubic form (axes of the cell cube),
/// relative to the largest entry.
inline double cubic_symmetry_defect(const Mat6 &K) {
    double c11 = (K(0, 0) + K(1, 1) + K(2, 2)) / 3.0;
    double c12 = (K(0, 1) + K(0, 2) + K(1, 2)) / 3.0;
    double c44 = (K(3, 3) + K(4, 4) + K(5, 5)) / 3.0;
    Mat6 S = Mat6::Zero();
    for (int i = 0; i < 3; ++i) {
        S(i, i) = c11;
        S(i + 3, i + 3) = c44;
        for (int j = 0; j < 3; ++j)
            if (i != j) S(i, j) = c12;
    }
    return (K - S).cwiseAbs().maxCoeff() / K.cwiseAbs().maxCoeff();
}

struct HomogenizedTensor {
    Mat6 kelvin = Mat6::Zero();
    Vec6 eigenvalues = Vec6::Zero();
    double symmetry_defect = 0.0;      // of the raw cross-energy table
    double polarization_residual = 0.0; // random-strain consistency check
    // provenance
    int refine = 0;
    double solver_tol = 0.0;
    int max_iterations = 0;
    double a = 0.0, gamma = 0.0, lambda_fl = 0.0;

    double quadratic_form(const Mat3 &F) const {
        Vec6 v = to_kelvin(F);
        return v.dot(kelvin * v);
    }
};

struct CellSolution {
    std::shared_ptr<const PeriodicMesh> mesh;
    CapillaryParams params;
    std::array<Eigen::VectorXd, 6> correctors; // Kelvin-indexed
    std::array<double, 6> energies{};
    std::array<SolveStats, 6> stats{};
    HomogenizedTensor Ahom;
};

/// Homogenized Hooke tensor: diagonal entries from the six Kelvin basis
/// strains (A_hom F.F = 2 F_per(F, lambda_F)), off-diagonal entries by
/// polarization. The corrector map F -> lambda_F is linear, so
/// lambda_{Fi+Fj} = lambda_i + lambda_j and q(Fi+Fj) is an energy evaluation,
/// not an extra solve; the inexact-CG error enters the energy only at second
/// order because the functional is stationary at the minimizer.
inline CellSolution compute_Ahom(std::shared_ptr<const PeriodicMesh> mesh, const ElasticTensor &A,
                                 const CapillaryParams &prm, const SolveOptions &opt = {}) {
    CellSolver solver(*mesh, A, prm, opt);
    CellSolution sol;
    sol.mesh = mesh;
    sol.params = prm;

    std::array<Eigen::VectorXd, 6> utot;
    for (int I = 0; I < 6; ++I) {
        auto r = solver.solve(kelvin_basis(I));
        sol.correctors[I] = std::move(r.corrector);
        sol.energies[I] = r.energy;
        sol.stats[I] = r.stats;
        utot[I] = affine_field(*mesh, kelvin_basis(I)) + sol.correctors[I];
    }

    Mat6 q2 = Mat6::Zero(); // cross-energy table B(u_I, u_J)
    for (int I = 0; I < 6; ++I) {
        Eigen::VectorXd HuI = solver.op().gradient(utot[I]); // H u + 2c(g.u)g
        for (int J = 0; J < 6; ++J) q2(I, J) = HuI.dot(utot[J]);
    }
    HomogenizedTensor &H = sol.Ahom;
    H.symmetry_defect = (q2 - q2.transpose()).cwiseAbs().maxCoeff() / q2.cwiseAbs().maxCoeff();
    for (int I = 0; I < 6; ++I) H.kelvin(I, I) = 2.0 * sol.energies[I];
    for (int I = 0; I < 6; ++I)
        for (int J = I + 1; J < 6; ++J) {
            double qIJ =
                solver.energy_at(kelvin_basis(I) + kelvin_basis(J), sol.correctors[I] + sol.correctors[J]);
            double v = 0.5 * (2.0 * qIJ - 2.0 * sol.energies[I] - 2.0 * sol.energies[J]);
            H.kelvin(I, J) = H.kelvin(J, I) = v;
        }

    // random-strain consistency of the polarization identity
    Pcg32 rng(424242);
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
        Vec6 c;
        for (int i = 0; i < 6; ++i) c[i] = rng.uniform(-1.0, 1.0);
        Mat3 F = from_kelvin(c);
        Eigen::VectorXd psi = c[0] * sol.correctors[0];
        for (int i = 1; i < 6; ++i) psi += c[i] * sol.correctors[i];
        double q = 2.0 * solver.energy_at(F, psi);
        double qh = H.quadratic_form(F);
        worst = std::max(worst, std::abs(q - qh) / (std::abs(qh) + 1e-300));
    }
    H.polarization_residual = worst;

    Eigen::SelfAdjointEigenSolver<Mat6> es(H.kelvin, Eigen::EigenvaluesOnly);
    H.eigenvalues = es.eigenvalues();
    H.refine = mesh->refine;
    H.solver_tol = opt.tol;
    for (const auto &s : sol.stats) H.max_iterations = std::max(H.max_iterations, s.iterations);
    H.a = prm.a;
    H.gamma = prm.gamma;
    H.lambda_fl = prm.lambda_fl;
    return sol;
}

/// Rigid-inclusion comparison: psi = -F y on the cavity, periodic outside,
/// bulk term only. Returns (1/2) A_rigid F.F.
inline double solve_rigid_cell(const Mat3 &F, const PeriodicMesh &mesh, const ElasticTensor &A,
                               const SolveOptions &opt = {}, SolveStats *stats_out = nullptr) {
    CellOperator op;
    op.H = assemble_bulk(mesh, A);
    op.fluid.c = 0.0;
    ConstraintSet cs;
    cs.periodic_pairs = mesh.pairs;
    Mat3 S = sym(F);
    for (int nid : mesh.cavity.nodes) cs.dirichlet.push_back({nid, -S * mesh.nodes[nid]});
    ReducedSystem rs(op.H, cs, 3);
    Eigen::VectorXd uF = affine_field(mesh, F);
    SolveStats stats;
    Eigen::VectorXd psi = rs.solve(-(op.H * uF), stats, opt);
    if (stats_out) *stats_out = stats;
    return 0.5 * (uF + psi).dot(op.H * (uF + psi));
}

/// Full rigid-inclusion Kelvin matrix from the six basis strains; the
/// Dirichlet data and load are linear in F, so cross energies come from
/// evaluation at summed fields like in compute_Ahom.
inline Mat6 compute_Arigid(const PeriodicMesh &mesh, const ElasticTensor &A,
                           const SolveOptions &opt = {}) {
    SparseSym K = assemble_bulk(mesh, A);
    std::array<Eigen::VectorXd, 6> utot;
    for (int I = 0; I < 6; ++I) {
        Mat3 F = kelvin_basis(I);
        ConstraintSet cs;
        cs.periodic_pairs = mesh.pairs;
        for (int nid : mesh.cavity.nodes) cs.dirichlet.push_back({nid, -F * mesh.nodes[nid]});
        ReducedSystem rs(K, cs, 3);
        Eigen::VectorXd uF = affine_field(mesh, F);
        SolveStats stats;
        utot[I] = uF + rs.solve(-(K * uF), stats, opt);
    }
    Mat6 out;
    for (int I = 0; I < 6; ++I) {
        Eigen::VectorXd KuI = K * utot[I];
        for (int J = I; J < 6; ++J) out(I, J) = out(J, I) = KuI.dot(utot[J]);
    }
    return out;
}

struct DisplacementField {
    Eigen::VectorXd u;
    SolveStats stats;
};

/// Galerkin solution of the single-inclusion problem on the box domain:
/// clamped on the marked face, traction free elsewhere, capillary terms on
/// the cavity, body load f on the solid.
inline DisplacementField solve_single_inclusion(const DomainMesh &mesh, const ElasticTensor &A,
                                                const CapillaryParams &prm,
                                                const std::function<Vec3(const Vec3 &)> &f,
                                                const SolveOptions &opt = {}) {
    if (!prm.stable()) throw StabilityFault("single inclusion: unstable capillary parameters");
    CellOperator op = assemble_operator(mesh, mesh.cavity, A, prm.gamma, prm.lambda_fl, prm.a);
    ConstraintSet cs;
    for (int nid : mesh.gamma_nodes) cs.dirichlet.push_back({nid, Vec3::Zero()});
    ReducedSystem rs(op.H, cs, 3, op.fluid.c != 0.0 ? &op.fluid : nullptr);
    DisplacementField out;
    out.u = rs.solve(assemble_load(mesh, f), out.stats, opt);
    return out;
}

struct InterfaceIdentity {
    double lhs = 0.0; // weak <((A E u) e_r)_r, 1>
    double rhs = 0.0; // (3 lambda_fl / a - 2 gamma / a^2) int u.e_r dH
    double residual = 0.0;
};

/// Integrated radial-traction identity of the solution. The trace pairing is
/// evaluated weakly: test with the Galerkin lift of e_r (nodal e_r on the
/// cavity, zero on the outer boundary, discrete harmonic inside), for which
/// <(A E u) e_r, v> = int f.v - int A E u . E v. Galerkin orthogonality makes
/// the value independent of the interior extension up to the solver residual.
inline InterfaceIdentity check_interface_identity(const Eigen::VectorXd &u, const DomainMesh &mesh,
                                                  const ElasticTensor &A, const CapillaryParams &prm,
                                                  const std::function<Vec3(const Vec3 &)> &f,
                                                  const SolveOptions &opt = {}) {
    const int n = static_cast<int>(mesh.node_count());
    // scalar Laplacian for the componentwise harmonic lift
    std::vector<Triplet> trips;
    for (const auto &t : mesh.tets) {
        auto g = femdetail::tet_geometry(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]],
                                         mesh.nodes[t[3]]);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (t[i] <= t[j]) trips.push_back({t[i], t[j], g.volume * g.grad[i].dot(g.grad[j])});
    }
    SparseSym L = SparseSym::from_triplets(n, trips);

    std::vector<char> outer(n, 0);
    double Lw = mesh.half_width;
    for (int i = 0; i < n; ++i)
        if (mesh.nodes[i].cwiseAbs().maxCoeff() > Lw * (1.0 - 1e-9)) outer[i] = 1;

    Eigen::VectorXd lift = Eigen::VectorXd::Zero(3 * n);
    for (int c = 0; c < 3; ++c) {
        ConstraintSet cs;
        for (int nid : mesh.cavity.nodes) {
            Vec3 er = mesh.nodes[nid].normalized();
            cs.dirichlet.push_back({nid, Vec3(er[c], 0, 0)});
        }
        for (int i = 0; i < n; ++i)
            if (outer[i] && !std::binary_search(mesh.cavity.nodes.begin(), mesh.cavity.nodes.end(), i))
                cs.dirichlet.push_back({i, Vec3::Zero()});
        ReducedSystem rs(L, cs, 1);
        SolveStats st;
        SolveOptions lift_opt = opt;
        Eigen::VectorXd vc = rs.solve(Eigen::VectorXd::Zero(n), st, lift_opt);
        for (int i = 0; i < n; ++i) lift[3 * i + c] = vc[i];
    }

    SparseSym Kb = assemble_bulk(mesh, A);
    Eigen::VectorXd load = assemble_load(mesh, f);
    InterfaceIdentity out;
    out.lhs = load.dot(lift) - u.dot(Kb * lift);
    RankOneTerm g = assemble_nonlocal(mesh.cavity, mesh, 1.0, prm.a);
    double flux = g.g.dot(u); // int u.e_r dH
    out.rhs = (3.0 * prm.lambda_fl / prm.a - 2.0 * prm.gamma / (prm.a * prm.a)) * flux;
    double scale = load.norm() * lift.norm() * 1e-12;
    out.residual = std::abs(out.lhs - out.rhs) / (std::abs(out.lhs) + std::abs(out.rhs) + scale + 1e-300);
    return out;
}

// ---------------------------------------------------------------------------
// Corrector reconstruction: pure evaluation of the two-scale expansion at
// sample points, no convergence claim.
// ---------------------------------------------------------------------------

class TetLocator {
public:
    explicit TetLocator(const MeshBase &mesh, int bins = 32) : mesh_(mesh), bins_(bins) {
        cells_.resize(static_cast<std::size_t>(bins) * bins * bins);
        for (std::size_t e = 0; e < mesh.tets.size(); ++e) {
            const auto &t = mesh.tets[e];
            Vec3 lo = mesh.nodes[t[0]], hi = lo;
            for (int i = 1; i < 4; ++i) {
                lo = lo.cwiseMin(mesh.nodes[t[i]]);
                hi = hi.cwiseMax(mesh.nodes[t[i]]);
            }
            auto rng_lo = bin_index(lo), rng_hi = bin_index(hi);
            for (int i = rng_lo[0]; i <= rng_hi[0]; ++i)
                for (int j = rng_lo[1]; j <= rng_hi[1]; ++j)
                    for (int k = rng_lo[2]; k <= rng_hi[2]; ++k)
                        cells_[(static_cast<std::size_t>(i) * bins_ + j) * bins_ + k].push_back(
                            static_cast<int>(e));
        }
    }

    /// Tet containing y, or -1. bary_out gets the barycentric coordinates.
    int locate(const Vec3 &y, Eigen::Vector4d &bary_out) const {
        auto b = bin_index(y);
        int best = -1;
        double best_min = -1e30;
        for (int e : cells_[(static_cast<std::size_t>(b[0]) * bins_ + b[1]) * bins_ + b[2]]) {
            const auto &t = mesh_.tets[e];
            Eigen::Matrix4d M;
            for (int i = 0; i < 4; ++i) {
                M.block<3, 1>(0, i) = mesh_.nodes[t[i]];
                M(3, i) = 1.0;
            }
            Eigen::Vector4d rhs;
            rhs << y, 1.0;
            Eigen::Vector4d bary = M.partialPivLu().solve(rhs);
            double mn = bary.minCoeff();
            if (mn > best_min) {
                best_min = mn;
                best = e;
                bary_out = bary;
            }
            if (mn >= -1e-12) return e;
        }
        return best_min >= -1e-6 ? best : -1;
    }

private:
    std::array<int, 3> bin_index(const Vec3 &p) const {
        std::array<int, 3> b;
        for (int c = 0; c < 3; ++c) {
            double t = (p[c] + 0.5) * bins_;
            b[c] = std::clamp(static_cast<int>(t), 0, bins_ - 1);
        }
        return b;
    }
    const MeshBase &mesh_;
    int bins_;
    std::vector<std::vector<int>> cells_;
};

/// Constant strain of a P1 field on one tet.
inline Mat3 tet_strain(const MeshBase &mesh, const Eigen::VectorXd &u, int tet) {
    const auto &t = mesh.tets[tet];
    auto g = femdetail::tet_geometry(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]],
                                     mesh.nodes[t[3]]);
    Mat3 G = Mat3::Zero();
    for (int i = 0; i < 4; ++i) G += u.segment<3>(3 * t[i]) * g.grad[i].transpose();
    return sym(G);
}

struct CorrectorSample {
    Vec3 x;
    Mat3 macro_strain;
    Mat3 reconstructed; // E_x u(x) + sum_I (E u)_I E_y lambda_I(x/eps)
};

/// Wrap into the centered unit cell [-1/2, 1/2).
inline Vec3 wrap_to_cell(const Vec3 &v) {
    Vec3 y;
    for (int c = 0; c < 3; ++c) y[c] = v[c] - std::floor(v[c] + 0.5);
    return y;
}

/// Two-scale strain reconstruction at the sample points. Throws OutOfDomain
/// when the fast variable lands in the cavity.
inline std::vector<CorrectorSample> corrector_reconstruct(
    const std::function<Mat3(const Vec3 &)> &macro_gradient, const CellSolution &cell, double eps,
    const std::vector<Vec3> &points) {
    const PeriodicMesh &mesh = *cell.mesh;
    TetLocator locator(mesh);
    std::vector<CorrectorSample> out;
    out.reserve(points.size());
    for (const Vec3 &x : points) {
        Vec3 y = wrap_to_cell(x / eps);
        Eigen::Vector4d bary;
        int tet = locator.locate(y, bary);
        if (tet < 0) {
            if (y.norm() <= mesh.a * (1.0 + 1e-6))
                throw OutOfDomain("corrector_reconstruct: fast variable inside the cavity");
            throw OutOfDomain("corrector_reconstruct: point not in the cell mesh");
        }
        CorrectorSample s;
        s.x = x;
        s.macro_strain = sym(macro_gradient(x));
        Vec6 e = to_kelvin(s.macro_strain);
        Mat3 corr = Mat3::Zero();
        for (int I = 0; I < 6; ++I)
            if (e[I] != 0.0) corr += e[I] * tet_strain(mesh, cell.correctors[I], tet);
        s.reconstructed = s.macro_strain + corr;
        out.push_back(s);
    }
    return out;
}

/// Surface part of the reconstruction: per-triangle tangential gradient of
/// P2_a applied to the reconstructed radial trace (grad u . y + corrector).e_r
/// for a frozen macroscopic gradient.
inline std::vector<Vec3> corrector_surface_gradient(const Mat3 &macro_gradient,
                                                    const CellSolution &cell) {
    const PeriodicMesh &mesh = *cell.mesh;
    const SurfacePatch &patch = mesh.cavity;
    Vec6 e = to_kelvin(sym(macro_gradient));

    // nodal radial trace
    std::vector<double> phi(mesh.node_count(), 0.0);
    for (int nid : patch.nodes) {
        Vec3 y = mesh.nodes[nid];
        Vec3 er = y.normalized();
        Vec3 val = macro_gradient * y;
        for (int I = 0; I < 6; ++I)
            if (e[I] != 0.0) val += e[I] * cell.correctors[I].segment<3>(3 * nid);
        phi[nid] = val.dot(er);
    }
    // discrete P2: subtract the constant and linear moments (area weights)
    double m0 = 0.0;
    Vec3 m1 = Vec3::Zero();
    double area = patch.area_total;
    for (std::size_t k = 0; k < patch.tris.size(); ++k) {
        const auto &t = patch.tris[k];
        double w = patch.tri_areas[k] / 3.0;
        for (int i = 0; i < 3; ++i) {
            m0 += w * phi[t[i]];
            m1 += w * phi[t[i]] * mesh.nodes[t[i]].normalized();
        }
    }
    m0 /= area;
    m1 *= 3.0 / area;
    for (int nid : patch.nodes) phi[nid] -= m0 + m1.dot(mesh.nodes[nid].normalized());

    std::vector<Vec3> grads;
    grads.reserve(patch.tris.size());
    for (const auto &t : patch.tris) {
        auto g = femdetail::tri_geometry(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]);
        Vec3 gr = Vec3::Zero();
        for (int i = 0; i < 3; ++i) gr += phi[t[i]] * g.grad[i];
        grads.push_back(gr);
    }
    return grads;
}

} // namespace caphom
