#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "common.hpp"
#include "parallel.hpp"

namespace caphom {

struct Triplet {
    int r, c;
    double v;
};

/// Plain CSR, used as the application form of the symmetric matrices.
struct CsrMatrix {
    int n = 0;
    std::vector<int> rowptr, col;
    std::vector<double> val;

    void multiply(const double *x, double *y) const {
        parallel_for(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                double s = 0.0;
                for (int k = rowptr[i]; k < rowptr[i + 1]; ++k) s += val[k] * x[col[k]];
                y[i] = s;
            }
        });
    }

    Eigen::VectorXd operator*(const Eigen::VectorXd &x) const {
        Eigen::VectorXd y(n);
        multiply(x.data(), y.data());
        return y;
    }
};

/// Symmetric sparse matrix in a deterministic layout; only the upper triangle
/// is stored, so symmetry is structural. to_full() expands to CSR for fast
/// row-parallel products.
class SparseSym {
public:
    SparseSym() = default;

    static SparseSym from_triplets(int n, std::vector<Triplet> trips) {
        for (auto &t : trips)
            if (t.r > t.c) std::swap(t.r, t.c);
        std::sort(trips.begin(), trips.end(), [](const Triplet &a, const Triplet &b) {
            return a.r != b.r ? a.r < b.r : a.c < b.c;
        });
        SparseSym m;
        m.n_ = n;
        m.rowptr_.assign(n + 1, 0);
        std::size_t i = 0;
        while (i < trips.size()) {
            std::size_t j = i;
            double s = 0.0;
            while (j < trips.size() && trips[j].r == trips[i].r && trips[j].c == trips[i].c)
                s += trips[j++].v;
            m.col_.push_back(trips[i].c);
            m.val_.push_back(s);
            ++m.rowptr_[trips[i].r + 1];
            i = j;
        }
        for (int r = 0; r < n; ++r) m.rowptr_[r + 1] += m.rowptr_[r];
        return m;
    }

    int size() const { return n_; }
    std::size_t stored_entries() const { return val_.size(); }

    double diag(int i) const {
        for (int k = rowptr_[i]; k < rowptr_[i + 1]; ++k)
            if (col_[k] == i) return val_[k];
        return 0.0;
    }

    /// Re-emit scaled triplets (upper triangle) for combining matrices.
    void emit(std::vector<Triplet> &out, double scale = 1.0) const {
        for (int r = 0; r < n_; ++r)
            for (int k = rowptr_[r]; k < rowptr_[r + 1]; ++k)
                out.push_back({r, col_[k], scale * val_[k]});
    }

    CsrMatrix to_full() const {
        CsrMatrix f;
        f.n = n_;
        std::vector<int> count(n_, 0);
        for (int r = 0; r < n_; ++r)
            for (int k = rowptr_[r]; k < rowptr_[r + 1]; ++k) {
                ++count[r];
                if (col_[k] != r) ++count[col_[k]];
            }
        f.rowptr.assign(n_ + 1, 0);
        for (int r = 0; r < n_; ++r) f.rowptr[r + 1] = f.rowptr[r] + count[r];
        f.col.resize(f.rowptr[n_]);
        f.val.resize(f.rowptr[n_]);
        std::vector<int> cursor(f.rowptr.begin(), f.rowptr.end() - 1);
        for (int r = 0; r < n_; ++r)
            for (int k = rowptr_[r]; k < rowptr_[r + 1]; ++k) {
                int c = col_[k];
                f.col[cursor[r]] = c;
                f.val[cursor[r]++] = val_[k];
                if (c != r) {
                    f.col[cursor[c]] = r;
                    f.val[cursor[c]++] = val_[k];
                }
            }
        return f;
    }

    Eigen::VectorXd operator*(const Eigen::VectorXd &x) const {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
        for (int r = 0; r < n_; ++r)
            for (int k = rowptr_[r]; k < rowptr_[r + 1]; ++k) {
                y[r] += val_[k] * x[col_[k]];
                if (col_[k] != r) y[col_[k]] += val_[k] * x[r];
            }
        return y;
    }

private:
    int n_ = 0;
    std::vector<int> rowptr_, col_;
    std::vector<double> val_;
};

/// Nonlocal fluid term c (g . U)^2 kept in factored form; applied matrix-free
/// as 2 c (g . x) g inside the solver.
struct RankOneTerm {
    Eigen::VectorXd g;
    double c = 0.0;

    double energy(const Eigen::VectorXd &u) const {
        double s = g.dot(u);
        return c * s * s;
    }
};

struct DirichletBC {
    int node;
    Eigen::Vector3d value;
};

struct ConstraintSet {
    std::vector<DirichletBC> dirichlet;
    std::vector<std::array<int, 3>> periodic_pairs; // (neg, pos, axis); equal values
    bool mean_zero = false;
};

struct SolveStats {
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

struct SolveOptions {
    double tol = 1e-10;
    long max_iter_factor = 20; // times the reduced dimension
};

/// Constraint-reduced view of a symmetric operator A + rank-one on nodal
/// vector unknowns with dpn components per node. Periodic slaves are
/// eliminated by master substitution (union-find over the pair list),
/// Dirichlet nodes are removed with a right-hand-side correction, and the
/// optional mean-zero constraint is enforced by projection, which keeps the
/// reduced operator positive definite.
class ReducedSystem {
public:
    ReducedSystem(const SparseSym &A, const ConstraintSet &cs, int dpn,
                  const RankOneTerm *rank_one = nullptr)
        : full_(A.to_full()), dpn_(dpn), rank_one_(rank_one), mean_zero_(cs.mean_zero) {
        int n_nodes = A.size() / dpn;
        // orbit representatives
        parent_.resize(n_nodes);
        std::iota(parent_.begin(), parent_.end(), 0);
        for (const auto &p : cs.periodic_pairs) unite(p[0], p[1]);

        std::vector<char> is_dirichlet(n_nodes, 0);
        u_fixed_ = Eigen::VectorXd::Zero(A.size());
        for (const auto &d : cs.dirichlet) {
            if (is_dirichlet[d.node]) {
                Eigen::VectorXd prev = u_fixed_.segment(dpn * d.node, dpn);
                if ((prev - d.value.head(dpn)).norm() > 0.0)
                    throw InconsistentConstraints("conflicting Dirichlet values on a node");
            }
            is_dirichlet[d.node] = 1;
            has_dirichlet_ = true;
            for (int c = 0; c < dpn; ++c) u_fixed_[dpn * d.node + c] = d.value[c];
        }
        for (const auto &p : cs.periodic_pairs)
            if (is_dirichlet[p[0]] || is_dirichlet[p[1]])
                throw InconsistentConstraints("node is both Dirichlet and periodic");

        node_master_.assign(n_nodes, -1);
        node_red_.assign(n_nodes, -1);
        int nfree = 0;
        for (int i = 0; i < n_nodes; ++i) {
            if (is_dirichlet[i]) continue;
            int r = find(i);
            if (is_dirichlet[r]) throw InconsistentConstraints("orbit touches a Dirichlet node");
            node_master_[i] = r;
            if (r == i) node_red_[i] = nfree++;
        }
        nred_ = nfree * dpn;

    }

    int reduced_size() const { return nred_; }
    int full_size() const { return full_.n; }

    /// full = P reduced + u_fixed
    Eigen::VectorXd prolong(const Eigen::VectorXd &xr) const {
        Eigen::VectorXd x = u_fixed_;
        int n_nodes = full_.n / dpn_;
        for (int i = 0; i < n_nodes; ++i) {
            int m = node_master_[i];
            if (m < 0) continue;
            int r = node_red_[m];
            for (int c = 0; c < dpn_; ++c) x[dpn_ * i + c] = xr[dpn_ * r + c];
        }
        return x;
    }

    Eigen::VectorXd restrict_(const Eigen::VectorXd &x) const {
        Eigen::VectorXd xr = Eigen::VectorXd::Zero(nred_);
        int n_nodes = full_.n / dpn_;
        for (int i = 0; i < n_nodes; ++i) {
            int m = node_master_[i];
            if (m < 0) continue;
            int r = node_red_[m];
            for (int c = 0; c < dpn_; ++c) xr[dpn_ * r + c] += x[dpn_ * i + c];
        }
        return xr;
    }

    /// Orthogonal projector removing the constant (translation) directions
    /// from the reduced coordinates. Orthogonality keeps the projected
    /// operator and preconditioner symmetric, which CG requires; the
    /// translations are the (near) kernel of the periodic cell operator.
    void project_mean(Eigen::VectorXd &xr) const {
        if (!mean_zero_) return;
        int nfree = nred_ / dpn_;
        if (nfree == 0) return;
        for (int c = 0; c < dpn_; ++c) {
            double m = 0.0;
            for (int i = 0; i < nfree; ++i) m += xr[dpn_ * i + c];
            m /= nfree;
            for (int i = 0; i < nfree; ++i) xr[dpn_ * i + c] -= m;
        }
    }

    Eigen::VectorXd apply(const Eigen::VectorXd &xr) const {
        Eigen::VectorXd x = prolong_homogeneous(xr);
        Eigen::VectorXd y(full_.n);
        full_.multiply(x.data(), y.data());
        if (rank_one_ && rank_one_->c != 0.0) {
            double s = det_dot(rank_one_->g.data(), x.data(), x.size());
            y += 2.0 * rank_one_->c * s * rank_one_->g;
        }
        Eigen::VectorXd yr = restrict_(y);
        project_mean(yr);
        return yr;
    }

    /// Reduced right-hand side for full load b: P^T (b - A u_fixed - ...).
    Eigen::VectorXd reduce_rhs(const Eigen::VectorXd &b) const {
        Eigen::VectorXd r = b;
        if (has_dirichlet_) {
            Eigen::VectorXd Au(full_.n);
            full_.multiply(u_fixed_.data(), Au.data());
            r -= Au;
            if (rank_one_ && rank_one_->c != 0.0) {
                double s = rank_one_->g.dot(u_fixed_);
                r -= 2.0 * rank_one_->c * s * rank_one_->g;
            }
        }
        Eigen::VectorXd rr = restrict_(r);
        project_mean(rr);
        return rr;
    }

    /// Diagonal of the reduced operator approximated by orbit-folded
    /// diagonals; only used for Jacobi preconditioning.
    Eigen::VectorXd jacobi_diagonal() const {
        Eigen::VectorXd dfull(full_.n);
        for (int i = 0; i < full_.n; ++i) {
            double d = 0.0;
            for (int k = full_.rowptr[i]; k < full_.rowptr[i + 1]; ++k)
                if (full_.col[k] == i) d = full_.val[k];
            dfull[i] = d;
        }
        if (rank_one_ && rank_one_->c != 0.0)
            dfull += 2.0 * rank_one_->c * rank_one_->g.cwiseProduct(rank_one_->g);
        Eigen::VectorXd dr = restrict_(dfull);
        for (int i = 0; i < nred_; ++i)
            if (!(dr[i] > 0.0)) dr[i] = 1.0;
        return dr;
    }

    /// Preconditioned CG on the reduced, projected subspace. x0, when given,
    /// seeds the iteration (it is projected onto the subspace first).
    Eigen::VectorXd solve(const Eigen::VectorXd &b_full, SolveStats &stats,
                          const SolveOptions &opt = {},
                          const Eigen::VectorXd *x0 = nullptr) const {
        Eigen::VectorXd b = reduce_rhs(b_full);
        Eigen::VectorXd invdiag = jacobi_diagonal().cwiseInverse();
        Eigen::VectorXd x = Eigen::VectorXd::Zero(nred_);
        bool warm = x0 && x0->size() == nred_;
        if (warm) {
            x = *x0;
            project_mean(x);
        }
        Eigen::VectorXd r = warm ? (b - apply(x)).eval() : b;
        double bnorm = std::sqrt(det_dot(b.data(), b.data(), b.size()));
        if (bnorm == 0.0) {
            stats = {0, 0.0, true};
            return prolong(x);
        }
        Eigen::VectorXd z = invdiag.cwiseProduct(r);
        project_mean(z);
        Eigen::VectorXd p = z;
        double rz = det_dot(r.data(), z.data(), r.size());
        long maxit = std::max<long>(100, opt.max_iter_factor * nred_);
        stats.converged = false;
        for (long it = 0; it < maxit; ++it) {
            Eigen::VectorXd Ap = apply(p);
            double pAp = det_dot(p.data(), Ap.data(), p.size());
            if (!(pAp > 0.0)) throw SolverFault("cg: operator not positive definite on subspace");
            double alpha = rz / pAp;
            x += alpha * p;
            r -= alpha * Ap;
            double rnorm = std::sqrt(det_dot(r.data(), r.data(), r.size()));
            stats.iterations = static_cast<int>(it) + 1;
            stats.rel_residual = rnorm / bnorm;
            if (stats.rel_residual <= opt.tol) {
                stats.converged = true;
                break;
            }
            z = invdiag.cwiseProduct(r);
            project_mean(z);
            double rz2 = det_dot(r.data(), z.data(), r.size());
            p = z + (rz2 / rz) * p;
            rz = rz2;
        }
        if (!stats.converged) throw SolverFault("cg: no convergence within the iteration budget");
        return prolong(x);
    }

private:
    Eigen::VectorXd prolong_homogeneous(const Eigen::VectorXd &xr) const {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(full_.n);
        int n_nodes = full_.n / dpn_;
        for (int i = 0; i < n_nodes; ++i) {
            int m = node_master_[i];
            if (m < 0) continue;
            int r = node_red_[m];
            for (int c = 0; c < dpn_; ++c) x[dpn_ * i + c] = xr[dpn_ * r + c];
        }
        return x;
    }

    int find(int i) {
        while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
        return i;
    }
    void unite(int i, int j) {
        i = find(i);
        j = find(j);
        if (i == j) return;
        if (i < j) std::swap(i, j); // smallest id is the representative
        parent_[i] = j;
    }

    CsrMatrix full_;
    int dpn_;
    const RankOneTerm *rank_one_;
    bool mean_zero_;
    std::vector<int> parent_;
    std::vector<int> node_master_, node_red_;
    Eigen::VectorXd u_fixed_;
    bool has_dirichlet_ = false;
    int nred_ = 0;
};

} // namespace caphom
