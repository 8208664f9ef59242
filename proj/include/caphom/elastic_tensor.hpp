#pragma once

#include <array>

#include <Eigen/Dense>

#include "common.hpp"
#include "mat3.hpp"

namespace caphom {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Orthonormal (Kelvin) basis of symmetric 3x3 matrices, ordered
// (11, 22, 33, sqrt2*23, sqrt2*13, sqrt2*12). Frobenius inner products of
// matrices become ordinary dot products of their 6-vectors, with no Voigt
// factor bookkeeping.
inline const std::array<std::pair<int, int>, 6> &kelvin_index_pairs() {
    static const std::array<std::pair<int, int>, 6> p = {
        {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}}};
    return p;
}

inline Mat3 kelvin_basis(int I) {
    auto [i, j] = kelvin_index_pairs()[I];
    Mat3 B = Mat3::Zero();
    if (i == j) {
        B(i, i) = 1.0;
    } else {
        B(i, j) = B(j, i) = 1.0 / std::sqrt(2.0);
    }
    return B;
}

inline Vec6 to_kelvin(const Mat3 &M) {
    Mat3 S = sym(M);
    Vec6 v;
    const double s2 = std::sqrt(2.0);
    v << S(0, 0), S(1, 1), S(2, 2), s2 * S(1, 2), s2 * S(0, 2), s2 * S(0, 1);
    return v;
}

inline Mat3 from_kelvin(const Vec6 &v) {
    const double is2 = 1.0 / std::sqrt(2.0);
    Mat3 S;
    S << v[0], is2 * v[5], is2 * v[4],
         is2 * v[5], v[1], is2 * v[3],
         is2 * v[4], is2 * v[3], v[2];
    return S;
}

/// Hooke tensor with minor and major symmetries, stored as its symmetric
/// Kelvin 6x6 matrix.
class ElasticTensor {
public:
    ElasticTensor() : K_(Mat6::Zero()) {}

    static ElasticTensor isotropic(double lambda, double mu) {
        ElasticTensor A;
        Vec6 v = Vec6::Zero();
        v[0] = v[1] = v[2] = 1.0;
        A.K_ = 2.0 * mu * Mat6::Identity() + lambda * v * v.transpose();
        A.isotropic_ = true;
        A.lambda_ = lambda;
        A.mu_ = mu;
        return A;
    }

    static ElasticTensor from_kelvin_matrix(const Mat6 &K) {
        ElasticTensor A;
        A.K_ = 0.5 * (K + K.transpose());
        return A;
    }

    const Mat6 &kelvin() const { return K_; }
    bool is_isotropic() const { return isotropic_; }
    double lambda() const { return lambda_; }
    double mu() const { return mu_; }

    /// Rank-4 component A_ijkl reconstructed from the Kelvin matrix.
    double component(int i, int j, int k, int l) const {
        double v = 0.0;
        for (int I = 0; I < 6; ++I) {
            Mat3 BI = kelvin_basis(I);
            if (BI(i, j) == 0.0) continue;
            for (int J = 0; J < 6; ++J) {
                Mat3 BJ = kelvin_basis(J);
                v += K_(I, J) * BI(i, j) * BJ(k, l);
            }
        }
        return v;
    }

    /// Stress from (the symmetric part of) a strain.
    Mat3 apply(const Mat3 &F) const {
        if (isotropic_) {
            Mat3 S = sym(F);
            return lambda_ * S.trace() * Mat3::Identity() + 2.0 * mu_ * S;
        }
        return from_kelvin(K_ * to_kelvin(F));
    }

    /// Q(F) = A F . F (on the symmetric part of F).
    double quadratic_form(const Mat3 &F) const {
        Vec6 v = to_kelvin(F);
        return v.dot(K_ * v);
    }

    /// Dual form Q^{-1}(sigma) = A^{-1} sigma . sigma. Closed form for the
    /// isotropic tag, Kelvin-matrix solve otherwise.
    double dual_form(const Mat3 &sigma) const {
        if (isotropic_) {
            Mat3 S = sym(sigma);
            double tr = S.trace();
            return ((S.array() * S.array()).sum() - lambda_ * tr * tr / (3.0 * lambda_ + 2.0 * mu_)) /
                   (2.0 * mu_);
        }
        Vec6 v = to_kelvin(sigma);
        return v.dot(K_.ldlt().solve(v));
    }

    Vec6 eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<Mat6> es(K_, Eigen::EigenvaluesOnly);
        return es.eigenvalues();
    }

    bool positive_definite(double tol = 0.0) const { return eigenvalues().minCoeff() > tol; }

private:
    Mat6 K_;
    bool isotropic_ = false;
    double lambda_ = 0.0, mu_ = 0.0;
};

} // namespace caphom
