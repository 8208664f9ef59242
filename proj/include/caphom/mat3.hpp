#pragma once

#include <cmath>
#include <utility>

#include <Eigen/Dense>

#include "common.hpp"

namespace caphom {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// Cofactor matrix, convention (cof A)^T A = (det A) I. For invertible A this
/// is det(A) A^{-T}; computed from 2x2 minors so no invertibility is needed.
inline Mat3 cofactor(const Mat3 &A) {
    Mat3 c;
    c(0, 0) = A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1);
    c(0, 1) = A(1, 2) * A(2, 0) - A(1, 0) * A(2, 2);
    c(0, 2) = A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0);
    c(1, 0) = A(0, 2) * A(2, 1) - A(0, 1) * A(2, 2);
    c(1, 1) = A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0);
    c(1, 2) = A(0, 1) * A(2, 0) - A(0, 0) * A(2, 1);
    c(2, 0) = A(0, 1) * A(1, 2) - A(0, 2) * A(1, 1);
    c(2, 1) = A(0, 2) * A(1, 0) - A(0, 0) * A(1, 2);
    c(2, 2) = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    return c;
}

/// tr cof A = 1/2 ((tr A)^2 - tr A^2), the second invariant.
inline double trace_cofactor(const Mat3 &A) {
    double t = A.trace();
    return 0.5 * (t * t - (A * A).trace());
}

/// cof(A+B) through the rank-one expansion around an invertible base:
///   cof(A+B) = cof A + cof B + ((cof A . B) cof A - cof A B^T cof A) / det A.
/// Throws SingularBase when |det A| < 1e-14.
inline Mat3 cofactor_sum_expansion(const Mat3 &A, const Mat3 &B) {
    double dA = A.determinant();
    if (std::abs(dA) < 1e-14) throw SingularBase("cofactor_sum_expansion: base determinant below 1e-14");
    Mat3 cA = cofactor(A);
    double cAdotB = (cA.array() * B.array()).sum();
    return cA + cofactor(B) + (cAdotB * cA - cA * B.transpose() * cA) / dA;
}

/// Any unit vector orthogonal to nu.
inline Vec3 orthogonal_unit(const Vec3 &nu) {
    Vec3 seed = std::abs(nu.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    Vec3 t = seed - seed.dot(nu) * nu;
    return t.normalized();
}

/// (cof G) nu evaluated as G tau1 x G tau2 for an orthonormal frame with
/// tau1 x tau2 = nu. The value does not depend on the frame choice.
inline std::pair<Vec3, double> cof_normal_on_sphere(const Mat3 &G, const Vec3 &nu) {
    Vec3 t1 = orthogonal_unit(nu);
    Vec3 t2 = nu.cross(t1); // (t1, t2, nu) right handed: t1 x t2 = nu
    Vec3 v = (G * t1).cross(G * t2);
    return {v, v.norm()};
}

inline Mat3 sym(const Mat3 &A) { return 0.5 * (A + A.transpose()); }

} // namespace caphom
