#pragma once

#include <array>
#include <cmath>
#include <map>

#include <Eigen/Dense>

namespace caphom {

/// Sparse trivariate polynomial. Small and slow; used for closed-form
/// spherical harmonics and test oracles, never in inner loops over meshes.
class Poly3 {
public:
    using Exponents = std::array<int, 3>;

    Poly3() = default;
    explicit Poly3(double c) {
        if (c != 0.0) terms_[{0, 0, 0}] = c;
    }

    static Poly3 monomial(int i, int j, int k, double c = 1.0) {
        Poly3 p;
        if (c != 0.0) p.terms_[{i, j, k}] = c;
        return p;
    }
    static Poly3 x() { return monomial(1, 0, 0); }
    static Poly3 y() { return monomial(0, 1, 0); }
    static Poly3 z() { return monomial(0, 0, 1); }
    /// x^2 + y^2 + z^2
    static Poly3 r2() {
        Poly3 p;
        p.terms_[{2, 0, 0}] = 1.0;
        p.terms_[{0, 2, 0}] = 1.0;
        p.terms_[{0, 0, 2}] = 1.0;
        return p;
    }

    Poly3 &operator+=(const Poly3 &o) {
        for (const auto &[e, c] : o.terms_) add(e, c);
        return *this;
    }
    Poly3 &operator-=(const Poly3 &o) {
        for (const auto &[e, c] : o.terms_) add(e, -c);
        return *this;
    }
    friend Poly3 operator+(Poly3 a, const Poly3 &b) { return a += b; }
    friend Poly3 operator-(Poly3 a, const Poly3 &b) { return a -= b; }

    friend Poly3 operator*(const Poly3 &a, const Poly3 &b) {
        Poly3 r;
        for (const auto &[ea, ca] : a.terms_)
            for (const auto &[eb, cb] : b.terms_)
                r.add({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}, ca * cb);
        return r;
    }
    friend Poly3 operator*(double s, Poly3 p) {
        for (auto &[e, c] : p.terms_) c *= s;
        return p;
    }
    friend Poly3 operator*(Poly3 p, double s) { return s * std::move(p); }

    Poly3 derivative(int axis) const {
        Poly3 r;
        for (const auto &[e, c] : terms_) {
            if (e[axis] == 0) continue;
            Exponents d = e;
            d[axis] -= 1;
            r.add(d, c * e[axis]);
        }
        return r;
    }

    std::array<Poly3, 3> gradient() const { return {derivative(0), derivative(1), derivative(2)}; }

    double operator()(const Eigen::Vector3d &p) const {
        double v = 0.0;
        for (const auto &[e, c] : terms_)
            v += c * ipow(p.x(), e[0]) * ipow(p.y(), e[1]) * ipow(p.z(), e[2]);
        return v;
    }

    Eigen::Vector3d eval_gradient(const Eigen::Vector3d &p) const {
        return {derivative(0)(p), derivative(1)(p), derivative(2)(p)};
    }

    bool empty() const { return terms_.empty(); }
    int degree() const {
        int d = 0;
        for (const auto &[e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2]);
        return d;
    }

private:
    static double ipow(double b, int n) {
        double v = 1.0;
        for (int i = 0; i < n; ++i) v *= b;
        return v;
    }
    void add(const Exponents &e, double c) {
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            if (c != 0.0) terms_[e] = c;
        } else {
            it->second += c;
            if (it->second == 0.0) terms_.erase(it);
        }
    }
    std::map<Exponents, double> terms_;
};

} // namespace caphom
