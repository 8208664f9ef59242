#pragma once

#include <cmath>
#include <limits>

#include "common.hpp"

namespace caphom {

/// Surface tension gamma [stress*length], fluid bulk modulus lambda_fl
/// [stress], cavity radius a [length], and the Laplace pressure p = 2 gamma/a
/// that equilibrates the undeformed sphere.
struct CapillaryParams {
    double gamma = 0.0;
    double lambda_fl = 0.0;
    double a = 0.0;
    double p = 0.0;

    static CapillaryParams make(double gamma, double lambda_fl, double a) {
        if (!(lambda_fl > 0.0)) throw DomainFault("CapillaryParams: lambda_fl must be positive");
        if (!(a > 0.0)) throw DomainFault("CapillaryParams: radius a must be positive");
        if (!(gamma >= 0.0) || !std::isfinite(gamma) || !std::isfinite(lambda_fl) || !std::isfinite(a))
            throw DomainFault("CapillaryParams: invalid parameter");
        return {gamma, lambda_fl, a, 2.0 * gamma / a};
    }

    /// gamma = lambda_fl = 0: plain traction-free cavity. Kept separate from
    /// make() because the strict constructor rejects lambda_fl = 0.
    static CapillaryParams void_like(double a) {
        if (!(a > 0.0)) throw DomainFault("CapillaryParams: radius a must be positive");
        return {0.0, 0.0, a, 0.0};
    }

    /// Strict threshold gamma < (3/2) lambda_fl a, equivalently p < 3 lambda_fl.
    /// With gamma = 0 there is no destabilizing surface term at all, so that
    /// case is stable independently of lambda_fl.
    bool stable() const { return gamma == 0.0 ? true : gamma < 1.5 * lambda_fl * a; }

    double ball_vol() const { return ball_volume(a); }
};

struct PhiEval {
    double value;
    double d1;
    double d2;
};

/// Cavity-volume energy landscape
///   Phi(t) = gamma C t^(2/3) + (lambda_fl/2)|B_a| (t/|B_a| - 1)^2 - p t,
/// C = (36 pi)^(1/3) the isoperimetric constant. Phi'(0) reported as +inf
/// when gamma > 0.
inline PhiEval phi_eval(double t, const CapillaryParams &prm) {
    if (t < 0.0) throw DomainFault("phi_eval: t must be nonnegative");
    const double C = std::cbrt(36.0 * M_PI);
    const double V = prm.ball_vol();
    PhiEval e;
    e.value = prm.gamma * C * std::pow(t, 2.0 / 3.0) + 0.5 * prm.lambda_fl * V * (t / V - 1.0) * (t / V - 1.0) -
              prm.p * t;
    if (t == 0.0) {
        e.d1 = prm.gamma > 0.0 ? std::numeric_limits<double>::infinity() : -prm.lambda_fl - prm.p;
        e.d2 = prm.gamma > 0.0 ? -std::numeric_limits<double>::infinity() : prm.lambda_fl / V;
        return e;
    }
    e.d1 = (2.0 / 3.0) * prm.gamma * C * std::pow(t, -1.0 / 3.0) + prm.lambda_fl * (t / V - 1.0) - prm.p;
    e.d2 = -(2.0 / 9.0) * prm.gamma * C * std::pow(t, -4.0 / 3.0) + prm.lambda_fl / V;
    return e;
}

/// Inflection point t*: Phi'' < 0 below, > 0 above. Zero when gamma = 0
/// (Phi is then convex on all of [0, inf)).
inline double phi_t_star(const CapillaryParams &prm) {
    if (prm.gamma == 0.0) return 0.0;
    const double C = std::cbrt(36.0 * M_PI);
    return std::pow(9.0 * prm.lambda_fl / (2.0 * prm.gamma * C * prm.ball_vol()), -0.75);
}

struct PhiProfile {
    CapillaryParams params;
    double isoper_const;
    double t_star;
    double t_min;
};

namespace detail {
/// Golden-section minimization; the bracket shrinks to width tol regardless
/// of the function's conditioning.
template <class F>
double golden_section(F &&f, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}
} // namespace detail

/// Minimizer of Phi over t > t*. Phi is strictly convex there, so Phi' is
/// increasing and the minimizer is its unique zero: bracket [t*, T] with T
/// doubling until Phi'(T) > 0, then bisect on the sign of Phi'. (Plain
/// function-value golden section only localizes a smooth minimum to about
/// sqrt(eps) relative, too coarse for the 1e-10 confirmation below.)
/// For stable parameters the minimizer is |B_a|, returned analytically after
/// the numerical search confirms it. At the threshold gamma = 1.5 lambda_fl a
/// Phi is nondecreasing and the minimizer degenerates to the endpoint t = 0.
inline double phi_minimize(const CapillaryParams &prm) {
    const double V = prm.ball_vol();
    if (prm.gamma == 1.5 * prm.lambda_fl * prm.a && prm.gamma > 0.0) return 0.0;

    double lo = phi_t_star(prm);
    double T = std::max(2.0 * V, lo > 0.0 ? 2.0 * lo : V);
    int guard = 0;
    while (phi_eval(T, prm).d1 <= 0.0) {
        T *= 2.0;
        if (++guard > 200) throw SolverFault("phi_minimize: no bracket for Phi'");
    }
    double hi = T;
    while (hi - lo > 1e-13 * V) {
        double mid = 0.5 * (lo + hi);
        (phi_eval(mid, prm).d1 < 0.0 ? lo : hi) = mid;
    }
    double t_num = 0.5 * (lo + hi);

    if (prm.stable()) {
        if (std::abs(t_num - V) > 1e-10 * V)
            throw SolverFault("phi_minimize: numerical minimizer disagrees with |B_a|");
        return V;
    }
    return t_num;
}

inline PhiProfile phi_profile(const CapillaryParams &prm) {
    return {prm, std::cbrt(36.0 * M_PI), phi_t_star(prm), phi_minimize(prm)};
}

} // namespace caphom
