#include <gtest/gtest.h>

#include <caphom/common.hpp>
#include <caphom/sphere_rule.hpp>
#include <caphom/sphharm.hpp>

using namespace caphom;

namespace {
const SphereRule &rule20() {
    static SphereRule r = SphereRule::for_degree(20);
    return r;
}

Eigen::VectorXd random_coeffs(Pcg32 &rng) {
    Eigen::VectorXd c(harmonic_count(4));
    for (int i = 0; i < c.size(); ++i) c[i] = rng.uniform(-1.0, 1.0);
    return c;
}
} // namespace

TEST(SphereRule, WeightsSumTo4Pi) {
    const auto &R = rule20();
    double s = 0.0;
    for (double w : R.weights) s += w;
    EXPECT_NEAR(s, 4.0 * M_PI, 1e-12);
}

TEST(SphereRule, MonomialMoments) {
    const auto &R = rule20();
    for (int p = 0; p <= 6; ++p)
        for (int q = 0; p + q <= 6; ++q)
            for (int r = 0; p + q + r <= 6; ++r) {
                double quad = R.integrate([&](const Eigen::Vector3d &n) {
                    return std::pow(n.x(), p) * std::pow(n.y(), q) * std::pow(n.z(), r);
                });
                EXPECT_NEAR(quad, sphere_monomial_moment(p, q, r), 1e-12) << p << q << r;
            }
}

TEST(Harmonics, Orthonormal) {
    const auto &R = rule20();
    int n = harmonic_count(4);
    for (int fa = 0; fa < n; ++fa) {
        auto [la, ma] = harmonic_lm(fa);
        Poly3 pa = solid_harmonic(la, ma);
        for (int fb = fa; fb < n; ++fb) {
            auto [lb, mb] = harmonic_lm(fb);
            Poly3 pb = solid_harmonic(lb, mb);
            double dot = R.integrate([&](const Eigen::Vector3d &x) { return pa(x) * pb(x); });
            EXPECT_NEAR(dot, fa == fb ? 1.0 : 0.0, 1e-12) << la << ma << " " << lb << mb;
        }
    }
}

TEST(Harmonics, Eigencheck) {
    for (double a : {1.0, 0.35}) {
        for (int l = 0; l <= 4; ++l)
            for (int m = -l; m <= l; ++m) {
                double q = eigencheck(l, m, a, rule20());
                EXPECT_NEAR(q, l * (l + 1) / (a * a), 1e-8 * (1.0 + l * (l + 1) / (a * a)));
            }
    }
}

TEST(Projections, AffineHasNoP2) {
    Pcg32 rng(3);
    double a = 0.4;
    Eigen::Vector3d c(rng.normal(), rng.normal(), rng.normal());
    auto f = SphereField::from_function(rule20(), a, [&](const Eigen::Vector3d &x) {
        return c.dot(x) / a + 0.7;
    });
    auto s = project_components(f);
    EXPECT_NEAR(s.p0, 0.7, 1e-12);
    EXPECT_LE((s.p1 - c).norm(), 1e-12 * c.norm());
    EXPECT_LE(s.norm2_p2, 1e-20 * f.norm2());
}

TEST(Projections, SquaredCoordinate) {
    double a = 0.8;
    auto f = SphereField::from_function(rule20(), a, [&](const Eigen::Vector3d &x) {
        return x.z() * x.z() / (a * a);
    });
    auto s = project_components(f);
    EXPECT_NEAR(s.p0, 1.0 / 3.0, 1e-12);
    EXPECT_LE(s.p1.norm(), 1e-13);
}

TEST(Projections, ParsevalSplit) {
    Pcg32 rng(5);
    for (int k = 0; k < 50; ++k) {
        double a = rng.uniform(0.2, 1.5);
        auto f = SphereField::from_harmonics(rule20(), a, random_coeffs(rng));
        auto s = project_components(f);
        double total = s.norm2_p0 + s.norm2_p1 + s.norm2_p2;
        EXPECT_NEAR(total, f.norm2(), 1e-10 * f.norm2());
        // orthogonality of the parts
        double cross = 0.0;
        const auto &R = *f.rule;
        for (std::size_t i = 0; i < R.size(); ++i)
            cross += R.weights[i] * (s.p0 + s.p1.dot(R.nodes[i])) *
                     s.p2.values[static_cast<Eigen::Index>(i)];
        EXPECT_LE(std::abs(cross * a * a), 1e-10 * f.norm2());
    }
}

TEST(TangentialGradient, ConstantIsZero) {
    auto f = SphereField::from_harmonics(rule20(), 0.5,
                                         Eigen::VectorXd::Unit(harmonic_count(4), 0) * 2.0);
    EXPECT_NEAR(tangential_norm2(f), 0.0, 1e-18);
}

TEST(TangentialGradient, LinearCoordinate) {
    // phi = y3/a on the sphere: grad_tau phi = (e3 - (y3/a) y/a)/a.
    double a = 0.6;
    auto f = SphereField::from_function(rule20(), a,
                                        [&](const Eigen::Vector3d &x) { return x.z() / a; });
    f.ambient_gradient = [a](const Eigen::Vector3d &x) {
        double r = x.norm();
        return (Eigen::Vector3d::UnitZ() / r - x.z() / (r * r * r) * x).eval();
    };
    auto g = tangential_gradient(f);
    const auto &R = *f.rule;
    for (std::size_t i = 0; i < R.size(); ++i) {
        const Eigen::Vector3d &nu = R.nodes[i];
        Eigen::Vector3d expect = (Eigen::Vector3d::UnitZ() - nu.z() * nu) / a;
        EXPECT_LE((g[i] - expect).norm(), 1e-12);
        EXPECT_LE(std::abs(g[i].dot(nu)), 1e-12);
    }
}

TEST(TangentialGradient, RequiresClosedForm) {
    auto f = SphereField::from_function(rule20(), 1.0,
                                        [](const Eigen::Vector3d &x) { return x.x(); });
    EXPECT_THROW(tangential_gradient(f), ExpansionRequired);
}

TEST(TangentialGradient, EigenExpansionNorm) {
    Pcg32 rng(7);
    for (int k = 0; k < 20; ++k) {
        double a = rng.uniform(0.3, 1.2);
        Eigen::VectorXd c = random_coeffs(rng);
        auto f = SphereField::from_harmonics(rule20(), a, c);
        double expect = 0.0;
        for (int fl = 0; fl < c.size(); ++fl) {
            auto [l, m] = harmonic_lm(fl);
            expect += l * (l + 1) / (a * a) * c[fl] * c[fl] * a * a;
        }
        EXPECT_NEAR(tangential_norm2(f), expect, 1e-9 * (1.0 + expect));
    }
}

TEST(TangentialGradient, PWCIdentityAndP2Inequality) {
    Pcg32 rng(11);
    for (int k = 0; k < 100; ++k) {
        double a = rng.uniform(0.3, 1.2);
        Eigen::VectorXd c = random_coeffs(rng);
        auto f = SphereField::from_harmonics(rule20(), a, c);
        auto s = project_components(f);
        // grad of the P1 part: ||grad P1||^2 = (2/a^2) ||P1||^2
        Eigen::VectorXd c1 = Eigen::VectorXd::Zero(c.size());
        for (int fl = 1; fl < 4; ++fl) c1[fl] = c[fl];
        auto f1 = SphereField::from_harmonics(rule20(), a, c1);
        EXPECT_NEAR(tangential_norm2(f1), 2.0 / (a * a) * s.norm2_p1,
                    1e-9 * (1.0 + s.norm2_p1 / (a * a)));
        // P2 part: ||grad P2||^2 >= (6/a^2) ||P2||^2
        Eigen::VectorXd c2 = c;
        for (int fl = 0; fl < 4; ++fl) c2[fl] = 0.0;
        auto f2 = SphereField::from_harmonics(rule20(), a, c2);
        EXPECT_GE(tangential_norm2(f2), 6.0 / (a * a) * s.norm2_p2 - 1e-9 * (1.0 + s.norm2_p2));
    }
}

TEST(PoincareGap, EqualityCases) {
    double a = 0.7;
    // constant
    auto f0 = SphereField::from_harmonics(rule20(), a,
                                          Eigen::VectorXd::Unit(harmonic_count(4), 0) * 1.3);
    EXPECT_NEAR(poincare_gap(f0), 0.0, 1e-10 * f0.norm2());
    // pure degree 1 saturates
    auto f1 = SphereField::from_harmonics(rule20(), a,
                                          Eigen::VectorXd::Unit(harmonic_count(4), 2) * 0.8);
    EXPECT_NEAR(poincare_gap(f1), 0.0, 1e-10 * f1.norm2());
}

TEST(PoincareGap, Degree2Value) {
    double a = 0.5;
    auto f = SphereField::from_harmonics(rule20(), a,
                                         Eigen::VectorXd::Unit(harmonic_count(4), 6) * 1.1);
    EXPECT_NEAR(poincare_gap(f), 2.0 * f.norm2(), 1e-9 * f.norm2());
}

TEST(PoincareGap, NonnegativeRandom) {
    Pcg32 rng(13);
    for (int k = 0; k < 1000; ++k) {
        double a = rng.uniform(0.2, 1.5);
        auto f = SphereField::from_harmonics(rule20(), a, random_coeffs(rng));
        EXPECT_GE(poincare_gap(f), -1e-10 * f.norm2());
    }
}

TEST(CoercivityGap, AffineEquality) {
    auto prm = CapillaryParams::make(0.9, 4.0, 0.45);
    Pcg32 rng(17);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(harmonic_count(4));
    c[0] = rng.normal();
    c[1] = rng.normal();
    c[2] = rng.normal();
    c[3] = rng.normal();
    auto f = SphereField::from_harmonics(rule20(), prm.a, c);
    auto g = coercivity_gap(f, prm);
    EXPECT_NEAR(g.slack, 0.0, 1e-10 * (std::abs(g.lhs) + std::abs(g.rhs) + 1.0));
}

TEST(CoercivityGap, Degree2Values) {
    auto prm = CapillaryParams::make(1.2, 6.0, 0.4);
    double a = prm.a;
    auto f = SphereField::from_harmonics(rule20(), a,
                                         Eigen::VectorXd::Unit(harmonic_count(4), 5) * 0.9);
    auto g = coercivity_gap(f, prm);
    EXPECT_NEAR(g.lhs, 2.0 * prm.gamma / (a * a) * f.norm2(), 1e-9 * std::abs(g.lhs));
    EXPECT_GE(g.slack, -1e-12 * std::abs(g.lhs));
}

TEST(CoercivityGap, RandomBandLimited) {
    Pcg32 rng(19);
    for (int k = 0; k < 1000; ++k) {
        double a = rng.uniform(0.2, 1.0);
        double lfl = rng.uniform(0.5, 5.0);
        double gamma = rng.uniform(0.0, 1.49) * lfl * a;
        auto prm = CapillaryParams::make(std::max(gamma, 1e-9), lfl, a);
        auto f = SphereField::from_harmonics(rule20(), a, random_coeffs(rng));
        auto g = coercivity_gap(f, prm);
        double scale = prm.gamma * f.norm2() / (a * a) + 1.0;
        EXPECT_GE(g.slack, -1e-10 * scale);
        EXPECT_GE(g.lhs, -1e-10 * scale);
    }
}
