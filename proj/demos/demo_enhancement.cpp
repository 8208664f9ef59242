// Prints the certified stiffness change against surface tension in the
// dilute regime: positive slope above gamma = 2 mu a, negative below.

#include <cstdio>

#include <caphom/dilute.hpp>

using namespace caphom;

int main() {
    const double lambda = 1.0, mu = 1.0, b = 0.45, f = 1.0;
    std::printf("%10s %12s %12s %12s %10s\n", "g=γ/2μa", "slope(1e-3)", "slope(1e-4)", "limit (*)",
                "enhanced");
    for (double g : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0}) {
        auto chk = dilute_limit_check(lambda, mu, g, {1e-3, 1e-4}, b, 0.0, f);
        std::printf("%10.2f %12.6f %12.6f %12.6f %10s\n", g, chk.slopes[0], chk.slopes[1], chk.star,
                    chk.star > 0.0 ? "yes" : "no");
    }
    return 0;
}
