// Homogenized tensor of a liquid-filled cell vs the void and rigid
// comparison materials, printed as Kelvin matrices.

#include <cstdio>
#include <memory>

#include <caphom/solve.hpp>

using namespace caphom;

namespace {
void print_kelvin(const char *name, const Mat6 &K) {
    std::printf("%s =\n", name);
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) std::printf(" %9.5f", K(i, j));
        std::printf("\n");
    }
}
} // namespace

int main() {
    set_num_threads(2);
    const double a = 0.2;
    auto mesh = std::make_shared<const PeriodicMesh>(build_cell_mesh(a, 2));
    auto A = ElasticTensor::isotropic(1.0, 1.0);

    auto prm = CapillaryParams::make(0.2, 4.0, a);
    auto hom = compute_Ahom(mesh, A, prm);
    auto voided = compute_Ahom(mesh, A, CapillaryParams::void_like(a));
    Mat6 rigid = compute_Arigid(*mesh, A);

    print_kelvin("A_void ", voided.Ahom.kelvin);
    print_kelvin("A_hom  ", hom.Ahom.kelvin);
    print_kelvin("A_rigid", rigid);
    std::printf("capillary stiffening of the shear constant: %+.4f%%\n",
                100.0 * (hom.Ahom.kelvin(3, 3) / voided.Ahom.kelvin(3, 3) - 1.0));
    return 0;
}
