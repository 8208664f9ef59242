#pragma once

#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <string>

namespace caphom {

struct Error : std::runtime_error {
    explicit Error(const std::string &msg) : std::runtime_error(msg) {}
};

// Invalid physical parameters (nonpositive modulus, radius, ...).
struct DomainFault : Error { using Error::Error; };
// Cavity does not fit in the cell / box.
struct GeometryFault : Error { using Error::Error; };
// Linear solver failed to reach the requested residual.
struct SolverFault : Error { using Error::Error; };
// Undeformed state is not a minimizer for these parameters.
struct StabilityFault : Error { using Error::Error; };
// cof(A+B) expansion requires det A != 0.
struct SingularBase : Error { using Error::Error; };
// Sampled deformation gradient has nonpositive determinant.
struct OrientationFault : Error { using Error::Error; };
// A node is claimed by incompatible constraints.
struct InconsistentConstraints : Error { using Error::Error; };
// Tangential derivative requested without a closed form or expansion.
struct ExpansionRequired : Error { using Error::Error; };
// Shell coefficient denominator vanishes for these parameters.
struct DegenerateDenominator : Error { using Error::Error; };
// Bound objective is not concave; indicates bad parameters.
struct ConcavityFault : Error { using Error::Error; };
// Stress evaluation requested inside the cavity.
struct InsideCavity : Error { using Error::Error; };
// Corrector sample point outside the solid part of the cell.
struct OutOfDomain : Error { using Error::Error; };

/// PCG32 generator (O'Neill). Fixed algorithm so seeded runs are
/// reproducible across platforms, unlike <random> distributions.
class Pcg32 {
public:
    explicit Pcg32(std::uint64_t seed, std::uint64_t stream = 0x14057b7ef767814fULL) {
        state_ = 0u;
        inc_ = (stream << 1u) | 1u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() {
        std::uint64_t hi = next_u32();
        std::uint64_t lo = next_u32();
        return static_cast<double>(((hi << 21) ^ lo) & ((1ULL << 53) - 1)) * 0x1p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Box-Muller; second value discarded to stay stateless.
    double normal() {
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    std::uint64_t state_, inc_;
};

inline double ball_volume(double radius) { return 4.0 / 3.0 * M_PI * radius * radius * radius; }
inline double sphere_area(double radius) { return 4.0 * M_PI * radius * radius; }

} // namespace caphom
