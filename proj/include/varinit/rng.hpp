#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "matrix.hpp"

namespace varinit {

// Deterministic random source. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard, and every distribution on top of it is
// implemented here rather than taken from <random>, because the standard does
// not pin down std::normal_distribution's algorithm across library vendors.
//
//   * uniform doubles: ((x >> 11) + 1) * 2^-53, a value in (0, 1]; the +1
//     keeps log() off zero in the Box-Muller transform below
//   * gaussians: classic Box-Muller, pairs consumed per call, any unused
//     second member of a pair is discarded at the call boundary so that each
//     call's draw count depends only on its arguments
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform on (0, 1]
    double next_double() {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1p-53;
    }

    // uniform on [lo, hi)
    double uniform(double lo, double hi) {
        if (!(lo <= hi)) throw std::invalid_argument("uniform: lo > hi");
        return lo + (hi - lo) * (next_double() - 0x1p-53);
    }

    // one N(mean, variance) draw; the pair partner is discarded
    double gaussian(double mean, double variance) {
        check_variance(variance);
        if (variance == 0.0) return mean;
        double z0, z1;
        pair(z0, z1);
        return mean + std::sqrt(variance) * z0;
    }

    // n iid N(mean, variance) draws
    Vector gaussian_vector(double mean, double variance, std::size_t n) {
        check_variance(variance);
        Vector out(n, mean);
        if (variance == 0.0) return out;
        const double sd = std::sqrt(variance);
        for (std::size_t i = 0; i + 1 < n; i += 2) {
            double z0, z1;
            pair(z0, z1);
            out[i] += sd * z0;
            out[i + 1] += sd * z1;
        }
        if (n % 2 == 1) {
            double z0, z1;
            pair(z0, z1);
            out[n - 1] += sd * z0;
        }
        return out;
    }

    // n iid draws from the uniform law with the same mean and variance:
    // U(mean - sqrt(3 v), mean + sqrt(3 v))
    Vector uniform_vector(double mean, double variance, std::size_t n) {
        check_variance(variance);
        Vector out(n, mean);
        if (variance == 0.0) return out;
        const double half = std::sqrt(3.0 * variance);
        for (std::size_t i = 0; i < n; ++i) out[i] = uniform(mean - half, mean + half);
        return out;
    }

private:
    static void check_variance(double variance) {
        if (!(variance >= 0.0) || !std::isfinite(variance))
            throw std::invalid_argument("variance must be finite and >= 0");
    }

    void pair(double& z0, double& z1) {
        constexpr double two_pi = 6.283185307179586476925286766559;
        const double u1 = next_double();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = two_pi * u2;
        z0 = r * std::cos(t);
        z1 = r * std::sin(t);
    }

    std::mt19937_64 engine_;
};

// Deterministic stream splitting: derives an independent-looking child seed
// from a master seed and an index (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace varinit
