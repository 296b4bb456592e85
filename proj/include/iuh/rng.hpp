#ifndef IUH_RNG_HPP
#define IUH_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace iuh {

/// splitmix64 finalizer; used to derive well-separated child seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic child seed for a work unit addressed by (a, b) under a
/// master seed. Results are independent of scheduling order.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t a,
                                std::uint64_t b = 0) {
    return mix64(mix64(master ^ mix64(a)) ^ mix64(~b));
}

/// Seeded generator with portable draw sequences (the distributions are
/// implemented directly over mt19937_64 rather than through the
/// implementation-defined std:: distribution adaptors).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard Box-Muller; two engine draws per variate.
    double normal(double mu, double sigma) {
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mu + sigma * r * std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Unbiased uniform integer in [0, n). n must be > 0.
    std::size_t index(std::size_t n) {
        const std::uint64_t nn = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % nn;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return static_cast<std::size_t>(x % nn);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace iuh

#endif
