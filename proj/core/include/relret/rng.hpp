#pragma once

#include <cstdint>
#include <random>

namespace relret {

/// Seeded RNG with hand-rolled distributions so that identical seeds give
/// identical streams on every platform (std:: distributions are
/// implementation-defined, which would break frozen fixtures).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1) with 53 bits of randomness.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller. Two uniforms per draw, no cached spare.
    double normal();

    /// N(0, stddev) redrawn until within trunc_sigmas standard deviations.
    double truncated_normal(double stddev, double trunc_sigmas);

    /// Uniform integer in [0, n). n must be > 0.
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

    /// Deterministic Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::mt19937_64 gen_;
};

} // namespace relret
