#pragma once

#include <cmath>
#include <cstdint>

#include "balance/common.hpp"

namespace balance {

/// Counter-based 64-bit generator (splitmix-style finalizer over a
/// seed/counter pair). Streams are reproducible and independent trials are
/// derived by hashing (base_seed, trial_index).
class CounterRng {
  public:
    explicit CounterRng(uint64_t seed) : seed_(seed) {}

    static uint64_t derive(uint64_t base, uint64_t index) {
        return mix(base ^ 0x2545f4914f6cdd1dULL, index);
    }

    uint64_t next_u64() { return mix(seed_, counter_++); }

    /// uniform in [0,1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// uniform in [lo,hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Box-Muller on the counter stream
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double(), u2 = next_double();
        while (u1 <= 1e-300) u1 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    int next_int(int lo, int hi) {  // inclusive range
        return lo + static_cast<int>(next_u64() % static_cast<uint64_t>(hi - lo + 1));
    }

    /// uniform on the unit sphere S^{d-1}
    Vec unit_vector(int d) {
        Vec v(d);
        double n = 0.0;
        do {
            for (int i = 0; i < d; ++i) v[i] = next_gaussian();
            n = two_norm(v);
        } while (n < 1e-12);
        for (double& x : v) x /= n;
        return v;
    }

  private:
    static uint64_t mix(uint64_t seed, uint64_t ctr) {
        uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (ctr + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t seed_;
    uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace balance
