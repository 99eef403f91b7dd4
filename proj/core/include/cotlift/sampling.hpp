#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cotlift/chart.hpp"

namespace cotlift {

// Axis-aligned sampling box.
struct Box {
    Vec lo;
    Vec hi;

    static Box cube(int dim, double lo, double hi);
    int dim() const { return static_cast<int>(lo.size()); }
};

// Deterministic uniform doubles in [0,1) built from raw mt19937_64 output so
// streams do not depend on the standard library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    // Uniform in [-1,1].
    double symmetric() { return uniform(-1.0, 1.0); }
    std::uint64_t bits() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

std::vector<Vec> sample_box(const Box& box, int count, std::uint64_t seed);

}  // namespace cotlift
