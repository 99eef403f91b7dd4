#include "cotlift/sampling.hpp"

namespace cotlift {

Box Box::cube(int dim, double lo, double hi) {
    Box b;
    b.lo = Vec::Constant(dim, lo);
    b.hi = Vec::Constant(dim, hi);
    return b;
}

std::vector<Vec> sample_box(const Box& box, int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Vec> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        Vec p(box.dim());
        for (int i = 0; i < box.dim(); ++i) p[i] = rng.uniform(box.lo[i], box.hi[i]);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace cotlift
