#pragma once

#include <vector>

#include "cotlift/action.hpp"

namespace cotlift {

// Numerical Haar measure for compact (all-periodic) groups: a uniform product
// grid whose nodes form a subgroup, so reindexing-by-a-node is exact.
struct GroupQuadrature {
    GroupSpec group;
    std::vector<Vec> nodes;
    std::vector<double> weights;  // equal, summing to 1

    int size() const { return static_cast<int>(nodes.size()); }

    // n_per_factor nodes per circle factor (2*pi k / N). Throws
    // ValidationError for groups with a non-compact factor.
    static GroupQuadrature uniform(const GroupSpec& group, int n_per_factor);
};

}  // namespace cotlift
