#include "cotlift/quadrature.hpp"

#include <numbers>

namespace cotlift {

GroupQuadrature GroupQuadrature::uniform(const GroupSpec& group, int n_per_factor) {
    if (n_per_factor < 1) throw ValidationError("quadrature needs at least one node per factor");
    if (!group.all_periodic())
        throw ValidationError("Haar quadrature is defined for compact (circle/torus) groups only");
    const int d = group.dim();
    GroupQuadrature quad;
    quad.group = group;
    long total = 1;
    for (int i = 0; i < d; ++i) total *= n_per_factor;
    quad.nodes.reserve(total);
    quad.weights.assign(total, 1.0 / static_cast<double>(total));
    std::vector<int> idx(d, 0);
    for (long k = 0; k < total; ++k) {
        Vec node(d);
        for (int i = 0; i < d; ++i)
            node[i] = 2.0 * std::numbers::pi * idx[i] / static_cast<double>(n_per_factor);
        quad.nodes.push_back(std::move(node));
        for (int i = d - 1; i >= 0; --i) {
            if (++idx[i] < n_per_factor) break;
            idx[i] = 0;
        }
    }
    return quad;
}

}  // namespace cotlift
