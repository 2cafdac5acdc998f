#include <cmath>
#include <unordered_map>

#include "schro/errors.hpp"
#include "schro/geometry.hpp"

namespace schro {

namespace {

std::uint64_t edge_key(int a, int b) {
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (hi << 32) | lo;
}

}  // namespace

ManifoldMesh build_icosphere(int subdivisions, double radius) {
    if (subdivisions < 0 || subdivisions > 7) throw InputError("icosphere: subdivisions must be in [0, 7]");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("icosphere: radius must be positive");

    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Eigen::Vector3d> p = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1},
    };
    // Counter-clockwise seen from outside.
    std::vector<Triangle> tris = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
        {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1},
    };
    for (auto& v : p) v = v.normalized() * radius;

    for (int s = 0; s < subdivisions; ++s) {
        std::unordered_map<std::uint64_t, int> midpoint;
        midpoint.reserve(tris.size() * 2);
        auto split = [&](int a, int b) {
            const auto key = edge_key(a, b);
            if (auto it = midpoint.find(key); it != midpoint.end()) return it->second;
            const int id = static_cast<int>(p.size());
            p.push_back((0.5 * (p[a] + p[b])).normalized() * radius);
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<Triangle> next;
        next.reserve(tris.size() * 4);
        for (const auto& t : tris) {
            const int ab = split(t[0], t[1]);
            const int bc = split(t[1], t[2]);
            const int ca = split(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        tris = std::move(next);
    }
    return make_surface(std::move(p), std::move(tris));
}

}  // namespace schro
