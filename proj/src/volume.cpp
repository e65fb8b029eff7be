#include "gvfseg/volume.hpp"

#include <algorithm>
#include <limits>

namespace gvfseg {

Neighborhood Neighborhood::make(Connectivity kind, int ndim) {
    if (ndim != 2 && ndim != 3)
        throw std::invalid_argument("Neighborhood: ndim must be 2 or 3");
    Neighborhood n;
    n.kind = kind;
    n.ndim = ndim;
    const int lo2 = (ndim == 3) ? -1 : 0;
    const int hi2 = (ndim == 3) ? 1 : 0;
    for (int o0 = -1; o0 <= 1; ++o0)
        for (int o1 = -1; o1 <= 1; ++o1)
            for (int o2 = lo2; o2 <= hi2; ++o2) {
                if (o0 == 0 && o1 == 0 && o2 == 0) continue;
                int l1 = std::abs(o0) + std::abs(o1) + std::abs(o2);
                if (kind == Connectivity::Face && l1 != 1) continue;
                n.offsets.push_back({o0, o1, o2});
            }
    // The loop emits offsets in lexicographic order already; keep it explicit.
    std::sort(n.offsets.begin(), n.offsets.end());
    return n;
}

std::vector<Coord> Neighborhood::positive_offsets() const {
    std::vector<Coord> out;
    const Coord zero{0, 0, 0};
    for (const auto& o : offsets)
        if (o > zero) out.push_back(o);
    return out;
}

namespace {

// 1D squared-distance lower envelope (Felzenszwalb & Huttenlocher), with
// physical sample positions x_i = i * step.
void edt_1d(const std::vector<double>& f, double step, std::vector<double>& d,
            std::vector<int>& v, std::vector<double>& z) {
    const int n = static_cast<int>(f.size());
    const double inf = std::numeric_limits<double>::infinity();
    auto intersect = [&](int q, int p) {
        double xq = q * step, xp = p * step;
        return ((f[q] + xq * xq) - (f[p] + xp * xp)) / (2 * xq - 2 * xp);
    };
    int k = 0;
    v[0] = 0;
    z[0] = -inf;
    z[1] = inf;
    for (int q = 1; q < n; ++q) {
        if (f[q] == inf) continue;  // infinite parabola never enters the envelope
        if (f[v[0]] == inf) {       // envelope held only the infinite seed
            k = 0;
            v[0] = q;
            z[0] = -inf;
            z[1] = inf;
            continue;
        }
        double s = intersect(q, v[k]);
        while (s <= z[k]) {
            --k;
            s = intersect(q, v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = inf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        double xq = q * step;
        while (z[k + 1] < xq) ++k;
        double xv = v[k] * step;
        d[q] = (f[v[k]] == inf) ? inf : (xq - xv) * (xq - xv) + f[v[k]];
    }
}

}  // namespace

std::vector<double> squared_distance_transform(const GridShape& shape,
                                               const std::vector<std::uint8_t>& sites) {
    if (sites.size() != shape.voxel_count())
        throw std::invalid_argument("distance_transform: mask size mismatch");
    bool any = false;
    for (auto s : sites)
        if (s) { any = true; break; }
    if (!any)
        throw std::invalid_argument("distance_transform: site set is empty");

    const double inf = std::numeric_limits<double>::infinity();
    const std::size_t n = shape.voxel_count();
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = sites[i] ? 0.0 : inf;

    // Separable pass per axis on squared distances.
    for (int axis = 0; axis < 3; ++axis) {
        if (shape.dims[axis] == 1) continue;
        const int len = shape.dims[axis];
        const double step = shape.spacing[axis];
        std::vector<double> f(len), d(len), z(len + 1);
        std::vector<int> v(len);
        // iterate over all lines along `axis`
        Coord c{0, 0, 0};
        const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
        for (int i1 = 0; i1 < shape.dims[a1]; ++i1)
            for (int i2 = 0; i2 < shape.dims[a2]; ++i2) {
                c[a1] = i1;
                c[a2] = i2;
                for (int j = 0; j < len; ++j) {
                    c[axis] = j;
                    f[j] = sq[shape.index(c)];
                }
                edt_1d(f, step, d, v, z);
                for (int j = 0; j < len; ++j) {
                    c[axis] = j;
                    sq[shape.index(c)] = d[j];
                }
            }
    }
    return sq;
}

ScalarVolume distance_transform_mask(const GridShape& shape,
                                     const std::vector<std::uint8_t>& sites) {
    std::vector<double> sq = squared_distance_transform(shape, sites);
    ScalarVolume out(shape);
    for (std::size_t i = 0; i < sq.size(); ++i)
        out[i] = static_cast<float>(std::sqrt(sq[i]));
    return out;
}

ScalarVolume distance_transform(const LabelVolume& mask, int label) {
    std::vector<std::uint8_t> sites(mask.data.size());
    bool any = false;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        sites[i] = (mask[i] == label);
        any = any || sites[i];
    }
    if (!any)
        throw std::invalid_argument("distance_transform: label " + std::to_string(label) +
                                    " not present in mask");
    return distance_transform_mask(mask.shape, sites);
}

}  // namespace gvfseg
