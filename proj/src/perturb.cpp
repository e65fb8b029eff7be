#include "gvfseg/perturb.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace gvfseg {

LabelVolume perturb_labels(const LabelVolume& preseg, const PerturbParams& params) {
    const GridShape& shape = preseg.shape;
    if (params.sigma_ptb < 0)
        throw std::invalid_argument("perturb_labels: sigma_ptb must be >= 0");
    if (params.sigma_ptb == 0.0) return preseg;

    std::array<int, 3> g{1, 1, 1};
    for (int a = 0; a < shape.ndim; ++a) {
        g[a] = params.grid[a];
        if (g[a] < 2)
            throw std::invalid_argument("perturb_labels: control grid needs >= 2 points per axis");
    }

    // Control-point displacements, one Gaussian draw per point per used axis.
    const std::size_t ncp = static_cast<std::size_t>(g[0]) * g[1] * g[2];
    std::vector<std::array<double, 3>> disp(ncp, {0, 0, 0});
    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> gauss(0.0, params.sigma_ptb);
    for (auto& d : disp)
        for (int a = 0; a < shape.ndim; ++a) d[a] = gauss(rng);

    auto cp_index = [&](int i, int j, int k) {
        return (static_cast<std::size_t>(i) * g[1] + j) * g[2] + k;
    };

    LabelVolume out(shape);
    const std::size_t n = shape.voxel_count();
    for (std::size_t p = 0; p < n; ++p) {
        Coord c = shape.coord(p);
        // position in control-grid coordinates
        std::array<double, 3> t{0, 0, 0};
        std::array<int, 3> i0{0, 0, 0};
        std::array<double, 3> frac{0, 0, 0};
        for (int a = 0; a < 3; ++a) {
            if (g[a] == 1) continue;
            t[a] = (shape.dims[a] > 1)
                       ? static_cast<double>(c[a]) * (g[a] - 1) / (shape.dims[a] - 1)
                       : 0.0;
            i0[a] = std::min(static_cast<int>(t[a]), g[a] - 2);
            frac[a] = t[a] - i0[a];
        }
        std::array<double, 3> u{0, 0, 0};
        for (int di = 0; di <= (g[0] > 1 ? 1 : 0); ++di)
            for (int dj = 0; dj <= (g[1] > 1 ? 1 : 0); ++dj)
                for (int dk = 0; dk <= (g[2] > 1 ? 1 : 0); ++dk) {
                    double w = (di ? frac[0] : 1 - frac[0]) * (dj ? frac[1] : 1 - frac[1]) *
                               (dk ? frac[2] : 1 - frac[2]);
                    const auto& d = disp[cp_index(i0[0] + di, i0[1] + dj, i0[2] + dk)];
                    for (int a = 0; a < 3; ++a) u[a] += w * d[a];
                }
        Coord src;
        for (int a = 0; a < 3; ++a) {
            int s = static_cast<int>(std::lround(c[a] - u[a]));
            src[a] = std::clamp(s, 0, shape.dims[a] - 1);
        }
        out[p] = preseg[shape.index(src)];
    }
    return out;
}

}  // namespace gvfseg
