#include "gvfseg/phantom.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace gvfseg {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_inside(const GridShape& shape, const std::array<double, 3>& c, double r,
                  int ndim) {
    for (int a = 0; a < ndim; ++a)
        if (c[a] - r < 0 || c[a] + r > shape.dims[a] - 1)
            throw std::invalid_argument("make_phantom: geometry does not fit the grid");
}

double dist2d(const std::array<double, 3>& c, const Coord& p) {
    double dx = p[0] - c[0], dy = p[1] - c[1];
    return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

LabelVolume foreground_mask(const LabelVolume& gt) {
    LabelVolume out(gt.shape);
    for (std::size_t i = 0; i < gt.data.size(); ++i) out[i] = gt[i] ? 1 : 0;
    return out;
}

Phantom make_phantom(const PhantomSpec& spec, std::uint64_t seed) {
    const GridShape& shape = spec.shape;
    shape.validate();
    if (!(spec.radius > 0)) throw std::invalid_argument("make_phantom: radius must be > 0");
    if (spec.noise_sigma < 0 || spec.hole_rate < 0 || spec.hole_rate > 1)
        throw std::invalid_argument("make_phantom: invalid noise parameters");

    std::array<double, 3> c = spec.center;
    for (int a = 0; a < 3; ++a)
        if (c[a] < 0) c[a] = (shape.dims[a] - 1) / 2.0;

    const std::size_t n = shape.voxel_count();
    LabelVolume gt(shape);
    std::vector<float> level(n, 0.0f);

    auto dist3 = [&](const std::array<double, 3>& ctr, const Coord& p) {
        double s = 0;
        for (int a = 0; a < shape.ndim; ++a) {
            double d = p[a] - ctr[a];
            s += d * d;
        }
        return std::sqrt(s);
    };

    switch (spec.kind) {
        case PhantomKind::Disc: {
            check_inside(shape, c, spec.radius, shape.ndim);
            for (std::size_t p = 0; p < n; ++p)
                if (dist3(c, shape.coord(p)) <= spec.radius) {
                    gt[p] = 1;
                    level[p] = 1.0f;
                }
            break;
        }
        case PhantomKind::CShape: {
            if (!(spec.inner_radius > 0 && spec.inner_radius < spec.radius))
                throw std::invalid_argument("make_phantom: CShape needs 0 < inner < radius");
            check_inside(shape, c, spec.radius, std::min(shape.ndim, 2));
            const double half_open = spec.opening_deg * kPi / 360.0;
            // 3D grids extrude the C over a slab twice the ring width thick.
            const double half_thick = spec.radius - spec.inner_radius;
            for (std::size_t p = 0; p < n; ++p) {
                Coord co = shape.coord(p);
                double r = dist2d(c, co);
                if (r < spec.inner_radius || r > spec.radius) continue;
                double ang = std::atan2(co[1] - c[1], co[0] - c[0]);
                if (std::abs(ang) < half_open) continue;  // the opening faces +axis0
                if (shape.ndim == 3 && std::abs(co[2] - c[2]) > half_thick) continue;
                gt[p] = 1;
                level[p] = 1.0f;
            }
            break;
        }
        case PhantomKind::NestedRings: {
            if (!(spec.inner_radius > 0 && spec.inner_radius < spec.radius))
                throw std::invalid_argument("make_phantom: NestedRings needs 0 < inner < radius");
            check_inside(shape, c, spec.radius, shape.ndim);
            for (std::size_t p = 0; p < n; ++p) {
                double r = dist3(c, shape.coord(p));
                if (r <= spec.inner_radius) {
                    gt[p] = 2;
                    level[p] = 1.0f;
                } else if (r <= spec.radius) {
                    gt[p] = 1;
                    level[p] = 0.5f;
                }
            }
            break;
        }
        case PhantomKind::TwoBlobs: {
            double sep = spec.separation > 0 ? spec.separation : 2 * spec.radius + 4;
            std::array<double, 3> c1 = c, c2 = c;
            c1[0] -= sep / 2;
            c2[0] += sep / 2;
            check_inside(shape, c1, spec.radius, shape.ndim);
            check_inside(shape, c2, spec.radius, shape.ndim);
            for (std::size_t p = 0; p < n; ++p) {
                Coord co = shape.coord(p);
                if (dist3(c1, co) <= spec.radius)
                    gt[p] = 1;
                else if (dist3(c2, co) <= spec.radius)
                    gt[p] = 2;
                if (gt[p]) level[p] = 1.0f;
            }
            break;
        }
    }

    std::mt19937_64 rng(seed);
    Phantom out;
    out.ground_truth = gt;
    out.observation = ScalarVolume(shape);

    // Punch holes: small discs of background intensity centered on random
    // object voxels, until hole_rate of the object is corrupted.
    std::vector<float> corrupted = level;
    if (spec.hole_rate > 0) {
        std::vector<std::size_t> object_voxels;
        for (std::size_t p = 0; p < n; ++p)
            if (gt[p]) object_voxels.push_back(p);
        const std::size_t target =
            static_cast<std::size_t>(spec.hole_rate * object_voxels.size());
        std::uniform_int_distribution<std::size_t> pick(0, object_voxels.size() - 1);
        std::uniform_real_distribution<double> rad(1.0, 2.5);
        std::vector<std::uint8_t> hit(n, 0);
        std::size_t hits = 0;
        int guard = 0;
        while (hits < target && ++guard < 100000) {
            Coord hc = shape.coord(object_voxels[pick(rng)]);
            double r = rad(rng);
            int ri = static_cast<int>(std::ceil(r));
            for (int d0 = -ri; d0 <= ri; ++d0)
                for (int d1 = -ri; d1 <= ri; ++d1)
                    for (int d2 = (shape.ndim == 3 ? -ri : 0); d2 <= (shape.ndim == 3 ? ri : 0);
                         ++d2) {
                        if (d0 * d0 + d1 * d1 + d2 * d2 > r * r) continue;
                        Coord q{hc[0] + d0, hc[1] + d1, hc[2] + d2};
                        if (!shape.in_bounds(q)) continue;
                        std::size_t qi = shape.index(q);
                        if (gt[qi] && !hit[qi]) {
                            hit[qi] = 1;
                            corrupted[qi] = 0.0f;
                            ++hits;
                        }
                    }
        }
    }

    if (spec.noise_sigma > 0) {
        std::normal_distribution<double> noise(0.0, spec.noise_sigma);
        for (std::size_t p = 0; p < n; ++p)
            out.observation[p] = corrupted[p] + static_cast<float>(noise(rng));
    } else {
        out.observation.data = corrupted;
    }

    // Two-class Gaussian posterior (equal priors) with analytic class means.
    double fg_mean = 0;
    std::size_t fg_count = 0;
    for (std::size_t p = 0; p < n; ++p)
        if (gt[p]) {
            fg_mean += level[p];
            ++fg_count;
        }
    fg_mean = fg_count ? fg_mean / fg_count : 1.0;
    const double sd = std::max(spec.noise_sigma, 0.05);
    out.prob = ScalarVolume(shape);
    for (std::size_t p = 0; p < n; ++p) {
        double v = out.observation[p];
        double a = (v - fg_mean) / sd;
        double b = v / sd;
        // log-domain ratio keeps the posterior stable for far outliers
        out.prob[p] = static_cast<float>(1.0 / (1.0 + std::exp(0.5 * (a * a - b * b))));
    }
    return out;
}

}  // namespace gvfseg
