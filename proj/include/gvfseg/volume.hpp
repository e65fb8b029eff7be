#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gvfseg {

using Coord = std::array<int, 3>;

/// Regular 2D/3D grid geometry. 2D grids keep dims[2] == 1 and spacing[2] == 1
/// so every algorithm can loop over three axes uniformly.
struct GridShape {
    int ndim = 0;
    std::array<int, 3> dims{1, 1, 1};
    std::array<double, 3> spacing{1.0, 1.0, 1.0};

    GridShape() = default;
    GridShape(int d0, int d1, double s0 = 1.0, double s1 = 1.0)
        : ndim(2), dims{d0, d1, 1}, spacing{s0, s1, 1.0} {
        validate();
    }
    GridShape(int d0, int d1, int d2, double s0 = 1.0, double s1 = 1.0, double s2 = 1.0)
        : ndim(3), dims{d0, d1, d2}, spacing{s0, s1, s2} {
        validate();
    }

    void validate() const {
        if (ndim != 2 && ndim != 3)
            throw std::invalid_argument("GridShape: ndim must be 2 or 3");
        for (int a = 0; a < ndim; ++a) {
            if (dims[a] <= 0)
                throw std::invalid_argument("GridShape: dims must be positive");
            if (!(spacing[a] > 0.0))
                throw std::invalid_argument("GridShape: spacing must be positive");
        }
    }

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }

    bool in_bounds(const Coord& c) const {
        return c[0] >= 0 && c[0] < dims[0] && c[1] >= 0 && c[1] < dims[1] &&
               c[2] >= 0 && c[2] < dims[2];
    }

    // Row-major, last axis fastest.
    std::size_t index(const Coord& c) const {
        if (!in_bounds(c))
            throw std::out_of_range("GridShape::index: coordinate out of bounds");
        return (static_cast<std::size_t>(c[0]) * dims[1] + c[1]) * dims[2] + c[2];
    }

    Coord coord(std::size_t idx) const {
        if (idx >= voxel_count())
            throw std::out_of_range("GridShape::coord: index out of bounds");
        Coord c;
        c[2] = static_cast<int>(idx % dims[2]);
        idx /= dims[2];
        c[1] = static_cast<int>(idx % dims[1]);
        c[0] = static_cast<int>(idx / dims[1]);
        return c;
    }

    bool same_grid(const GridShape& o) const {
        return ndim == o.ndim && dims == o.dims;
    }

    /// Physical distance between two voxel centers, in mm.
    double physical_distance(const Coord& a, const Coord& b) const {
        double s = 0.0;
        for (int ax = 0; ax < 3; ++ax) {
            double d = (a[ax] - b[ax]) * spacing[ax];
            s += d * d;
        }
        return std::sqrt(s);
    }
};

struct ScalarVolume {
    GridShape shape;
    std::vector<float> data;

    ScalarVolume() = default;
    explicit ScalarVolume(const GridShape& s, float fill = 0.0f)
        : shape(s), data(s.voxel_count(), fill) {}

    float& operator[](std::size_t i) { return data[i]; }
    float operator[](std::size_t i) const { return data[i]; }
    float& at(const Coord& c) { return data[shape.index(c)]; }
    float at(const Coord& c) const { return data[shape.index(c)]; }
};

struct LabelVolume {
    GridShape shape;
    std::vector<std::uint8_t> data;

    LabelVolume() = default;
    explicit LabelVolume(const GridShape& s, std::uint8_t fill = 0)
        : shape(s), data(s.voxel_count(), fill) {}

    std::uint8_t& operator[](std::size_t i) { return data[i]; }
    std::uint8_t operator[](std::size_t i) const { return data[i]; }
    std::uint8_t& at(const Coord& c) { return data[shape.index(c)]; }
    std::uint8_t at(const Coord& c) const { return data[shape.index(c)]; }

    std::size_t count(int label) const {
        std::size_t n = 0;
        for (auto v : data) n += (v == label);
        return n;
    }
};

enum class Connectivity { Face, Full };

/// Neighbor offsets in fixed lexicographic order. Offsets are closed under
/// negation; the order is the tie-break rule for discretization.
struct Neighborhood {
    Connectivity kind = Connectivity::Face;
    int ndim = 0;
    std::vector<Coord> offsets;

    static Neighborhood make(Connectivity kind, int ndim);

    /// Offsets that are lexicographically positive; each unordered neighbor
    /// pair appears exactly once as (p, p + positive offset).
    std::vector<Coord> positive_offsets() const;
};

/// Exact Euclidean distance (mm, spacing-aware) to the nearest voxel carrying
/// `label`. Zero on the label itself.
ScalarVolume distance_transform(const LabelVolume& mask, int label);

/// Same, for an arbitrary boolean site set given as a byte mask (nonzero = site).
ScalarVolume distance_transform_mask(const GridShape& shape, const std::vector<std::uint8_t>& sites);

/// Squared distances in full double precision (the two ops above round to f32).
std::vector<double> squared_distance_transform(const GridShape& shape,
                                               const std::vector<std::uint8_t>& sites);

}  // namespace gvfseg
