#pragma once

#include <cstdint>

#include "gvfseg/volume.hpp"

namespace gvfseg {

enum class PhantomKind { Disc, CShape, NestedRings, TwoBlobs };

/// Analytic test geometry plus observation corruption. Radii and centers are
/// in voxel units; intensity contrast is 1 (background level 0).
struct PhantomSpec {
    PhantomKind kind = PhantomKind::Disc;
    GridShape shape;
    std::array<double, 3> center{-1, -1, -1};  // negative = grid center
    double radius = 0;
    double inner_radius = 0;   // CShape ring inner radius / NestedRings inner object
    double opening_deg = 90;   // CShape angular opening
    double separation = 0;     // TwoBlobs center-to-center distance along axis 0
    double noise_sigma = 0;    // Gaussian intensity noise
    double hole_rate = 0;      // fraction of object voxels hit by punched holes
};

struct Phantom {
    LabelVolume ground_truth;   // 0 background; 1 (and 2 for two-object kinds)
    ScalarVolume observation;   // levels + holes + noise
    ScalarVolume prob;          // two-class Gaussian posterior of "any object"
};

Phantom make_phantom(const PhantomSpec& spec, std::uint64_t seed);

/// Binary foreground mask (any nonzero ground-truth label).
LabelVolume foreground_mask(const LabelVolume& gt);

}  // namespace gvfseg
