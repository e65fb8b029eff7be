#pragma once

#include <cstdint>

#include "gvfseg/volume.hpp"

namespace gvfseg {

/// Coarse-grid random deformation of a label volume. Control points get iid
/// zero-mean Gaussian displacements (voxel units); the dense field is their
/// multilinear interpolation and labels are pulled by nearest neighbor at
/// x - u(x). Deterministic for a given seed.
struct PerturbParams {
    std::array<int, 3> grid{8, 8, 8};  // control-grid dims (>= 2 per used axis)
    double sigma_ptb = 0.0;            // per-axis displacement std, voxels
    std::uint64_t seed = 0;
};

LabelVolume perturb_labels(const LabelVolume& preseg, const PerturbParams& params);

}  // namespace gvfseg
