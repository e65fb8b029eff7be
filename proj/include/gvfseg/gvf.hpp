#pragma once

#include <cstdint>
#include <vector>

#include "gvfseg/volume.hpp"

namespace gvfseg {

struct GvfParams {
    double mu = 0.2;          // smoothness weight
    double dt = 0.0;          // time step; 0 = 90% of the stability bound
    int max_iters = 2000;
    double tol = 1e-4;        // max per-voxel update magnitude to stop at
    double core_threshold = 0.05;  // fraction of the field's max magnitude
    double presmooth_sigma = 0.0;  // Gaussian sigma (voxels) on the indicator, 0 = off
};

/// Per-voxel real vectors; data layout is [voxel * ncomp + component].
struct VectorField {
    GridShape shape;
    int ncomp = 0;
    std::vector<double> data;

    VectorField() = default;
    VectorField(const GridShape& s, int nc)
        : shape(s), ncomp(nc), data(s.voxel_count() * nc, 0.0) {}

    double* at(std::size_t voxel) { return data.data() + voxel * ncomp; }
    const double* at(std::size_t voxel) const { return data.data() + voxel * ncomp; }

    double magnitude(std::size_t voxel) const {
        double s = 0.0;
        for (int c = 0; c < ncomp; ++c) {
            double v = data[voxel * ncomp + c];
            s += v * v;
        }
        return std::sqrt(s);
    }
};

/// Per-voxel neighbor-pointing flow. `next[p]` is an index into the full
/// neighborhood's offset list, or kCore. Acyclic by construction (cycle repair
/// promotes offenders to core).
struct DiscreteFlow {
    static constexpr std::int16_t kCore = -1;

    GridShape shape;
    Neighborhood nbhd;  // full connectivity
    std::vector<std::int16_t> next;

    bool is_core(std::size_t p) const { return next[p] == kCore; }

    /// Linear index of the voxel `p` flows into. Core voxels have none.
    std::size_t target(std::size_t p) const {
        Coord c = shape.coord(p);
        const Coord& o = nbhd.offsets[next[p]];
        return shape.index({c[0] + o[0], c[1] + o[1], c[2] + o[2]});
    }
};

/// Central-difference gradient of the indicator of `label` (one-sided on the
/// domain boundary). Nonzero only in a narrow band around the boundary.
VectorField binary_gradient(const LabelVolume& preseg, int object_label,
                            double presmooth_sigma = 0.0);

/// Discrete flow-diffusion energy: sum of ||g||^2 ||h-g||^2 plus mu times the
/// squared forward differences of h.
double gvf_energy(const VectorField& h, const VectorField& grad, double mu);

/// Largest stable explicit-Euler step for the given input field and mu.
double gvf_stability_bound(const VectorField& grad, double mu);

struct GvfResult {
    VectorField field;
    int iterations = 0;
    std::vector<double> energy_trace;  // energy after each iteration (index 0 = initial)
};

GvfResult compute_gvf(const VectorField& grad, const GvfParams& params);

/// Voxels inside the pre-segmentation whose field magnitude is below
/// theta * max magnitude. Falls back to the argmin-magnitude set when empty.
LabelVolume extract_core(const VectorField& h, const LabelVolume& preseg, int object_label,
                         double theta);

/// Point each non-core voxel at the in-bounds full neighbor best aligned with
/// its field vector (ties break to the earlier offset), then repair cycles.
DiscreteFlow discretize(const VectorField& h, const LabelVolume& core);

/// Voxel chain q0..qN obtained by following the flow from p until the core;
/// empty for core voxels.
std::vector<std::size_t> trace_path(const DiscreteFlow& flow, std::size_t p);

}  // namespace gvfseg
