#pragma once

#include "gvfseg/volume.hpp"

namespace gvfseg {

/// Dice similarity coefficient 2|A∩B| / (|A|+|B|) for the voxels carrying
/// `label`. Errors when both objects are empty.
double dsc(const LabelVolume& a, const LabelVolume& b, int label);

/// Average symmetric surface distance in mm, spacing-aware, via exact
/// Euclidean distance transforms of the two boundary voxel sets.
double assd(const LabelVolume& a, const LabelVolume& b, int label);

/// Object voxels with a face-adjacent non-object voxel; voxels on the volume
/// border count as boundary.
LabelVolume boundary_mask(const LabelVolume& vol, int label);

struct MetricReport {
    struct Entry {
        int label;
        double dsc;
        double assd_mm;
    };
    std::vector<Entry> per_label;
};

/// Per-label DSC/ASSD over every nonzero label present in either volume.
MetricReport metric_report(const LabelVolume& a, const LabelVolume& b);

}  // namespace gvfseg
