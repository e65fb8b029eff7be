#pragma once

#include <string>

#include "gvfseg/volume.hpp"

namespace gvfseg {

enum class VolumeDtype { F32, U8 };

/// Either a scalar or a label volume, as read from disk.
struct AnyVolume {
    VolumeDtype dtype = VolumeDtype::F32;
    ScalarVolume scalar;  // valid when dtype == F32
    LabelVolume label;    // valid when dtype == U8

    ScalarVolume as_scalar() const;  // u8 converts to float
    LabelVolume as_label() const;    // f32 refuses
};

// SVOL: ASCII header ("svol 1", "dims:", "spacing:", "dtype:", "data:")
// followed by a raw little-endian payload. Round trips are bit-exact.
AnyVolume read_volume(const std::string& path);
void write_volume(const ScalarVolume& vol, const std::string& path);
void write_volume(const LabelVolume& vol, const std::string& path);

/// Binary PGM (P5) import for 2D demos; pixel values become u8 labels/intensities.
AnyVolume read_pgm(const std::string& path);

/// Dispatch on extension: .pgm goes through read_pgm, everything else is SVOL.
AnyVolume read_any(const std::string& path);

}  // namespace gvfseg
