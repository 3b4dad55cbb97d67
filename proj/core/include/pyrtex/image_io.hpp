#pragma once

#include <string>

#include "pyrtex/image.hpp"

namespace pyrtex {

/// Load a PNG or PNM (PPM/PGM, ASCII or binary) image.
///
/// The format is detected from the file's magic bytes, not its extension.
/// Integer codes are mapped to [0,1] by dividing by the max code value
/// (255 for 8-bit, 65535 for 16-bit, the header maxval for PNM).
///
/// Errors: IoError if the file is missing or unreadable,
/// UnsupportedFormatError if it is neither PNG nor PNM,
/// CorruptFileError if the header or payload is broken.
Image load_image(const std::string& path);

/// Save as 8-bit PNG (.png), binary PPM (.ppm, 3-channel) or PGM (.pgm,
/// 1-channel), chosen by extension. Values are clamped to [0,1] and
/// quantized with rounding, so a save/load round trip moves each intensity
/// by at most half a code step.
void save_image(const Image& img, const std::string& path);

}  // namespace pyrtex
