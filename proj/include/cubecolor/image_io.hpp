#pragma once

#include <string>

#include "cubecolor/color_features.hpp"

namespace cubecolor {

/// Decodes PNG or binary PPM (P6, maxval 255), chosen by file signature.
/// Throws MissingImage if the file cannot be opened, IoError if it does not decode.
RgbImage read_image(const std::string& path);

void write_ppm(const RgbImage& image, const std::string& path);
void write_png(const RgbImage& image, const std::string& path);

}  // namespace cubecolor
