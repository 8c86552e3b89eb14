#pragma once

#include <string>

#include "harmonidiff/image.hpp"

namespace harmonidiff {

// Reads PNG (8-bit gray or RGB) or binary PNM (P5/P6, maxval 255), dispatching
// on magic bytes. Samples map to [0,1] as v/255.
ImageGrid load_image(const std::string& path);

// Format chosen by extension: .png, .pgm (1 channel), .ppm (3 channels).
// Values clamp to [0,1] and quantize as round(v*255).
void save_image(const std::string& path, const ImageGrid& img);

// Grayscale threshold at 0.5 (>= 0.5 is inside).
RegionMask mask_from_image(const ImageGrid& img);
ImageGrid mask_to_image(const RegionMask& mask);

RegionMask load_mask(const std::string& path);
void save_mask(const std::string& path, const RegionMask& mask);

}  // namespace harmonidiff
