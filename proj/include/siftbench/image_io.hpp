#pragma once

#include <array>
#include <filesystem>

#include "siftbench/image.hpp"

namespace siftbench {

/// Reads a PNG or baseline JPEG (detected by magic bytes) as grayscale
/// luminance; RGB inputs are converted with Rec.601 weights.
Image read_image(const std::filesystem::path& path);

/// Reads an RGB PNG/JPEG as three channel grids (grayscale inputs are
/// replicated across channels).
std::array<Image, 3> read_image_rgb(const std::filesystem::path& path);

/// 8-bit grayscale PNG.
void write_png(const Image& img, const std::filesystem::path& path);

/// 8-bit RGB PNG from three channel grids sharing dimensions.
void write_png_rgb(const Image& r, const Image& g, const Image& b,
                   const std::filesystem::path& path);

/// 8-bit grayscale baseline JPEG; quality in 1..100.
void write_jpeg(const Image& img, const std::filesystem::path& path, int quality);

/// Encodes to an in-memory baseline JPEG at the given quality factor and
/// decodes back; the lossy round trip used by the Compression deformation.
Image jpeg_roundtrip(const Image& img, int quality);

/// Writes PNG or JPEG depending on the file extension (.png/.jpg/.jpeg).
void write_image(const Image& img, const std::filesystem::path& path,
                 int jpeg_quality = 95);

}  // namespace siftbench
