#pragma once

#include <mvst/image.hpp>

#include <filesystem>
#include <optional>

namespace mvst {

/// Reads an 8- or 16-bit PNG (gray, gray+alpha, RGB, RGBA or palette).
/// Channels are divided by the bit-depth maximum; alpha is discarded.
Image load_image(const std::filesystem::path &path);

/// Writes an 8-bit RGB PNG, each channel encoded as round(c * 255).
void save_image(const Image &image, const std::filesystem::path &path);

/// Linear decoding of integer PNG disparities: value = raw * scale + offset.
struct DisparityScale {
  double scale = 1.0;
  double offset = 0.0;
};

/// Loads a disparity map from a single-channel PFM ("Pf") or a 16-bit
/// grayscale PNG, told apart by the file signature. PNG input requires
/// `png_scale`. Non-finite values are rejected.
DisparityMap load_disparity(const std::filesystem::path &path, Direction direction,
                            std::optional<DisparityScale> png_scale = std::nullopt);

/// Writes a little-endian single-channel PFM with bottom-up rows.
void save_disparity(const DisparityMap &map, const std::filesystem::path &path);

} // namespace mvst
