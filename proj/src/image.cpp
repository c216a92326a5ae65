#include <mvst/image.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace mvst {
namespace {
std::size_t checked_area(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw InvalidArgument("raster dimensions must be positive, got " + std::to_string(width) +
                          "x" + std::to_string(height));
  }
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

float clamp_channel(float c) noexcept {
  if (!std::isfinite(c)) {
    return 0.F;
  }
  return std::clamp(c, 0.F, 1.F);
}
} // namespace

Image::Image(int width, int height, Rgb fill)
    : width_(width), height_(height), pixels_(checked_area(width, height), fill) {}

Image::Image(int width, int height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (pixels_.size() != checked_area(width, height)) {
    throw InvalidArgument("pixel count does not match image dimensions");
  }
}

void Image::clamp() noexcept {
  for (auto &p : pixels_) {
    p.r = clamp_channel(p.r);
    p.g = clamp_channel(p.g);
    p.b = clamp_channel(p.b);
  }
}

bool Image::is_normalized() const noexcept {
  const auto ok = [](float c) { return std::isfinite(c) && c >= 0.F && c <= 1.F; };
  return std::all_of(pixels_.begin(), pixels_.end(),
                     [&](const Rgb &p) { return ok(p.r) && ok(p.g) && ok(p.b); });
}

DisparityMap::DisparityMap(int width, int height, Direction direction, float fill)
    : width_(width), height_(height), direction_(direction),
      values_(checked_area(width, height), fill) {
  if (!std::isfinite(fill)) {
    throw InvalidArgument("disparity fill value must be finite");
  }
}

DisparityMap::DisparityMap(int width, int height, Direction direction, std::vector<float> values)
    : width_(width), height_(height), direction_(direction), values_(std::move(values)) {
  if (values_.size() != checked_area(width, height)) {
    throw InvalidArgument("disparity value count does not match dimensions");
  }
  if (!std::all_of(values_.begin(), values_.end(), [](float v) { return std::isfinite(v); })) {
    throw InvalidArgument("disparity map contains non-finite values");
  }
}

MaskedImage::MaskedImage(Image img, std::vector<std::uint8_t> mask)
    : image(std::move(img)), valid(std::move(mask)) {
  if (valid.size() != image.size()) {
    throw InvalidArgument("validity mask size does not match image");
  }
}

MaskedImage::MaskedImage(Image img) : image(std::move(img)), valid(image.size(), 1) {}

std::size_t MaskedImage::valid_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(valid.begin(), valid.end(),
                                                [](std::uint8_t v) { return v != 0; }));
}

std::vector<Viewpoint> evenly_spaced_viewpoints(int n) {
  if (n < 1) {
    throw InvalidArgument("view count must be at least 1");
  }
  std::vector<Viewpoint> out;
  out.reserve(static_cast<std::size_t>(n));
  if (n == 1) {
    out.push_back(Viewpoint::left());
    return out;
  }
  for (int i = 0; i < n; ++i) {
    out.push_back({static_cast<double>(i) / static_cast<double>(n - 1)});
  }
  return out;
}

void require_same_size(const Image &a, const Image &b, const char *what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionMismatch(std::string(what) + ": image dimensions differ (" +
                            std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                            " vs " + std::to_string(b.width()) + "x" +
                            std::to_string(b.height()) + ")");
  }
}

void require_same_size(const Image &a, const DisparityMap &d, const char *what) {
  if (a.width() != d.width() || a.height() != d.height()) {
    throw DimensionMismatch(std::string(what) + ": disparity map is " +
                            std::to_string(d.width()) + "x" + std::to_string(d.height()) +
                            " but image is " + std::to_string(a.width()) + "x" +
                            std::to_string(a.height()));
  }
}

} // namespace mvst
