#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvst {

// Error hierarchy shared by every module. Callers that only care about
// success/failure catch mvst::Error.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
  using Error::Error;
};

class FormatError : public Error {
public:
  using Error::Error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

struct Rgb {
  float r = 0.F;
  float g = 0.F;
  float b = 0.F;

  friend bool operator==(const Rgb &, const Rgb &) = default;
};

// Row-major interleaved RGB raster with channels in [0,1].
class Image {
public:
  Image() = default;
  Image(int width, int height, Rgb fill = {});
  Image(int width, int height, std::vector<Rgb> pixels);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] std::size_t size() const noexcept { return pixels_.size(); }
  [[nodiscard]] bool empty() const noexcept { return pixels_.empty(); }

  [[nodiscard]] Rgb &operator()(int x, int y) noexcept { return pixels_[index(x, y)]; }
  [[nodiscard]] const Rgb &operator()(int x, int y) const noexcept {
    return pixels_[index(x, y)];
  }

  [[nodiscard]] std::span<Rgb> pixels() noexcept { return pixels_; }
  [[nodiscard]] std::span<const Rgb> pixels() const noexcept { return pixels_; }
  [[nodiscard]] std::span<Rgb> row(int y) noexcept {
    return std::span<Rgb>(pixels_).subspan(index(0, y), static_cast<std::size_t>(width_));
  }
  [[nodiscard]] std::span<const Rgb> row(int y) const noexcept {
    return std::span<const Rgb>(pixels_).subspan(index(0, y), static_cast<std::size_t>(width_));
  }

  // Clamps every channel into [0,1]; non-finite channels become 0.
  void clamp() noexcept;
  // True when every channel is finite and within [0,1].
  [[nodiscard]] bool is_normalized() const noexcept;

  friend bool operator==(const Image &, const Image &) = default;

private:
  [[nodiscard]] std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Rgb> pixels_;
};

enum class Direction { LeftToRight, RightToLeft };

// Signed horizontal shift (pixels at the stored resolution) that carries a
// pixel from the view it annotates to the opposite stereo view.
class DisparityMap {
public:
  DisparityMap() = default;
  DisparityMap(int width, int height, Direction direction, float fill = 0.F);
  DisparityMap(int width, int height, Direction direction, std::vector<float> values);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] Direction direction() const noexcept { return direction_; }

  [[nodiscard]] float &operator()(int x, int y) noexcept { return values_[index(x, y)]; }
  [[nodiscard]] float operator()(int x, int y) const noexcept { return values_[index(x, y)]; }

  [[nodiscard]] std::span<float> values() noexcept { return values_; }
  [[nodiscard]] std::span<const float> values() const noexcept { return values_; }
  [[nodiscard]] std::span<const float> row(int y) const noexcept {
    return std::span<const float>(values_).subspan(index(0, y), static_cast<std::size_t>(width_));
  }

  friend bool operator==(const DisparityMap &, const DisparityMap &) = default;

private:
  [[nodiscard]] std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  Direction direction_ = Direction::LeftToRight;
  std::vector<float> values_;
};

// Position on the normalized stereo baseline: left input 0.0, right input 1.0.
struct Viewpoint {
  double position = 0.0;

  static constexpr Viewpoint left() noexcept { return {0.0}; }
  static constexpr Viewpoint right() noexcept { return {1.0}; }

  friend auto operator<=>(const Viewpoint &, const Viewpoint &) = default;
};

// Image plus a per-pixel flag telling whether the pixel received data.
struct MaskedImage {
  Image image;
  std::vector<std::uint8_t> valid;

  MaskedImage() = default;
  MaskedImage(Image img, std::vector<std::uint8_t> mask);
  // All pixels valid.
  explicit MaskedImage(Image img);

  [[nodiscard]] int width() const noexcept { return image.width(); }
  [[nodiscard]] int height() const noexcept { return image.height(); }
  [[nodiscard]] bool is_valid(int x, int y) const noexcept {
    return valid[static_cast<std::size_t>(y) * static_cast<std::size_t>(image.width()) +
                 static_cast<std::size_t>(x)] != 0;
  }
  [[nodiscard]] std::size_t valid_count() const noexcept;
};

// Evenly spaced positions on [0,1] inclusive; n == 1 gives {0.0}.
std::vector<Viewpoint> evenly_spaced_viewpoints(int n);

void require_same_size(const Image &a, const Image &b, const char *what);
void require_same_size(const Image &a, const DisparityMap &d, const char *what);

} // namespace mvst
