#pragma once

#include <mvst/image.hpp>

#include <array>
#include <vector>

namespace mvst {

// Single-channel double-precision raster used by the filters.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  Plane() = default;
  Plane(int w, int h, double fill = 0.0);

  [[nodiscard]] double &operator()(int x, int y) noexcept {
    return values[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
  [[nodiscard]] double operator()(int x, int y) const noexcept {
    return values[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
};

struct FilterParams {
  int radius = 4;
  double epsilon = 1e-3;
};

// Throws InvalidArgument unless radius >= 1 and epsilon > 0.
void validate(const FilterParams &params);

// radius = max(4, round(min(W, H) / 64)), epsilon = 1e-3.
FilterParams default_filter_params(int width, int height);

enum class Channel { R, G, B };

Plane extract_channel(const Image &img, Channel c);
// 0.299 R + 0.587 G + 0.114 B
Plane luminance(const Image &img);

/// Mean over the (2r+1)^2 window clipped to the frame, divided by the number
/// of pixels actually inside the window. Uses a summed-area table.
Plane box_mean(const Plane &img, int radius, unsigned threads = 1);

// Window-averaged linear coefficients of the guided filter for each colour
// channel, plus the guide luminance they apply to.
struct GuidedCoefficients {
  Plane guide;
  std::array<Plane, 3> mean_a;
  std::array<Plane, 3> mean_b;
};

GuidedCoefficients guided_filter_coefficients(const Image &input, const Image &guide,
                                              const FilterParams &params, unsigned threads = 1);

/// Edge-aware smoothing of `input` steered by the luminance of `guide`:
/// output = mean(a) * I + mean(b) per channel, clamped to [0,1].
Image guided_filter(const Image &input, const Image &guide, const FilterParams &params,
                    unsigned threads = 1);

struct UnsharpParams {
  double amount = 0.5;
  int radius = 1;
};

// out = clamp(in + amount * (in - box_mean(in, radius)))
Image unsharp_mask(const Image &input, const UnsharpParams &params = {}, unsigned threads = 1);

} // namespace mvst
