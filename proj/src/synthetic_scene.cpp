#include <mvst/synthetic_scene.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace mvst {
namespace {

// Uniform double in [0,1) from the raw generator output, so scenes are
// identical across standard library implementations.
double unit(std::mt19937 &rng) { return static_cast<double>(rng()) / 4294967296.0; }

struct Texture {
  std::array<double, 3> base{};
  std::array<double, 3> slope_x{};
  std::array<double, 3> slope_y{};
  double stripe_freq = 0.0;
  double stripe_amp = 0.0;
  double stripe_phase = 0.0;

  [[nodiscard]] Rgb at(double u, double v) const {
    const double stripe = stripe_amp * std::sin(2.0 * std::numbers::pi * stripe_freq * (u + 0.5 * v) +
                                                stripe_phase);
    const auto ch = [&](std::size_t c) {
      const double value = base[c] + slope_x[c] * u + slope_y[c] * v + stripe;
      return static_cast<float>(std::clamp(value, 0.0, 1.0));
    };
    return {ch(0), ch(1), ch(2)};
  }
};

struct Layer {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0; // exclusive
  int y1 = 0; // exclusive
  int depth = 0; // disparity magnitude in pixels; larger is nearer
  Texture texture;

  [[nodiscard]] bool covers(int x, int y) const noexcept {
    return x >= x0 && x < x1 && y >= y0 && y < y1;
  }
};

Texture random_texture(std::mt19937 &rng) {
  Texture t;
  for (std::size_t c = 0; c < 3; ++c) {
    t.base[c] = 0.1 + 0.5 * unit(rng);
    t.slope_x[c] = 0.5 * (unit(rng) - 0.2);
    t.slope_y[c] = 0.4 * (unit(rng) - 0.5);
  }
  t.stripe_freq = 2.0 + 4.0 * unit(rng);
  t.stripe_amp = 0.05 + 0.1 * unit(rng);
  t.stripe_phase = 2.0 * std::numbers::pi * unit(rng);
  return t;
}

} // namespace

StereoInput make_synthetic_scene(int width, int height, int variant) {
  if (width < 8 || height < 8) {
    throw InvalidArgument("synthetic scenes need at least 8x8 pixels");
  }
  std::mt19937 rng(0x5eed0000U + static_cast<unsigned>(variant));
  const int step = std::max(2, static_cast<int>(std::lround(width / 24.0)));

  std::vector<Layer> layers;
  layers.push_back({0, 0, width, height, 0, random_texture(rng)});
  const int extra = 1 + std::clamp(variant, 0, 2);
  for (int i = 0; i < extra; ++i) {
    const double cx = 0.25 + 0.5 * unit(rng);
    const double cy = 0.3 + 0.4 * unit(rng);
    const double hw = 0.12 + 0.1 * unit(rng);
    const double hh = 0.15 + 0.15 * unit(rng);
    Layer layer;
    layer.x0 = std::clamp(static_cast<int>((cx - hw) * width), step, width - 2 * step);
    layer.x1 = std::clamp(static_cast<int>((cx + hw) * width), layer.x0 + 2, width - step);
    layer.y0 = std::clamp(static_cast<int>((cy - hh) * height), 0, height - 2);
    layer.y1 = std::clamp(static_cast<int>((cy + hh) * height), layer.y0 + 2, height);
    layer.depth = step * (i + 1);
    layer.texture = random_texture(rng);
    layers.push_back(layer);
  }

  const auto nearest = [&](int x, int y) -> const Layer * {
    const Layer *best = nullptr;
    for (const auto &layer : layers) {
      if (layer.covers(x, y) && (best == nullptr || layer.depth > best->depth)) {
        best = &layer;
      }
    }
    return best;
  };

  StereoInput scene{Image(width, height), Image(width, height),
                    DisparityMap(width, height, Direction::LeftToRight),
                    DisparityMap(width, height, Direction::RightToLeft)};
  const double sx = 1.0 / width;
  const double sy = 1.0 / height;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Layer *l = nearest(x, y);
      scene.left(x, y) = l->texture.at(x * sx, y * sy);
      scene.disp_left(x, y) = static_cast<float>(-l->depth);

      // Right view pixel x sees layer L at left coordinate x + depth(L).
      const Layer *r = nullptr;
      for (const auto &layer : layers) {
        if (layer.covers(x + layer.depth, y) && (r == nullptr || layer.depth > r->depth)) {
          r = &layer;
        }
      }
      const int u = x + r->depth;
      scene.right(x, y) = r->texture.at(u * sx, y * sy);
      scene.disp_right(x, y) = static_cast<float>(r->depth);
    }
  }
  return scene;
}

} // namespace mvst
