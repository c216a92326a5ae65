#include <mvst/guided_filter.hpp>

#include <mvst/parallel.hpp>

#include <algorithm>
#include <cmath>

namespace mvst {
namespace {

float to_channel(double v) noexcept { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

Plane multiply(const Plane &a, const Plane &b) {
  Plane out(a.width, a.height);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = a.values[i] * b.values[i];
  }
  return out;
}

float &channel_ref(Rgb &p, Channel c) noexcept {
  switch (c) {
  case Channel::R:
    return p.r;
  case Channel::G:
    return p.g;
  default:
    return p.b;
  }
}

constexpr std::array<Channel, 3> kChannels{Channel::R, Channel::G, Channel::B};

} // namespace

Plane::Plane(int w, int h, double fill)
    : width(w), height(h),
      values(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

void validate(const FilterParams &params) {
  if (params.radius < 1) {
    throw InvalidArgument("guided filter radius must be at least 1");
  }
  if (!(params.epsilon > 0.0) || !std::isfinite(params.epsilon)) {
    throw InvalidArgument("guided filter epsilon must be positive");
  }
}

FilterParams default_filter_params(int width, int height) {
  const auto scaled = static_cast<int>(std::lround(static_cast<double>(std::min(width, height)) / 64.0));
  return {std::max(4, scaled), 1e-3};
}

Plane extract_channel(const Image &img, Channel c) {
  Plane out(img.width(), img.height());
  const auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    auto p = px[i];
    out.values[i] = channel_ref(p, c);
  }
  return out;
}

Plane luminance(const Image &img) {
  Plane out(img.width(), img.height());
  const auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    out.values[i] = 0.299 * px[i].r + 0.587 * px[i].g + 0.114 * px[i].b;
  }
  return out;
}

Plane box_mean(const Plane &img, int radius, unsigned threads) {
  if (radius < 1) {
    throw InvalidArgument("box radius must be at least 1");
  }
  const int w = img.width;
  const int h = img.height;
  const auto stride = static_cast<std::size_t>(w) + 1;

  // sat(x, y) = sum of img over [0, x) x [0, y)
  std::vector<double> sat(stride * (static_cast<std::size_t>(h) + 1), 0.0);
  for (int y = 0; y < h; ++y) {
    double row_sum = 0.0;
    for (int x = 0; x < w; ++x) {
      row_sum += img(x, y);
      sat[(static_cast<std::size_t>(y) + 1) * stride + static_cast<std::size_t>(x) + 1] =
          sat[static_cast<std::size_t>(y) * stride + static_cast<std::size_t>(x) + 1] + row_sum;
    }
  }
  const auto at = [&](int x, int y) {
    return sat[static_cast<std::size_t>(y) * stride + static_cast<std::size_t>(x)];
  };

  Plane out(w, h);
  parallel_for(static_cast<std::size_t>(h), threads, [&](std::size_t row) {
    const int y = static_cast<int>(row);
    const int y0 = std::max(0, y - radius);
    const int y1 = std::min(h, y + radius + 1);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - radius);
      const int x1 = std::min(w, x + radius + 1);
      const double sum = at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0);
      out(x, y) = sum / static_cast<double>((x1 - x0) * (y1 - y0));
    }
  });
  return out;
}

GuidedCoefficients guided_filter_coefficients(const Image &input, const Image &guide,
                                              const FilterParams &params, unsigned threads) {
  validate(params);
  require_same_size(input, guide, "guided_filter");

  GuidedCoefficients out;
  out.guide = luminance(guide);
  const auto &I = out.guide;
  const auto mean_I = box_mean(I, params.radius, threads);
  const auto mean_II = box_mean(multiply(I, I), params.radius, threads);

  for (std::size_t c = 0; c < kChannels.size(); ++c) {
    const auto p = extract_channel(input, kChannels[c]);
    const auto mean_p = box_mean(p, params.radius, threads);
    const auto mean_Ip = box_mean(multiply(I, p), params.radius, threads);

    Plane a(I.width, I.height);
    Plane b(I.width, I.height);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      const double var_I = mean_II.values[i] - mean_I.values[i] * mean_I.values[i];
      const double cov_Ip = mean_Ip.values[i] - mean_I.values[i] * mean_p.values[i];
      a.values[i] = cov_Ip / (var_I + params.epsilon);
      b.values[i] = mean_p.values[i] - a.values[i] * mean_I.values[i];
    }
    out.mean_a[c] = box_mean(a, params.radius, threads);
    out.mean_b[c] = box_mean(b, params.radius, threads);
  }
  return out;
}

Image guided_filter(const Image &input, const Image &guide, const FilterParams &params,
                    unsigned threads) {
  const auto coeffs = guided_filter_coefficients(input, guide, params, threads);
  Image out(input.width(), input.height());
  auto px = out.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double I = coeffs.guide.values[i];
    for (std::size_t c = 0; c < kChannels.size(); ++c) {
      channel_ref(px[i], kChannels[c]) =
          to_channel(coeffs.mean_a[c].values[i] * I + coeffs.mean_b[c].values[i]);
    }
  }
  return out;
}

Image unsharp_mask(const Image &input, const UnsharpParams &params, unsigned threads) {
  Image out(input.width(), input.height());
  auto px = out.pixels();
  const auto src = input.pixels();
  for (const auto c : kChannels) {
    const auto p = extract_channel(input, c);
    const auto blurred = box_mean(p, params.radius, threads);
    for (std::size_t i = 0; i < px.size(); ++i) {
      auto s = src[i];
      const double v = channel_ref(s, c);
      channel_ref(px[i], c) = to_channel(v + params.amount * (v - blurred.values[i]));
    }
  }
  return out;
}

} // namespace mvst
