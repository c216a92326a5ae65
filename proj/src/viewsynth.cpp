#include <mvst/viewsynth.hpp>

#include <mvst/parallel.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace mvst {
namespace {

constexpr float kNoDepth = std::numeric_limits<float>::infinity();

// True when a candidate (disparity, column) beats the current winner.
bool wins(DepthOrder order, float disparity, int column, float best_disparity, int best_column) {
  if (disparity == best_disparity) {
    return column > best_column;
  }
  return order == DepthOrder::SmallerWins ? disparity < best_disparity
                                          : disparity > best_disparity;
}

void require_direction(const DisparityMap &d, Direction expected, const char *what) {
  if (d.direction() != expected) {
    throw InvalidArgument(std::string(what) + " has the wrong direction tag");
  }
}

} // namespace

DepthOrder parse_depth_order(std::string_view name) {
  if (name == "smaller") {
    return DepthOrder::SmallerWins;
  }
  if (name == "larger") {
    return DepthOrder::LargerWins;
  }
  throw InvalidArgument("unknown depth test order '" + std::string(name) + "'");
}

std::string_view to_string(DepthOrder order) noexcept {
  return order == DepthOrder::SmallerWins ? "smaller" : "larger";
}

DisparityMap scale_disparity(const DisparityMap &d, Viewpoint from, Viewpoint to) {
  const double t = d.direction() == Direction::LeftToRight ? to.position - from.position
                                                           : from.position - to.position;
  DisparityMap out = d;
  if (t == 1.0) {
    return out;
  }
  for (auto &v : out.values()) {
    v = static_cast<float>(t * static_cast<double>(v));
  }
  return out;
}

WarpBuffer forward_warp(const Image &src, const DisparityMap &d, const WarpOptions &options) {
  require_same_size(src, d, "forward_warp");
  const int width = src.width();
  const int height = src.height();

  WarpBuffer out{MaskedImage(Image(width, height), std::vector<std::uint8_t>(src.size(), 0)),
                 std::vector<float>(src.size(), kNoDepth)};

  // Rows never interact, so each row is resolved independently.
  parallel_for(static_cast<std::size_t>(height), options.threads, [&](std::size_t row) {
    const int y = static_cast<int>(row);
    const auto disparities = d.row(y);
    const auto colors = src.row(y);
    auto target_colors = out.color.image.row(y);
    const auto offset = static_cast<std::size_t>(y) * static_cast<std::size_t>(width);
    std::vector<int> winner(static_cast<std::size_t>(width), -1);

    for (int x = 0; x < width; ++x) {
      const float disparity = disparities[static_cast<std::size_t>(x)];
      const double landing = std::round(static_cast<double>(x) + static_cast<double>(disparity));
      if (!(landing >= 0.0 && landing < static_cast<double>(width))) {
        continue;
      }
      const auto tx = static_cast<std::size_t>(landing);
      const int current = winner[tx];
      if (current < 0 || wins(options.depth_order, disparity, x, out.depth[offset + tx], current)) {
        winner[tx] = x;
        out.depth[offset + tx] = disparity;
        target_colors[tx] = colors[static_cast<std::size_t>(x)];
        out.color.valid[offset + tx] = 1;
      }
    }
  });
  return out;
}

double blend_alpha(Viewpoint b) noexcept {
  constexpr double l = 0.0;
  constexpr double r = 1.0;
  if (b.position < l) {
    return 0.0;
  }
  if (b.position > r) {
    return 1.0;
  }
  return (b.position - l) / (r - l);
}

MaskedImage blend_warps(const WarpBuffer &left, const WarpBuffer &right, double alpha,
                        unsigned threads) {
  require_same_size(left.color.image, right.color.image, "blend_warps");
  const int width = left.color.width();
  const int height = left.color.height();
  MaskedImage out(Image(width, height), std::vector<std::uint8_t>(left.color.image.size(), 0));
  const double beta = 1.0 - alpha;

  parallel_for(static_cast<std::size_t>(height), threads, [&](std::size_t row) {
    const int y = static_cast<int>(row);
    const auto l = left.color.image.row(y);
    const auto r = right.color.image.row(y);
    auto o = out.image.row(y);
    const auto offset = row * static_cast<std::size_t>(width);
    for (std::size_t x = 0; x < static_cast<std::size_t>(width); ++x) {
      const bool lv = left.color.valid[offset + x] != 0;
      const bool rv = right.color.valid[offset + x] != 0;
      if (lv && rv) {
        const auto mix = [&](float a, float b) {
          return static_cast<float>(beta * static_cast<double>(a) + alpha * static_cast<double>(b));
        };
        o[x] = {mix(l[x].r, r[x].r), mix(l[x].g, r[x].g), mix(l[x].b, r[x].b)};
      } else if (lv) {
        o[x] = l[x];
      } else if (rv) {
        o[x] = r[x];
      } else {
        continue;
      }
      out.valid[offset + x] = 1;
    }
  });
  out.image.clamp();
  return out;
}

Image synthesize_one(const Image &src, const DisparityMap &d, Viewpoint from, Viewpoint to,
                     const Inpainter &inpainter, const WarpOptions &options) {
  require_same_size(src, d, "synthesize_one");
  auto warped = forward_warp(src, scale_disparity(d, from, to), options);
  if (warped.color.valid_count() == warped.color.valid.size()) {
    return std::move(warped.color.image);
  }
  auto filled = inpainter(warped.color);
  filled.clamp();
  return filled;
}

Image synthesize_blend(const Image &left, const Image &right, const DisparityMap &d_left,
                       const DisparityMap &d_right, Viewpoint to, const Inpainter &inpainter,
                       const WarpOptions &options) {
  require_same_size(left, right, "synthesize_blend");
  require_same_size(left, d_left, "synthesize_blend (left disparity)");
  require_same_size(right, d_right, "synthesize_blend (right disparity)");
  require_direction(d_left, Direction::LeftToRight, "left disparity map");
  require_direction(d_right, Direction::RightToLeft, "right disparity map");

  const auto from_left = forward_warp(left, scale_disparity(d_left, Viewpoint::left(), to), options);
  const auto from_right =
      forward_warp(right, scale_disparity(d_right, Viewpoint::right(), to), options);
  auto blended = blend_warps(from_left, from_right, blend_alpha(to), options.threads);
  if (blended.valid_count() == blended.valid.size()) {
    return std::move(blended.image);
  }
  auto filled = inpainter(blended);
  filled.clamp();
  return filled;
}

} // namespace mvst
