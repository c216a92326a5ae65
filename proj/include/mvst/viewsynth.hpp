#pragma once

#include <mvst/image.hpp>
#include <mvst/inpaint.hpp>

#include <string_view>
#include <vector>

namespace mvst {

// Which of two colliding source pixels stays visible. SmallerWins keeps the
// pixel with the smaller (signed) warp disparity; LargerWins is the reverse.
// Equal disparities always resolve to the larger source column.
enum class DepthOrder { SmallerWins, LargerWins };

DepthOrder parse_depth_order(std::string_view name);
std::string_view to_string(DepthOrder order) noexcept;

struct WarpOptions {
  DepthOrder depth_order = DepthOrder::SmallerWins;
  unsigned threads = 1;
};

// Result of a forward warp. `depth` holds the winning disparity per target
// pixel and +inf where nothing landed.
struct WarpBuffer {
  MaskedImage color;
  std::vector<float> depth;
};

/// Rescales a stored stereo disparity to the shift between two viewpoints:
/// factor (to - from) for LeftToRight maps, (from - to) for RightToLeft maps.
DisparityMap scale_disparity(const DisparityMap &d, Viewpoint from, Viewpoint to);

/// Splats every source pixel to column round(x + d(x, y)) on the same row.
/// Targets outside the frame are dropped; collisions go through the depth
/// test selected in `options`.
WarpBuffer forward_warp(const Image &src, const DisparityMap &d, const WarpOptions &options = {});

/// Blend weight of the right view at viewpoint b: 0 left of the baseline,
/// 1 right of it, b in between.
double blend_alpha(Viewpoint b) noexcept;

/// Per-pixel combination of two warps: both valid -> (1 - alpha) * left +
/// alpha * right, one valid -> that one, none -> invalid.
MaskedImage blend_warps(const WarpBuffer &left, const WarpBuffer &right, double alpha,
                        unsigned threads = 1);

/// Re-projects `src` from `from` to `to` and in-paints the deoccluded pixels.
Image synthesize_one(const Image &src, const DisparityMap &d, Viewpoint from, Viewpoint to,
                     const Inpainter &inpainter, const WarpOptions &options = {});

/// Warps the left view (from 0.0) and right view (from 1.0) to `to`, blends
/// them by proximity and in-paints what neither view sees.
Image synthesize_blend(const Image &left, const Image &right, const DisparityMap &d_left,
                       const DisparityMap &d_right, Viewpoint to, const Inpainter &inpainter,
                       const WarpOptions &options = {});

} // namespace mvst
