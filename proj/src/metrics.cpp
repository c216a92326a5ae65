#include <mvst/pipeline.hpp>

#include <cmath>
#include <string>

namespace mvst {

double consistency_error(const std::vector<Image> &views, const DisparityMap &d_left,
                         const std::vector<Viewpoint> &viewpoints, DepthOrder depth_order) {
  if (views.size() < 2) {
    throw InvalidArgument("consistency_error needs at least two views");
  }
  if (views.size() != viewpoints.size()) {
    throw InvalidArgument("consistency_error: " + std::to_string(views.size()) + " views but " +
                          std::to_string(viewpoints.size()) + " viewpoints");
  }
  if (d_left.direction() != Direction::LeftToRight) {
    throw InvalidArgument("consistency_error expects the left (LeftToRight) disparity map");
  }
  for (const auto &view : views) {
    require_same_size(view, d_left, "consistency_error");
  }

  double total = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i + 1 < views.size(); ++i) {
    const auto warped = forward_warp(
        views[i], scale_disparity(d_left, viewpoints[i], viewpoints[i + 1]), {depth_order, 1});
    const auto target = views[i + 1].pixels();
    const auto moved = warped.color.image.pixels();
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t p = 0; p < target.size(); ++p) {
      if (warped.color.valid[p] == 0) {
        continue;
      }
      sum += (std::abs(static_cast<double>(moved[p].r) - target[p].r) +
              std::abs(static_cast<double>(moved[p].g) - target[p].g) +
              std::abs(static_cast<double>(moved[p].b) - target[p].b)) /
             3.0;
      ++count;
    }
    if (count > 0) {
      total += sum / static_cast<double>(count);
      ++pairs;
    }
  }
  if (pairs == 0) {
    throw InvalidArgument("consistency_error: no co-visible pixels between adjacent views");
  }
  return total / pairs;
}

} // namespace mvst
