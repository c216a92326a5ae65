#pragma once

#include <mvst/guided_filter.hpp>
#include <mvst/image.hpp>
#include <mvst/inpaint.hpp>
#include <mvst/stylizer.hpp>
#include <mvst/viewsynth.hpp>

#include <optional>
#include <string_view>
#include <vector>

namespace mvst {

// Rectified stereo pair with one disparity map per view.
struct StereoInput {
  Image left;
  Image right;
  DisparityMap disp_left;  // LeftToRight
  DisparityMap disp_right; // RightToLeft
};

// Throws DimensionMismatch / InvalidArgument on inconsistent inputs.
void validate(const StereoInput &input);

struct PipelineConfig {
  StylizerSpec stylizer;
  // Guided filter parameters; nullopt skips the filtering stage.
  std::optional<FilterParams> filter = FilterParams{};
  InpaintMethod inpaint = InpaintMethod::Reflect;
  DepthOrder depth_order = DepthOrder::SmallerWins;
  std::vector<Viewpoint> viewpoints = {Viewpoint::left()};
  // 0 = all hardware threads.
  unsigned threads = 1;
  // Sharpening applied after filtering by the third reference approach.
  UnsharpParams sharpen;
};

// Throws InvalidArgument unless viewpoints are non-empty, finite and
// strictly increasing and the filter/stylizer settings are valid.
void validate(const PipelineConfig &config);

// Wall-clock stage timings in milliseconds.
struct StageTimings {
  double stylize_ms = 0.0;
  double reproject_ms = 0.0;
  double filter_ms = 0.0;
  std::vector<double> synth_per_view_ms;
  double total_ms = 0.0;
};

struct PipelineResult {
  std::vector<Image> views;
  StageTimings timings;
};

enum class Method { Ours, Baseline, Approach2, Approach3 };

Method parse_method(std::string_view name);
std::string_view to_string(Method method) noexcept;

/// Stylize the left view once, re-project it to the right viewpoint,
/// guided-filter both against the originals, then blend-synthesize every
/// requested viewpoint from the filtered pair.
PipelineResult run_ours(const StereoInput &input, const PipelineConfig &config);
PipelineResult run_ours(const StereoInput &input, const PipelineConfig &config,
                        const Stylizer &stylizer);

/// Synthesize every naturalistic view, then stylize each one separately.
PipelineResult run_baseline(const StereoInput &input, const PipelineConfig &config);
PipelineResult run_baseline(const StereoInput &input, const PipelineConfig &config,
                            const Stylizer &stylizer);

/// Stylize both inputs separately, then blend-synthesize. No filtering.
PipelineResult run_approach2(const StereoInput &input, const PipelineConfig &config);
PipelineResult run_approach2(const StereoInput &input, const PipelineConfig &config,
                             const Stylizer &stylizer);

/// Stylize the left input only and re-project it to each viewpoint; filter
/// each view against the blend-synthesized naturalistic view, then sharpen.
PipelineResult run_approach3(const StereoInput &input, const PipelineConfig &config);
PipelineResult run_approach3(const StereoInput &input, const PipelineConfig &config,
                             const Stylizer &stylizer);

PipelineResult run_method(Method method, const StereoInput &input, const PipelineConfig &config);
PipelineResult run_method(Method method, const StereoInput &input, const PipelineConfig &config,
                          const Stylizer &stylizer);

/// Mean over adjacent view pairs of the mean absolute RGB difference between
/// view i+1 and view i forward-warped (no in-painting) to viewpoint i+1,
/// counted over pixels the warp covers. Lower is more consistent.
double consistency_error(const std::vector<Image> &views, const DisparityMap &d_left,
                         const std::vector<Viewpoint> &viewpoints,
                         DepthOrder depth_order = DepthOrder::SmallerWins);

} // namespace mvst
