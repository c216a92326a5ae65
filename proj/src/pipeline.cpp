#include <mvst/pipeline.hpp>

#include <mvst/parallel.hpp>

#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

namespace mvst {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Runs fn(view_index, inner_threads) for every view. Views are spread over
// the worker pool when there are enough of them; otherwise each view gets
// the whole pool for its row-parallel work.
template <typename Fn> void for_each_view(std::size_t count, unsigned threads, Fn &&fn) {
  const unsigned workers = resolve_threads(threads);
  if (count >= workers && workers > 1) {
    parallel_for(count, workers, [&](std::size_t i) { fn(i, 1U); });
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      fn(i, workers);
    }
  }
}

WarpOptions warp_options(const PipelineConfig &config, unsigned threads) {
  return {config.depth_order, threads};
}

void prepare(const StereoInput &input, const PipelineConfig &config) {
  validate(input);
  validate(config);
}

} // namespace

void validate(const StereoInput &input) {
  if (input.left.empty() || input.right.empty()) {
    throw InvalidArgument("stereo input images must not be empty");
  }
  require_same_size(input.left, input.right, "stereo input");
  require_same_size(input.left, input.disp_left, "left disparity");
  require_same_size(input.right, input.disp_right, "right disparity");
  if (input.disp_left.direction() != Direction::LeftToRight) {
    throw InvalidArgument("left disparity map must be tagged LeftToRight");
  }
  if (input.disp_right.direction() != Direction::RightToLeft) {
    throw InvalidArgument("right disparity map must be tagged RightToLeft");
  }
}

void validate(const PipelineConfig &config) {
  if (config.viewpoints.empty()) {
    throw InvalidArgument("at least one output viewpoint is required");
  }
  for (std::size_t i = 0; i < config.viewpoints.size(); ++i) {
    if (!std::isfinite(config.viewpoints[i].position)) {
      throw InvalidArgument("viewpoint positions must be finite");
    }
    if (i > 0 && !(config.viewpoints[i - 1] < config.viewpoints[i])) {
      throw InvalidArgument("viewpoints must be strictly increasing");
    }
  }
  if (config.filter) {
    validate(*config.filter);
  }
  if (config.sharpen.radius < 1 || !std::isfinite(config.sharpen.amount)) {
    throw InvalidArgument("invalid sharpening parameters");
  }
  validate(config.stylizer);
}

Method parse_method(std::string_view name) {
  if (name == "ours") {
    return Method::Ours;
  }
  if (name == "baseline") {
    return Method::Baseline;
  }
  if (name == "approach2") {
    return Method::Approach2;
  }
  if (name == "approach3") {
    return Method::Approach3;
  }
  throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(Method method) noexcept {
  switch (method) {
  case Method::Ours:
    return "ours";
  case Method::Baseline:
    return "baseline";
  case Method::Approach2:
    return "approach2";
  case Method::Approach3:
    return "approach3";
  }
  return "ours";
}

PipelineResult run_ours(const StereoInput &input, const PipelineConfig &config) {
  const auto stylizer = make_stylizer(config.stylizer);
  return run_ours(input, config, *stylizer);
}

PipelineResult run_ours(const StereoInput &input, const PipelineConfig &config,
                        const Stylizer &stylizer) {
  prepare(input, config);
  const auto start = Clock::now();
  const unsigned threads = resolve_threads(config.threads);
  PipelineResult result;
  auto &t = result.timings;

  auto stage = Clock::now();
  const Image stylized_left = stylizer.stylize(input.left);
  t.stylize_ms = elapsed_ms(stage);

  stage = Clock::now();
  const Image stylized_right =
      synthesize_one(stylized_left, input.disp_left, Viewpoint::left(), Viewpoint::right(),
                     make_inpainter(config.inpaint, threads), warp_options(config, threads));
  t.reproject_ms = elapsed_ms(stage);

  stage = Clock::now();
  Image filtered_left = stylized_left;
  Image filtered_right = stylized_right;
  if (config.filter) {
    filtered_left = guided_filter(stylized_left, input.left, *config.filter, threads);
    filtered_right = guided_filter(stylized_right, input.right, *config.filter, threads);
  }
  t.filter_ms = elapsed_ms(stage);

  const auto n = config.viewpoints.size();
  result.views.resize(n);
  t.synth_per_view_ms.assign(n, 0.0);
  for_each_view(n, threads, [&](std::size_t i, unsigned inner) {
    const auto view_start = Clock::now();
    result.views[i] = synthesize_blend(filtered_left, filtered_right, input.disp_left,
                                       input.disp_right, config.viewpoints[i],
                                       make_inpainter(config.inpaint, inner),
                                       warp_options(config, inner));
    t.synth_per_view_ms[i] = elapsed_ms(view_start);
  });
  t.total_ms = elapsed_ms(start);
  return result;
}

PipelineResult run_baseline(const StereoInput &input, const PipelineConfig &config) {
  const auto stylizer = make_stylizer(config.stylizer);
  return run_baseline(input, config, *stylizer);
}

PipelineResult run_baseline(const StereoInput &input, const PipelineConfig &config,
                            const Stylizer &stylizer) {
  prepare(input, config);
  const auto start = Clock::now();
  const unsigned threads = resolve_threads(config.threads);
  PipelineResult result;
  auto &t = result.timings;

  const auto n = config.viewpoints.size();
  std::vector<Image> natural(n);
  t.synth_per_view_ms.assign(n, 0.0);
  auto stage = Clock::now();
  for_each_view(n, threads, [&](std::size_t i, unsigned inner) {
    const auto view_start = Clock::now();
    natural[i] = synthesize_blend(input.left, input.right, input.disp_left, input.disp_right,
                                  config.viewpoints[i], make_inpainter(config.inpaint, inner),
                                  warp_options(config, inner));
    t.synth_per_view_ms[i] = elapsed_ms(view_start);
  });
  t.reproject_ms = elapsed_ms(stage);

  // One inference device: stylization runs one view at a time.
  stage = Clock::now();
  result.views.reserve(n);
  for (const auto &view : natural) {
    result.views.push_back(stylizer.stylize(view));
  }
  t.stylize_ms = elapsed_ms(stage);
  t.total_ms = elapsed_ms(start);
  return result;
}

PipelineResult run_approach2(const StereoInput &input, const PipelineConfig &config) {
  const auto stylizer = make_stylizer(config.stylizer);
  return run_approach2(input, config, *stylizer);
}

PipelineResult run_approach2(const StereoInput &input, const PipelineConfig &config,
                             const Stylizer &stylizer) {
  prepare(input, config);
  const auto start = Clock::now();
  const unsigned threads = resolve_threads(config.threads);
  PipelineResult result;
  auto &t = result.timings;

  auto stage = Clock::now();
  const Image stylized_left = stylizer.stylize(input.left);
  const Image stylized_right = stylizer.stylize(input.right);
  t.stylize_ms = elapsed_ms(stage);

  const auto n = config.viewpoints.size();
  result.views.resize(n);
  t.synth_per_view_ms.assign(n, 0.0);
  for_each_view(n, threads, [&](std::size_t i, unsigned inner) {
    const auto view_start = Clock::now();
    result.views[i] = synthesize_blend(stylized_left, stylized_right, input.disp_left,
                                       input.disp_right, config.viewpoints[i],
                                       make_inpainter(config.inpaint, inner),
                                       warp_options(config, inner));
    t.synth_per_view_ms[i] = elapsed_ms(view_start);
  });
  t.total_ms = elapsed_ms(start);
  return result;
}

PipelineResult run_approach3(const StereoInput &input, const PipelineConfig &config) {
  const auto stylizer = make_stylizer(config.stylizer);
  return run_approach3(input, config, *stylizer);
}

PipelineResult run_approach3(const StereoInput &input, const PipelineConfig &config,
                             const Stylizer &stylizer) {
  prepare(input, config);
  const auto start = Clock::now();
  const unsigned threads = resolve_threads(config.threads);
  PipelineResult result;
  auto &t = result.timings;

  auto stage = Clock::now();
  const Image stylized_left = stylizer.stylize(input.left);
  t.stylize_ms = elapsed_ms(stage);

  const auto n = config.viewpoints.size();
  result.views.resize(n);
  t.synth_per_view_ms.assign(n, 0.0);
  std::vector<double> filter_ms(n, 0.0);
  for_each_view(n, threads, [&](std::size_t i, unsigned inner) {
    const auto view_start = Clock::now();
    const auto inpainter = make_inpainter(config.inpaint, inner);
    const auto options = warp_options(config, inner);
    const auto &x = config.viewpoints[i];
    Image stylized = synthesize_one(stylized_left, input.disp_left, Viewpoint::left(), x,
                                    inpainter, options);
    const Image guide = synthesize_blend(input.left, input.right, input.disp_left,
                                         input.disp_right, x, inpainter, options);
    t.synth_per_view_ms[i] = elapsed_ms(view_start);

    const auto filter_start = Clock::now();
    if (config.filter) {
      stylized = guided_filter(stylized, guide, *config.filter, inner);
    }
    result.views[i] = unsharp_mask(stylized, config.sharpen, inner);
    filter_ms[i] = elapsed_ms(filter_start);
  });
  t.reproject_ms = std::accumulate(t.synth_per_view_ms.begin(), t.synth_per_view_ms.end(), 0.0);
  t.filter_ms = std::accumulate(filter_ms.begin(), filter_ms.end(), 0.0);
  t.total_ms = elapsed_ms(start);
  return result;
}

PipelineResult run_method(Method method, const StereoInput &input, const PipelineConfig &config) {
  const auto stylizer = make_stylizer(config.stylizer);
  return run_method(method, input, config, *stylizer);
}

PipelineResult run_method(Method method, const StereoInput &input, const PipelineConfig &config,
                          const Stylizer &stylizer) {
  switch (method) {
  case Method::Ours:
    return run_ours(input, config, stylizer);
  case Method::Baseline:
    return run_baseline(input, config, stylizer);
  case Method::Approach2:
    return run_approach2(input, config, stylizer);
  case Method::Approach3:
    return run_approach3(input, config, stylizer);
  }
  throw InvalidArgument("unknown method");
}

} // namespace mvst
