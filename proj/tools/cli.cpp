#include "cli.hpp"

#include <mvst/bench.hpp>
#include <mvst/image_io.hpp>
#include <mvst/pipeline.hpp>
#include <mvst/synthetic_scene.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace mvst::cli {
namespace {

// Bad flag values detected after CLI11 parsing.
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, sep)) {
    parts.push_back(part);
  }
  return parts;
}

double parse_double(const std::string &s, const char *what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::logic_error &) {
    throw UsageError(std::string("invalid ") + what + " '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) {
    throw UsageError(std::string("invalid ") + what + " '" + s + "'");
  }
  return v;
}

int parse_int(const std::string &s, const char *what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::logic_error &) {
    throw UsageError(std::string("invalid ") + what + " '" + s + "'");
  }
  if (used != s.size()) {
    throw UsageError(std::string("invalid ") + what + " '" + s + "'");
  }
  return v;
}

// "<n>" expands to n evenly spaced positions on [0,1]; anything with a
// comma or decimal point is an explicit position list.
std::vector<Viewpoint> parse_views(const std::string &spec) {
  if (spec.find_first_of(",.") == std::string::npos) {
    const int n = parse_int(spec, "view count");
    if (n < 1) {
      throw UsageError("--views needs a positive count");
    }
    return evenly_spaced_viewpoints(n);
  }
  std::vector<Viewpoint> out;
  for (const auto &part : split(spec, ',')) {
    out.push_back({parse_double(part, "view position")});
  }
  return out;
}

unsigned parse_threads(const std::string &s) {
  if (s == "auto" || s == "max") {
    return 0;
  }
  const int n = parse_int(s, "thread count");
  if (n < 1) {
    throw UsageError("thread count must be positive or 'auto'");
  }
  return static_cast<unsigned>(n);
}

std::string view_name(std::size_t i) {
  char name[32];
  std::snprintf(name, sizeof(name), "view_%03zu.png", i);
  return name;
}

// Flags shared by every command that runs a pipeline.
struct PipelineFlags {
  std::string stylizer = "palette";
  int palette_size = 8;
  int kernel_radius = 2;
  std::string style_cmd;
  std::string style_guide;
  int simulated_cost_ms = 0;
  std::optional<int> gf_radius;
  double gf_eps = 1e-3;
  std::string inpaint = "reflect";
  std::string depth_order = "smaller";
  std::string threads;

  void attach(CLI::App &app) {
    app.add_option("--stylizer", stylizer, "identity|palette|painterly|external")
        ->capture_default_str();
    app.add_option("--palette-size", palette_size, "Palette stylizer colour count")
        ->capture_default_str();
    app.add_option("--kernel-radius", kernel_radius, "Painterly blur radius")
        ->capture_default_str();
    app.add_option("--style-cmd", style_cmd,
                   "External stylizer command with {in}, {out} and optional {style}");
    app.add_option("--style-guide", style_guide, "Style guide image passed as {style}");
    app.add_option("--simulated-cost-ms", simulated_cost_ms,
                   "Artificial stylizer latency per call")
        ->capture_default_str();
    app.add_option("--gf-radius", gf_radius,
                   "Guided filter radius (0 disables; default scales with image size)");
    app.add_option("--gf-eps", gf_eps, "Guided filter regularization")->capture_default_str();
    app.add_option("--inpaint", inpaint, "reflect|nearest")->capture_default_str();
    app.add_option("--depth-test-order", depth_order,
                   "Which colliding pixel stays visible: smaller|larger disparity")
        ->capture_default_str();
    app.add_option("--threads", threads, "Worker threads or 'auto' (env MVST_THREADS)");
  }

  [[nodiscard]] unsigned resolve_thread_flag() const {
    if (!threads.empty()) {
      return parse_threads(threads);
    }
    if (const char *env = std::getenv("MVST_THREADS"); env != nullptr && *env != '\0') {
      return parse_threads(env);
    }
    return 0;
  }

  [[nodiscard]] PipelineConfig config(int width, int height) const {
    PipelineConfig cfg;
    try {
      cfg.stylizer.kind = parse_stylizer_kind(stylizer);
      cfg.inpaint = parse_inpaint_method(inpaint);
      cfg.depth_order = parse_depth_order(depth_order);
    } catch (const InvalidArgument &e) {
      throw UsageError(e.what());
    }
    cfg.stylizer.palette_size = palette_size;
    cfg.stylizer.kernel_radius = kernel_radius;
    cfg.stylizer.command = style_cmd;
    if (!style_guide.empty()) {
      cfg.stylizer.style_guide = style_guide;
    }
    cfg.stylizer.simulated_cost_ms = simulated_cost_ms;
    try {
      validate(cfg.stylizer);
    } catch (const InvalidArgument &e) {
      throw UsageError(e.what());
    }

    if (gf_radius && *gf_radius == 0) {
      cfg.filter.reset();
    } else {
      FilterParams params = default_filter_params(width, height);
      if (gf_radius) {
        params.radius = *gf_radius;
      }
      params.epsilon = gf_eps;
      try {
        validate(params);
      } catch (const InvalidArgument &e) {
        throw UsageError(e.what());
      }
      cfg.filter = params;
    }
    cfg.threads = resolve_thread_flag();
    return cfg;
  }
};

struct DisparityFlags {
  std::optional<double> scale;
  double offset = 0.0;

  void attach(CLI::App &app) {
    app.add_option("--disp-scale", scale, "Scale for 16-bit PNG disparities");
    app.add_option("--disp-offset", offset, "Offset for 16-bit PNG disparities")
        ->capture_default_str();
  }

  [[nodiscard]] DisparityMap load(const std::string &path, Direction direction) const {
    std::optional<DisparityScale> png;
    if (scale) {
      png = DisparityScale{*scale, offset};
    }
    return load_disparity(path, direction, png);
  }
};

void print_timings(std::ostream &out, Method method, const StageTimings &t) {
  out << std::fixed << std::setprecision(2);
  out << "method     " << to_string(method) << '\n';
  out << "stylize    " << t.stylize_ms << " ms\n";
  out << "reproject  " << t.reproject_ms << " ms\n";
  out << "filter     " << t.filter_ms << " ms\n";
  for (std::size_t i = 0; i < t.synth_per_view_ms.size(); ++i) {
    out << "synth[" << i << "]   " << t.synth_per_view_ms[i] << " ms\n";
  }
  out << "total      " << t.total_ms << " ms\n";
  out.unsetf(std::ios::floatfield);
}

struct RenderCommand {
  std::string left, right, disp_left, disp_right, views, out_dir;
  std::string method = "ours";
  PipelineFlags pipeline;
  DisparityFlags disparity;

  void attach(CLI::App &app) {
    app.add_option("--left", left, "Left view PNG")->required();
    app.add_option("--right", right, "Right view PNG")->required();
    app.add_option("--disp-left", disp_left, "Left disparity (PFM or 16-bit PNG)")->required();
    app.add_option("--disp-right", disp_right, "Right disparity (PFM or 16-bit PNG)")->required();
    app.add_option("--views", views, "View count or comma-separated positions")->required();
    app.add_option("--out-dir", out_dir, "Output directory")->required();
    app.add_option("--method", method, "ours|baseline|approach2|approach3")
        ->capture_default_str();
    pipeline.attach(app);
    disparity.attach(app);
  }

  int run(std::ostream &out) const {
    Method m{};
    try {
      m = parse_method(method);
    } catch (const InvalidArgument &e) {
      throw UsageError(e.what());
    }
    const auto viewpoints = parse_views(views);

    StereoInput input{load_image(left), load_image(right),
                      disparity.load(disp_left, Direction::LeftToRight),
                      disparity.load(disp_right, Direction::RightToLeft)};
    auto cfg = pipeline.config(input.left.width(), input.left.height());
    cfg.viewpoints = viewpoints;
    const auto result = run_method(m, input, cfg);

    std::filesystem::create_directories(out_dir);
    for (std::size_t i = 0; i < result.views.size(); ++i) {
      save_image(result.views[i], std::filesystem::path(out_dir) / view_name(i));
    }
    print_timings(out, m, result.timings);
    return kExitOk;
  }
};

struct MetricsCommand {
  std::string in_dir, disp_left, views;
  std::string depth_order = "smaller";
  DisparityFlags disparity;

  void attach(CLI::App &app) {
    app.add_option("--in-dir", in_dir, "Directory holding view_000.png ...")->required();
    app.add_option("--disp-left", disp_left, "Left disparity (PFM or 16-bit PNG)")->required();
    app.add_option("--views", views, "View count or positions (default: files found)");
    app.add_option("--depth-test-order", depth_order, "smaller|larger")->capture_default_str();
    disparity.attach(app);
  }

  int run(std::ostream &out) const {
    DepthOrder order{};
    try {
      order = parse_depth_order(depth_order);
    } catch (const InvalidArgument &e) {
      throw UsageError(e.what());
    }
    std::vector<Image> images;
    for (std::size_t i = 0;; ++i) {
      const auto path = std::filesystem::path(in_dir) / view_name(i);
      if (!std::filesystem::exists(path)) {
        break;
      }
      images.push_back(load_image(path));
    }
    const auto viewpoints = views.empty() ? evenly_spaced_viewpoints(std::max<int>(1, static_cast<int>(images.size())))
                                          : parse_views(views);
    if (viewpoints.size() != images.size()) {
      throw InvalidArgument("found " + std::to_string(images.size()) + " views in '" + in_dir +
                            "' but " + std::to_string(viewpoints.size()) + " positions");
    }
    const auto d = disparity.load(disp_left, Direction::LeftToRight);
    out << std::setprecision(9) << consistency_error(images, d, viewpoints, order) << '\n';
    return kExitOk;
  }
};

struct BenchCommand {
  std::vector<std::string> scenes;
  std::vector<std::string> synthetic;
  std::string methods = "baseline,approach2,approach3,ours";
  std::string view_counts = "4,8,16";
  int repeats = 5;
  std::string out_path;
  PipelineFlags pipeline;

  void attach(CLI::App &app) {
    app.add_option("--scene", scenes,
                   "Scene directory with left.png, right.png, disp_left.pfm, disp_right.pfm");
    app.add_option("--synthetic", synthetic, "Generated scene size WxH (default 512x256)");
    app.add_option("--methods", methods, "Comma-separated methods")->capture_default_str();
    app.add_option("--view-counts", view_counts, "Comma-separated view counts")
        ->capture_default_str();
    app.add_option("--repeats", repeats, "Timed runs per cell (>= 3)")->capture_default_str();
    app.add_option("--out", out_path, "Write CSV here instead of stdout");
    pipeline.attach(app);
  }

  int run(std::ostream &out, std::ostream &err) const {
    BenchOptions options;
    options.methods.clear();
    for (const auto &m : split(methods, ',')) {
      try {
        options.methods.push_back(parse_method(m));
      } catch (const InvalidArgument &e) {
        throw UsageError(e.what());
      }
    }
    options.view_counts.clear();
    for (const auto &n : split(view_counts, ',')) {
      options.view_counts.push_back(parse_int(n, "view count"));
    }
    options.repeats = repeats;

    std::vector<StereoInput> inputs;
    for (const auto &dir : scenes) {
      inputs.push_back(load_scene(dir));
    }
    auto sizes = synthetic;
    if (inputs.empty() && sizes.empty()) {
      sizes.emplace_back("512x256");
    }
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const auto dims = split(sizes[i], 'x');
      if (dims.size() != 2) {
        throw UsageError("--synthetic expects WxH, got '" + sizes[i] + "'");
      }
      inputs.push_back(make_synthetic_scene(parse_int(dims[0], "width"),
                                            parse_int(dims[1], "height"), static_cast<int>(i)));
    }
    options.config = pipeline.config(inputs.front().left.width(), inputs.front().left.height());

    const auto report = run_bench(inputs, options);
    if (out_path.empty()) {
      report.write_csv(out);
      report.write_table(err);
    } else {
      std::ofstream file(out_path);
      if (!file) {
        throw IoError("cannot open '" + out_path + "' for writing");
      }
      report.write_csv(file);
      report.write_table(out);
    }
    return kExitOk;
  }
};

struct SelftestCommand {
  bool quick = false;
  bool inject_fault = false;
  std::string threads;

  void attach(CLI::App &app) {
    app.add_flag("--quick", quick, "Use a 32x32 scene");
    app.add_flag("--inject-fault", inject_fault, "Corrupt a checked invariant (exercises failure)")
        ->group("");
    app.add_option("--threads", threads, "Worker threads or 'auto'");
  }

  int run(std::ostream &out) const {
    const auto start = std::chrono::steady_clock::now();
    const int size = quick ? 32 : 128;
    const auto scene = make_synthetic_scene(size, size, 0);

    PipelineConfig cfg;
    cfg.stylizer.kind = StylizerKind::Palette;
    cfg.filter = default_filter_params(size, size);
    cfg.viewpoints = evenly_spaced_viewpoints(4);
    cfg.threads = threads.empty() ? 0 : parse_threads(threads);

    const auto palette = make_stylizer(cfg.stylizer);
    bool ok = true;
    const auto check = [&](bool cond, const std::string &what) {
      out << (cond ? "[PASS] " : "[FAIL] ") << what << '\n';
      ok = ok && cond;
    };

    const std::array<std::pair<Method, int>, 4> expected_calls{
        {{Method::Ours, 1}, {Method::Baseline, 4}, {Method::Approach2, 2}, {Method::Approach3, 1}}};
    std::array<double, 4> errors{};
    for (std::size_t i = 0; i < expected_calls.size(); ++i) {
      const auto [method, calls] = expected_calls[i];
      CountingStylizer counter(*palette);
      const auto result = run_method(method, scene, cfg, counter);
      const int observed = counter.calls() + (inject_fault && method == Method::Ours ? 1 : 0);
      check(observed == calls, std::string(to_string(method)) + " stylize calls = " +
                                   std::to_string(observed) + " (expected " +
                                   std::to_string(calls) + ")");
      bool normalized = result.views.size() == cfg.viewpoints.size();
      for (const auto &v : result.views) {
        normalized = normalized && v.is_normalized();
      }
      check(normalized, std::string(to_string(method)) + " produced " +
                            std::to_string(result.views.size()) + " normalized views");
      errors[i] = consistency_error(result.views, scene.disp_left, cfg.viewpoints);
      out << "       consistency_error(" << to_string(method) << ") = " << std::setprecision(6)
          << errors[i] << '\n';
    }
    check(errors[0] < errors[1], "consistency: ours < baseline");
    check(errors[0] < errors[2], "consistency: ours < approach2");

    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << (ok ? "selftest passed" : "selftest FAILED") << " in " << std::setprecision(3) << secs
        << " s\n";
    return ok ? kExitOk : kExitRuntime;
  }
};

struct SceneCommand {
  int width = 512;
  int height = 256;
  int variant = 0;
  std::string out_dir;

  void attach(CLI::App &app) {
    app.add_option("--width", width, "Scene width")->capture_default_str();
    app.add_option("--height", height, "Scene height")->capture_default_str();
    app.add_option("--variant", variant, "Layout/texture variant")->capture_default_str();
    app.add_option("--out-dir", out_dir, "Output directory")->required();
  }

  int run(std::ostream &out) const {
    save_scene(make_synthetic_scene(width, height, variant), out_dir);
    out << "wrote " << out_dir << "/{left.png,right.png,disp_left.pfm,disp_right.pfm}\n";
    return kExitOk;
  }
};

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Multi-view consistent style transfer from a stereo pair"};
  app.name(args.empty() ? "mvst" : std::filesystem::path(args[0]).filename().string());
  app.require_subcommand(1);

  RenderCommand render;
  MetricsCommand metrics;
  BenchCommand bench;
  SelftestCommand selftest;
  SceneCommand scene;
  auto *render_app = app.add_subcommand("render", "Render stylized views from a stereo pair");
  auto *metrics_app = app.add_subcommand("metrics", "Inter-view consistency error of rendered views");
  auto *bench_app = app.add_subcommand("bench", "Time pipelines across view counts (CSV)");
  auto *selftest_app = app.add_subcommand("selftest", "End-to-end check on a synthetic scene");
  auto *scene_app = app.add_subcommand("synth-scene", "Write a synthetic stereo scene to disk");
  render.attach(*render_app);
  metrics.attach(*metrics_app);
  bench.attach(*bench_app);
  selftest.attach(*selftest_app);
  scene.attach(*scene_app);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) {
    reversed.pop_back();
  }
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    if (render_app->parsed()) {
      return render.run(out);
    }
    if (metrics_app->parsed()) {
      return metrics.run(out);
    }
    if (bench_app->parsed()) {
      return bench.run(out, err);
    }
    if (selftest_app->parsed()) {
      return selftest.run(out);
    }
    if (scene_app->parsed()) {
      return scene.run(out);
    }
  } catch (const UsageError &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

} // namespace mvst::cli
