// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include "../oracles.hpp"

#include <mvst/bench.hpp>
#include <mvst/image_io.hpp>
#include <mvst/parallel.hpp>
#include <mvst/pipeline.hpp>
#include <mvst/synthetic_scene.hpp>

#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace mvst;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char *format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

PipelineConfig palette_config(int views) {
  PipelineConfig cfg;
  cfg.stylizer.kind = StylizerKind::Palette;
  cfg.viewpoints = evenly_spaced_viewpoints(views);
  return cfg;
}

// The scene `mvst selftest` uses by default.
StereoInput selftest_scene() { return make_synthetic_scene(128, 128, 0); }

Outcome scaling() {
  BenchOptions options;
  options.methods = {Method::Ours, Method::Baseline};
  options.view_counts = {4, 8, 16};
  options.repeats = 5;
  options.config = palette_config(1);
  options.config.stylizer.simulated_cost_ms = 200;
  options.config.filter = default_filter_params(512, 256);
  options.config.threads = 0;
  const auto report = run_bench({make_synthetic_scene(512, 256, 0)}, options);
  report.write_table(std::cout);
  const double ours = report.scaling_ratio(Method::Ours);
  const double base = report.scaling_ratio(Method::Baseline);
  return {ours <= 1.5 && base >= 3.0,
          fmt("ours t16/t4 = %.3f (<= 1.5), baseline t16/t4 = %.3f (>= 3.0), medians of %d runs",
              ours, base, options.repeats)};
}

Outcome consistency_ordering() {
  bool pass = true;
  std::ostringstream detail;
  const std::array<std::array<int, 3>, 4> scenes{{{128, 128, 0}, {128, 96, 1}, {160, 120, 2}, {512, 256, 3}}};
  for (const auto &[w, h, variant] : scenes) {
    const auto scene = make_synthetic_scene(w, h, variant);
    auto cfg = palette_config(4);
    cfg.filter = default_filter_params(w, h);
    const auto err = [&](Method m) {
      return consistency_error(run_method(m, scene, cfg).views, scene.disp_left, cfg.viewpoints);
    };
    const double ours = err(Method::Ours);
    const double base = err(Method::Baseline);
    const double a2 = err(Method::Approach2);
    pass = pass && ours < base && ours < a2;
    detail << fmt("%dx%d/v%d ours=%.5f baseline=%.5f approach2=%.5f; ", w, h, variant, ours, base, a2);
  }
  return {pass, detail.str()};
}

Outcome warp_oracle() {
  std::mt19937 rng(0xac3);
  std::size_t mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    const auto src = oracle::random_image(rng, 32, 32);
    const auto d = oracle::random_disparity(rng, 32, 32, Direction::LeftToRight, -8.F, 8.F);
    const auto fast = forward_warp(src, d);
    const auto slow = oracle::warp(src, d, DepthOrder::SmallerWins);
    for (std::size_t p = 0; p < src.size(); ++p) {
      const bool same = fast.color.valid[p] == slow.color.valid[p] &&
                        (fast.color.valid[p] == 0 ||
                         (fast.color.image.pixels()[p] == slow.color.image.pixels()[p] &&
                          fast.depth[p] == slow.depth[p]));
      mismatches += same ? 0 : 1;
    }
  }
  return {mismatches == 0, fmt("100 random 32x32 instances, %zu mismatching pixels", mismatches)};
}

Outcome alpha_exactness() {
  const auto reference = [](double b) {
    constexpr double l = 0.0;
    constexpr double r = 1.0;
    if (b < l) {
      return 0.0;
    }
    if (b > r) {
      return 1.0;
    }
    return (b - l) / (r - l);
  };
  std::mt19937_64 rng(0xac4);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  std::vector<double> points;
  for (int i = 0; i < 1000; ++i) {
    points.push_back(u(rng));
  }
  double worst = 0.0;
  for (const double b : points) {
    worst = std::max(worst, std::abs(blend_alpha({b}) - reference(b)));
  }
  const bool boundaries = std::abs(blend_alpha({-0.25}) - 0.0) <= 1e-12 &&
                          std::abs(blend_alpha({0.0}) - 0.0) <= 1e-12 &&
                          std::abs(blend_alpha({1.0}) - 1.0) <= 1e-12 &&
                          std::abs(blend_alpha({1.25}) - 1.0) <= 1e-12;
  return {worst <= 1e-12 && boundaries,
          fmt("max |error| over 1000 points = %.3g, boundary cases %s", worst,
              boundaries ? "exact" : "WRONG")};
}

Outcome guided_reference() {
  std::mt19937 rng(0xac5);
  const std::array<std::pair<int, double>, 4> settings{{{1, 1e-4}, {1, 1e-2}, {4, 1e-4}, {4, 1e-2}}};
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto [r, eps] = settings[static_cast<std::size_t>(i) % settings.size()];
    const auto input = oracle::random_image(rng, 64, 64);
    const auto guide = oracle::random_image(rng, 64, 64);
    const auto fast = guided_filter(input, guide, {r, eps});
    const auto ref = oracle::guided(input, guide, r, eps);
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        const auto &p = fast(x, y);
        worst = std::max(worst, std::abs(p.r - std::clamp(ref[0](x, y), 0.0, 1.0)));
        worst = std::max(worst, std::abs(p.g - std::clamp(ref[1](x, y), 0.0, 1.0)));
        worst = std::max(worst, std::abs(p.b - std::clamp(ref[2](x, y), 0.0, 1.0)));
      }
    }
  }

  // Constant guide: compared pre-clamp against a single box mean of each
  // input channel, as the criterion states.
  const auto input = oracle::random_image(rng, 64, 64);
  const Image flat(64, 64, {0.4F, 0.5F, 0.6F});
  const int r = 4;
  const auto coeff = guided_filter_coefficients(input, flat, {r, 1e-3});
  double single = 0.0;
  double twice = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    const auto p = extract_channel(input, static_cast<Channel>(c));
    const auto once = oracle::box(p, r);
    const auto double_box = oracle::box(once, r);
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      const double out = coeff.mean_a[c].values[i] * coeff.guide.values[i] + coeff.mean_b[c].values[i];
      single = std::max(single, std::abs(out - once.values[i]));
      twice = std::max(twice, std::abs(out - double_box.values[i]));
    }
  }
  std::cout << fmt("       note: constant-guide output vs box_mean(box_mean(input)) max error %.3g\n",
                   twice);
  return {worst <= 1e-6 && single <= 1e-9,
          fmt("fast vs per-window max error %.3g (<= 1e-6) on 20 pairs; constant guide vs "
              "box_mean(input) max error %.3g (<= 1e-9)",
              worst, single)};
}

Outcome determinism() {
  const auto scene = selftest_scene();
  const oracle::TempDir dir;
  bool pass = true;
  std::ostringstream detail;
  const unsigned max_threads = resolve_threads(0);
  for (const auto method : {InpaintMethod::Reflect, InpaintMethod::Nearest}) {
    std::vector<std::vector<std::vector<unsigned char>>> files;
    for (const unsigned t : {1U, 2U, max_threads}) {
      auto cfg = palette_config(4);
      cfg.filter = default_filter_params(128, 128);
      cfg.inpaint = method;
      cfg.threads = t;
      const auto views = run_ours(scene, cfg).views;
      std::vector<std::vector<unsigned char>> bytes;
      for (std::size_t i = 0; i < views.size(); ++i) {
        const auto path = dir / ("t" + std::to_string(t) + "_" + std::to_string(i) + ".png");
        save_image(views[i], path);
        bytes.push_back(oracle::read_file(path));
      }
      files.push_back(std::move(bytes));
    }
    const bool same = files[0] == files[1] && files[0] == files[2];
    pass = pass && same;
    detail << to_string(method) << (same ? " identical" : " DIFFERENT") << "; ";
  }
  detail << "threads 1, 2, " << max_threads;
  return {pass, detail.str()};
}

Outcome endpoint_identity() {
  const auto scene = selftest_scene();
  const oracle::TempDir dir;
  save_image(scene.left, dir / "left.png");
  const auto left_bytes = oracle::read_file(dir / "left.png");
  const StereoInput input{load_image(dir / "left.png"), scene.right,
                          DisparityMap(128, 128, Direction::LeftToRight),
                          DisparityMap(128, 128, Direction::RightToLeft)};
  PipelineConfig cfg;
  cfg.stylizer.kind = StylizerKind::Identity;
  cfg.filter.reset();
  cfg.viewpoints = {{0.0}, {1.0 / 3.0}, {2.0 / 3.0}, {1.0}};
  const auto views = run_ours(input, cfg).views;
  int identical = 0;
  for (std::size_t i = 0; i < views.size(); ++i) {
    const auto path = dir / ("view_" + std::to_string(i) + ".png");
    save_image(views[i], path);
    identical += oracle::read_file(path) == left_bytes ? 1 : 0;
  }
  return {identical == 4, fmt("%d of 4 views byte-identical to the left input", identical)};
}

Outcome call_counts() {
  const auto scene = make_synthetic_scene(64, 48, 0);
  const auto palette = make_stylizer(palette_config(1).stylizer);
  bool pass = true;
  std::ostringstream detail;
  for (const int n : {4, 8, 16}) {
    const auto cfg = palette_config(n);
    detail << "n=" << n << ':';
    for (const auto &[method, expected] : {std::pair{Method::Ours, 1}, {Method::Approach2, 2},
                                          {Method::Approach3, 1}, {Method::Baseline, n}}) {
      CountingStylizer counter(*palette);
      (void)run_method(method, scene, cfg, counter);
      pass = pass && counter.calls() == expected;
      detail << ' ' << to_string(method) << '=' << counter.calls();
    }
    detail << "; ";
  }
  return {pass, detail.str()};
}

Outcome inpaint_totality() {
  std::mt19937 rng(0xac9);
  int runs = 0;
  int bad = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const int w = 48;
    const int h = 32;
    const auto bound = static_cast<float>(w);
    const StereoInput input{oracle::random_image(rng, w, h), oracle::random_image(rng, w, h),
                            oracle::random_disparity(rng, w, h, Direction::LeftToRight, -bound, bound),
                            oracle::random_disparity(rng, w, h, Direction::RightToLeft, -bound, bound)};
    auto cfg = palette_config(5);
    cfg.inpaint = trial % 2 == 0 ? InpaintMethod::Reflect : InpaintMethod::Nearest;
    for (const auto m : {Method::Ours, Method::Baseline, Method::Approach2, Method::Approach3}) {
      for (const auto &v : run_method(m, input, cfg).views) {
        ++runs;
        bad += (v.width() == w && v.height() == h && v.is_normalized()) ? 0 : 1;
      }
    }
  }
  return {bad == 0, fmt("%d fuzzed views (|d| <= width), %d with invalid pixels", runs, bad)};
}

} // namespace

int main() {
  const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
      {"3 warp oracle equivalence", warp_oracle},
      {"4 blend alpha exactness", alpha_exactness},
      {"5 guided filter reference equivalence", guided_reference},
      {"6 thread-count determinism", determinism},
      {"7 endpoint identity", endpoint_identity},
      {"8 stylize-call counts", call_counts},
      {"9 in-paint totality", inpaint_totality},
      {"2 consistency ordering", consistency_ordering},
      {"1 scaling with view count", scaling},
  };
  int failed = 0;
  for (const auto &[name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception &e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    failed += outcome.pass ? 0 : 1;
    std::cout << (outcome.pass ? "[PASS] " : "[FAIL] ") << "criterion " << name << ": "
              << outcome.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << '/' << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
