#include "oracles.hpp"

#include <mvst/image_io.hpp>
#include <mvst/stylizer.hpp>
#include <mvst/synthetic_scene.hpp>

#include <doctest.h>

#include <chrono>
#include <set>

using namespace mvst;

namespace {

std::set<std::tuple<float, float, float>> colours(const Image &img) {
  std::set<std::tuple<float, float, float>> out;
  for (const auto &p : img.pixels()) {
    out.emplace(p.r, p.g, p.b);
  }
  return out;
}

StylizerSpec external(std::string command) {
  StylizerSpec spec;
  spec.kind = StylizerKind::External;
  spec.command = std::move(command);
  return spec;
}

// Image whose values survive an 8-bit PNG round trip unchanged.
Image quantized(std::mt19937 &rng, int w, int h) {
  std::uniform_int_distribution<int> u(0, 255);
  Image img(w, h);
  for (auto &p : img.pixels()) {
    p = {u(rng) / 255.F, u(rng) / 255.F, u(rng) / 255.F};
  }
  return img;
}

} // namespace

TEST_CASE("identity stylizer returns its input") {
  std::mt19937 rng(1);
  const auto img = oracle::random_image(rng, 11, 5);
  CHECK(stylize(StylizerSpec{}, img) == img);
}

TEST_CASE("palette output uses at most k colours and is deterministic (property)") {
  std::mt19937 rng(2);
  for (int trial = 0; trial < 12; ++trial) {
    std::uniform_int_distribution<int> dim(1, 30);
    const auto img = oracle::random_image(rng, dim(rng), dim(rng));
    const int k = 1 + trial % 9;
    const auto out = palette_quantize(img, k);
    CHECK(colours(out).size() <= static_cast<std::size_t>(k));
    CHECK(out.is_normalized());
    CHECK(out == palette_quantize(img, k));
  }
}

TEST_CASE("palette recovers well-separated clusters exactly") {
  // Two flat colours, k = 2: centroids converge to the colours themselves.
  Image img(10, 1);
  for (int x = 0; x < 10; ++x) {
    img(x, 0) = x < 4 ? Rgb{0.1F, 0.2F, 0.3F} : Rgb{0.9F, 0.8F, 0.7F};
  }
  const auto out = palette_quantize(img, 2);
  for (int x = 0; x < 10; ++x) {
    CHECK(out(x, 0).r == doctest::Approx(img(x, 0).r));
    CHECK(out(x, 0).b == doctest::Approx(img(x, 0).b));
  }
  // k = 1 collapses to the mean colour.
  const auto mean = palette_quantize(img, 1);
  CHECK(mean(0, 0).r == doctest::Approx(0.4 * 0.1 + 0.6 * 0.9));
  CHECK(colours(mean).size() == 1);
}

TEST_CASE("palette centroids differ between two views of the same scene") {
  // Content shifted by disparity changes pixel statistics, so per-view
  // stylization picks different palettes: the inconsistency the shared
  // stylization avoids.
  const auto scene = make_synthetic_scene(64, 48, 1);
  const auto l = colours(palette_quantize(scene.left, 8));
  const auto r = colours(palette_quantize(scene.right, 8));
  CHECK(l != r);
}

TEST_CASE("painterly smooths then quantizes to at most 12 colours") {
  std::mt19937 rng(3);
  StylizerSpec spec;
  spec.kind = StylizerKind::Painterly;
  spec.kernel_radius = 2;
  const auto img = oracle::random_image(rng, 40, 30);
  const auto out = stylize(spec, img);
  CHECK(colours(out).size() <= 12);
  CHECK(out.width() == 40);
  CHECK(out.is_normalized());
}

TEST_CASE("stylizer settings validation") {
  StylizerSpec spec;
  spec.palette_size = 0;
  CHECK_THROWS_AS(validate(spec), InvalidArgument);
  spec = {};
  spec.simulated_cost_ms = -1;
  CHECK_THROWS_AS(validate(spec), InvalidArgument);
  CHECK_THROWS_AS(validate(external("cp {in} somewhere")), InvalidArgument);
  CHECK_THROWS_AS(validate(external("run {in} {out} {style}")), InvalidArgument);
  CHECK_NOTHROW(validate(external("cp {in} {out}")));
  CHECK(parse_stylizer_kind("painterly") == StylizerKind::Painterly);
  CHECK_THROWS_AS(parse_stylizer_kind("cubist"), InvalidArgument);
  CHECK(to_string(StylizerKind::External) == "external");
}

TEST_CASE("simulated cost delays every call") {
  StylizerSpec spec;
  spec.simulated_cost_ms = 30;
  const auto s = make_stylizer(spec);
  const auto start = std::chrono::steady_clock::now();
  (void)s->stylize(Image(4, 4));
  (void)s->stylize(Image(4, 4));
  const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  CHECK(ms >= 60.0);
}

TEST_CASE("counting wrapper counts and forwards") {
  StylizerSpec spec;
  spec.kind = StylizerKind::Palette;
  spec.palette_size = 2;
  const auto inner = make_stylizer(spec);
  CountingStylizer counter(*inner);
  std::mt19937 rng(4);
  const auto img = oracle::random_image(rng, 6, 6);
  CHECK(counter.stylize(img) == inner->stylize(img));
  (void)counter.stylize(img);
  CHECK(counter.calls() == 2);
  counter.reset();
  CHECK(counter.calls() == 0);
}

TEST_CASE("external stylizer round-trips through the command") {
  std::mt19937 rng(5);
  const auto img = quantized(rng, 9, 6);
  CHECK(stylize(external("cp {in} {out}"), img) == img);
}

TEST_CASE("external stylizer passes the style guide, quoted") {
  oracle::TempDir dir;
  std::mt19937 rng(6);
  const auto guide = quantized(rng, 9, 6);
  const auto guide_path = dir / "it's a style.png";
  save_image(guide, guide_path);
  auto spec = external("cp {style} {out} && test -f {in}");
  spec.style_guide = guide_path;
  CHECK(stylize(spec, quantized(rng, 9, 6)) == guide);
}

TEST_CASE("external stylizer failures surface as StylizerError") {
  const Image img(5, 5);
  SUBCASE("non-zero exit carries stderr") {
    try {
      (void)stylize(external("echo 'model exploded' >&2; exit 3 # {in} {out}"), img);
      FAIL("expected StylizerError");
    } catch (const StylizerError &e) {
      const std::string what = e.what();
      CHECK(what.find("status 3") != std::string::npos);
      CHECK(what.find("model exploded") != std::string::npos);
    }
  }
  SUBCASE("missing output") {
    CHECK_THROWS_AS((void)stylize(external("true {in} {out}"), img), StylizerError);
  }
  SUBCASE("size change") {
    oracle::TempDir dir;
    save_image(Image(3, 3), dir / "small.png");
    CHECK_THROWS_AS(
        (void)stylize(external("cp '" + (dir / "small.png").string() + "' {out} # {in}"), img),
        StylizerError);
  }
  SUBCASE("timeout kills the process group") {
    auto spec = external("sleep 30 # {in} {out}");
    spec.timeout = std::chrono::seconds(1);
    const auto start = std::chrono::steady_clock::now();
    CHECK_THROWS_AS((void)stylize(spec, img), StylizerError);
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(10));
  }
}
