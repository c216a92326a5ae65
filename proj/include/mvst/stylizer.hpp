#pragma once

#include <mvst/image.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace mvst {

class StylizerError : public Error {
public:
  using Error::Error;
};

enum class StylizerKind { Identity, Palette, Painterly, External };

StylizerKind parse_stylizer_kind(std::string_view name);
std::string_view to_string(StylizerKind kind) noexcept;

struct StylizerSpec {
  StylizerKind kind = StylizerKind::Identity;
  int palette_size = 8;
  int kernel_radius = 2;
  // External only: shell command with {in} and {out} placeholders and an
  // optional {style} placeholder bound to `style_guide`.
  std::string command;
  std::optional<std::filesystem::path> style_guide;
  // Artificial latency added to every call, standing in for network inference.
  int simulated_cost_ms = 0;
  std::chrono::seconds timeout{120};
};

// Throws InvalidArgument when a field is out of range or the command lacks placeholders.
void validate(const StylizerSpec &spec);

// Single image in, single stylized image of the same size out.
class Stylizer {
public:
  virtual ~Stylizer() = default;
  [[nodiscard]] virtual Image stylize(const Image &img) const = 0;
};

std::unique_ptr<Stylizer> make_stylizer(const StylizerSpec &spec);

Image stylize(const StylizerSpec &spec, const Image &img);

/// k-means colour quantization: centroids start at evenly spaced luminance
/// quantiles, run `iterations` Lloyd steps, then every pixel snaps to its
/// nearest centroid (ties to the lower index).
Image palette_quantize(const Image &img, int palette_size, int iterations = 10);

// Wraps another stylizer and counts calls; used to audit pipelines.
class CountingStylizer final : public Stylizer {
public:
  explicit CountingStylizer(const Stylizer &inner) : inner_(inner) {}

  [[nodiscard]] Image stylize(const Image &img) const override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return inner_.stylize(img);
  }
  [[nodiscard]] int calls() const noexcept { return calls_.load(); }
  void reset() noexcept { calls_.store(0); }

private:
  const Stylizer &inner_;
  mutable std::atomic<int> calls_{0};
};

} // namespace mvst
