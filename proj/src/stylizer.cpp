#include <mvst/stylizer.hpp>

#include <mvst/guided_filter.hpp>
#include <mvst/image_io.hpp>

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace mvst {
namespace {

double luma(const Rgb &p) noexcept { return 0.299 * p.r + 0.587 * p.g + 0.114 * p.b; }

struct Centroid {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
};

double distance2(const Rgb &p, const Centroid &c) noexcept {
  const double dr = p.r - c.r;
  const double dg = p.g - c.g;
  const double db = p.b - c.b;
  return dr * dr + dg * dg + db * db;
}

std::size_t nearest_centroid(const Rgb &p, const std::vector<Centroid> &centroids) noexcept {
  std::size_t best = 0;
  double best_d = distance2(p, centroids[0]);
  for (std::size_t k = 1; k < centroids.size(); ++k) {
    const double d = distance2(p, centroids[k]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

Image box_blur(const Image &img, int radius) {
  const auto r = box_mean(extract_channel(img, Channel::R), radius);
  const auto g = box_mean(extract_channel(img, Channel::G), radius);
  const auto b = box_mean(extract_channel(img, Channel::B), radius);
  Image out(img.width(), img.height());
  auto px = out.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = {static_cast<float>(r.values[i]), static_cast<float>(g.values[i]),
             static_cast<float>(b.values[i])};
  }
  out.clamp();
  return out;
}

std::string shell_quote(const std::string &s) {
  std::string out = "'";
  for (const char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += '\'';
  return out;
}

void replace_all(std::string &s, std::string_view from, const std::string &to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

// Scratch directory removed on scope exit.
class TempDir {
public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    const auto base = std::filesystem::temp_directory_path();
    for (int attempt = 0; attempt < 16; ++attempt) {
      std::ostringstream name;
      name << "mvst-" << ::getpid() << '-' << counter.fetch_add(1) << '-' << std::hex << rd();
      auto candidate = base / name.str();
      if (std::filesystem::create_directory(candidate)) {
        path_ = std::move(candidate);
        return;
      }
    }
    throw IoError("could not create a temporary directory under " + base.string());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  [[nodiscard]] const std::filesystem::path &path() const noexcept { return path_; }

private:
  std::filesystem::path path_;
};

std::string read_text(const std::filesystem::path &path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs `command` through /bin/sh with stderr redirected to `stderr_path`.
// Returns the exit status, or throws on timeout / spawn failure.
int run_shell(const std::string &command, const std::filesystem::path &stderr_path,
              std::chrono::seconds timeout) {
  const pid_t pid = ::fork();
  if (pid < 0) {
    throw StylizerError("fork failed");
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    const int err = ::open(stderr_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
    const int null = ::open("/dev/null", O_RDWR);
    if (err >= 0) {
      ::dup2(err, STDERR_FILENO);
    }
    if (null >= 0) {
      ::dup2(null, STDOUT_FILENO);
      ::dup2(null, STDIN_FILENO);
    }
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char *>(nullptr));
    ::_exit(127);
  }

  const auto deadline = std::chrono::steady_clock::now() + timeout;
  int status = 0;
  for (;;) {
    const pid_t done = ::waitpid(pid, &status, WNOHANG);
    if (done == pid) {
      break;
    }
    if (done < 0 && errno != EINTR) {
      throw StylizerError("waitpid failed");
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      throw StylizerError("external stylizer timed out after " +
                          std::to_string(timeout.count()) + " s");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  if (WIFEXITED(status)) {
    return WEXITSTATUS(status);
  }
  return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

class BuiltinStylizer final : public Stylizer {
public:
  explicit BuiltinStylizer(StylizerSpec spec) : spec_(std::move(spec)) { validate(spec_); }

  [[nodiscard]] Image stylize(const Image &img) const override {
    Image out = apply(img);
    if (spec_.simulated_cost_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(spec_.simulated_cost_ms));
    }
    return out;
  }

private:
  [[nodiscard]] Image apply(const Image &img) const {
    switch (spec_.kind) {
    case StylizerKind::Identity:
      return img;
    case StylizerKind::Palette:
      return palette_quantize(img, spec_.palette_size);
    case StylizerKind::Painterly:
      return palette_quantize(box_blur(img, spec_.kernel_radius), 12);
    case StylizerKind::External:
      return run_external(img);
    }
    return img;
  }

  [[nodiscard]] Image run_external(const Image &img) const {
    const TempDir dir;
    const auto in_path = dir.path() / "in.png";
    const auto out_path = dir.path() / "out.png";
    const auto err_path = dir.path() / "stderr.txt";
    save_image(img, in_path);

    std::string command = spec_.command;
    replace_all(command, "{in}", shell_quote(in_path.string()));
    replace_all(command, "{out}", shell_quote(out_path.string()));
    if (spec_.style_guide) {
      replace_all(command, "{style}", shell_quote(spec_.style_guide->string()));
    }

    const int code = run_shell(command, err_path, spec_.timeout);
    if (code != 0) {
      throw StylizerError("external stylizer exited with status " + std::to_string(code) + ": " +
                          read_text(err_path));
    }
    if (!std::filesystem::exists(out_path)) {
      throw StylizerError("external stylizer produced no output image: " + read_text(err_path));
    }
    auto result = load_image(out_path);
    if (result.width() != img.width() || result.height() != img.height()) {
      throw StylizerError("external stylizer changed the image size from " +
                          std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                          " to " + std::to_string(result.width()) + "x" +
                          std::to_string(result.height()));
    }
    return result;
  }

  StylizerSpec spec_;
};

} // namespace

StylizerKind parse_stylizer_kind(std::string_view name) {
  if (name == "identity") {
    return StylizerKind::Identity;
  }
  if (name == "palette") {
    return StylizerKind::Palette;
  }
  if (name == "painterly") {
    return StylizerKind::Painterly;
  }
  if (name == "external") {
    return StylizerKind::External;
  }
  throw InvalidArgument("unknown stylizer '" + std::string(name) + "'");
}

std::string_view to_string(StylizerKind kind) noexcept {
  switch (kind) {
  case StylizerKind::Identity:
    return "identity";
  case StylizerKind::Palette:
    return "palette";
  case StylizerKind::Painterly:
    return "painterly";
  case StylizerKind::External:
    return "external";
  }
  return "identity";
}

void validate(const StylizerSpec &spec) {
  if (spec.palette_size < 1) {
    throw InvalidArgument("palette size must be positive");
  }
  if (spec.kernel_radius < 1) {
    throw InvalidArgument("painterly kernel radius must be positive");
  }
  if (spec.simulated_cost_ms < 0) {
    throw InvalidArgument("simulated cost must be non-negative");
  }
  if (spec.kind == StylizerKind::External) {
    if (spec.command.find("{in}") == std::string::npos ||
        spec.command.find("{out}") == std::string::npos) {
      throw InvalidArgument("external stylizer command must contain {in} and {out}");
    }
    if (spec.command.find("{style}") != std::string::npos && !spec.style_guide) {
      throw InvalidArgument("external stylizer command uses {style} but no style guide was given");
    }
  }
}

std::unique_ptr<Stylizer> make_stylizer(const StylizerSpec &spec) {
  return std::make_unique<BuiltinStylizer>(spec);
}

Image stylize(const StylizerSpec &spec, const Image &img) { return make_stylizer(spec)->stylize(img); }

Image palette_quantize(const Image &img, int palette_size, int iterations) {
  if (palette_size < 1) {
    throw InvalidArgument("palette size must be positive");
  }
  const auto px = img.pixels();
  const std::size_t n = px.size();
  const auto k = static_cast<std::size_t>(palette_size);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return luma(px[a]) < luma(px[b]); });

  std::vector<Centroid> centroids(k);
  for (std::size_t j = 0; j < k; ++j) {
    const auto q = std::min(n - 1, static_cast<std::size_t>(
                                       (static_cast<double>(j) + 0.5) * static_cast<double>(n) /
                                       static_cast<double>(k)));
    const auto &p = px[order[q]];
    centroids[j] = {p.r, p.g, p.b};
  }

  for (int it = 0; it < iterations; ++it) {
    std::vector<Centroid> sums(k);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = nearest_centroid(px[i], centroids);
      sums[c].r += px[i].r;
      sums[c].g += px[i].g;
      sums[c].b += px[i].b;
      ++counts[c];
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] == 0) {
        continue;
      }
      const auto cnt = static_cast<double>(counts[j]);
      centroids[j] = {sums[j].r / cnt, sums[j].g / cnt, sums[j].b / cnt};
    }
  }

  Image out(img.width(), img.height());
  auto dst = out.pixels();
  for (std::size_t i = 0; i < n; ++i) {
    const auto &c = centroids[nearest_centroid(px[i], centroids)];
    dst[i] = {static_cast<float>(c.r), static_cast<float>(c.g), static_cast<float>(c.b)};
  }
  out.clamp();
  return out;
}

} // namespace mvst
