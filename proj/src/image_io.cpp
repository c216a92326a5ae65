#include <mvst/image_io.hpp>

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

namespace mvst {
namespace {

struct FileCloser {
  void operator()(std::FILE *f) const noexcept {
    if (f != nullptr) {
      std::fclose(f);
    }
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path &path, const char *mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw IoError("cannot open '" + path.string() + "': " + std::strerror(errno));
  }
  return f;
}

std::vector<unsigned char> read_all(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw IoError("read failed for '" + path.string() + "'");
  }
  return bytes;
}

// libpng reports errors through a callback that must not return; throwing
// unwinds back through libpng's C frames, which carry unwind tables on the
// platforms we build for.
[[noreturn]] void png_throw(png_structp, png_const_charp message) {
  throw FormatError(std::string("libpng: ") + message);
}

void png_warn(png_structp, png_const_charp) {}

class PngReader {
public:
  PngReader() {
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_throw, png_warn);
    if (png_ == nullptr) {
      throw Error("png_create_read_struct failed");
    }
    info_ = png_create_info_struct(png_);
    if (info_ == nullptr) {
      png_destroy_read_struct(&png_, nullptr, nullptr);
      throw Error("png_create_info_struct failed");
    }
  }
  ~PngReader() { png_destroy_read_struct(&png_, &info_, nullptr); }
  PngReader(const PngReader &) = delete;
  PngReader &operator=(const PngReader &) = delete;

  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

class PngWriter {
public:
  PngWriter() {
    png_ = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_throw, png_warn);
    if (png_ == nullptr) {
      throw Error("png_create_write_struct failed");
    }
    info_ = png_create_info_struct(png_);
    if (info_ == nullptr) {
      png_destroy_write_struct(&png_, nullptr);
      throw Error("png_create_info_struct failed");
    }
  }
  ~PngWriter() { png_destroy_write_struct(&png_, &info_); }
  PngWriter(const PngWriter &) = delete;
  PngWriter &operator=(const PngWriter &) = delete;

  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

// Decoded PNG samples before normalization: `channels` samples per pixel
// (1 = gray, 3 = RGB), each in [0, max_value].
struct RawPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint16_t> samples;
};

RawPng read_png(const std::filesystem::path &path) {
  auto file = open_file(path, "rb");
  std::array<unsigned char, 8> signature{};
  if (std::fread(signature.data(), 1, signature.size(), file.get()) != signature.size() ||
      png_sig_cmp(signature.data(), 0, signature.size()) != 0) {
    throw FormatError("'" + path.string() + "' is not a PNG file");
  }

  PngReader reader;
  png_init_io(reader.png_, file.get());
  png_set_sig_bytes(reader.png_, static_cast<int>(signature.size()));
  png_read_info(reader.png_, reader.info_);

  const auto width = png_get_image_width(reader.png_, reader.info_);
  const auto height = png_get_image_height(reader.png_, reader.info_);
  const int color_type = png_get_color_type(reader.png_, reader.info_);
  int bit_depth = png_get_bit_depth(reader.png_, reader.info_);
  if (width == 0 || height == 0) {
    throw FormatError("'" + path.string() + "' has a zero dimension");
  }

  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    png_set_palette_to_rgb(reader.png_);
    bit_depth = 8;
  }
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(reader.png_);
    bit_depth = 8;
  }
  // Palette expansion also turns tRNS into alpha.
  if ((color_type & PNG_COLOR_MASK_ALPHA) != 0 ||
      png_get_valid(reader.png_, reader.info_, PNG_INFO_tRNS) != 0) {
    png_set_strip_alpha(reader.png_);
  }
  png_read_update_info(reader.png_, reader.info_);

  RawPng raw;
  raw.width = static_cast<int>(width);
  raw.height = static_cast<int>(height);
  raw.channels = png_get_channels(reader.png_, reader.info_);
  raw.bit_depth = bit_depth;
  if (raw.channels != 1 && raw.channels != 3) {
    throw FormatError("'" + path.string() + "' has an unsupported channel layout");
  }

  const std::size_t row_bytes = png_get_rowbytes(reader.png_, reader.info_);
  std::vector<unsigned char> buffer(row_bytes * height);
  std::vector<png_bytep> rows(height);
  for (std::size_t y = 0; y < height; ++y) {
    rows[y] = buffer.data() + y * row_bytes;
  }
  png_read_image(reader.png_, rows.data());
  png_read_end(reader.png_, nullptr);

  const std::size_t count = static_cast<std::size_t>(width) * height * raw.channels;
  raw.samples.resize(count);
  if (bit_depth == 16) {
    // PNG stores 16-bit samples big-endian.
    for (std::size_t i = 0; i < count; ++i) {
      raw.samples[i] = static_cast<std::uint16_t>((buffer[2 * i] << 8) | buffer[2 * i + 1]);
    }
  } else {
    std::copy_n(buffer.begin(), count, raw.samples.begin());
  }
  return raw;
}

bool has_png_signature(const std::vector<unsigned char> &bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

DisparityMap parse_pfm(const std::vector<unsigned char> &bytes, Direction direction,
                       const std::string &name) {
  std::size_t pos = 0;
  const auto skip_space = [&] {
    while (pos < bytes.size() && std::isspace(bytes[pos]) != 0) {
      ++pos;
    }
  };
  const auto token = [&] {
    skip_space();
    std::string out;
    while (pos < bytes.size() && std::isspace(bytes[pos]) == 0) {
      out.push_back(static_cast<char>(bytes[pos++]));
    }
    if (out.empty()) {
      throw FormatError("'" + name + "': truncated PFM header");
    }
    return out;
  };

  const auto magic = token();
  if (magic == "PF") {
    throw FormatError("'" + name + "': three-channel PFM is not a disparity map");
  }
  if (magic != "Pf") {
    throw FormatError("'" + name + "': not a PFM file");
  }
  int width = 0;
  int height = 0;
  double scale = 0.0;
  try {
    width = std::stoi(token());
    height = std::stoi(token());
    scale = std::stod(token());
  } catch (const std::logic_error &) {
    throw FormatError("'" + name + "': malformed PFM header");
  }
  // Exactly one whitespace byte separates the header from the raster.
  if (pos >= bytes.size() || std::isspace(bytes[pos]) == 0) {
    throw FormatError("'" + name + "': malformed PFM header");
  }
  ++pos;
  if (width <= 0 || height <= 0) {
    throw FormatError("'" + name + "': PFM has a zero dimension");
  }
  if (scale == 0.0 || !std::isfinite(scale)) {
    throw FormatError("'" + name + "': PFM scale must be a non-zero number");
  }

  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - pos != count * 4) {
    throw FormatError("'" + name + "': PFM raster size does not match header");
  }
  const bool file_little = scale < 0.0;
  const bool host_little = std::endian::native == std::endian::little;

  std::vector<float> values(count);
  for (int row = 0; row < height; ++row) {
    // Rows are stored bottom-to-top.
    const int y = height - 1 - row;
    for (int x = 0; x < width; ++x) {
      std::array<unsigned char, 4> b{};
      std::memcpy(b.data(), &bytes[pos], 4);
      pos += 4;
      if (file_little != host_little) {
        std::reverse(b.begin(), b.end());
      }
      float v = 0.F;
      std::memcpy(&v, b.data(), 4);
      if (!std::isfinite(v)) {
        throw FormatError("'" + name + "': non-finite disparity at (" + std::to_string(x) +
                          ", " + std::to_string(y) + ")");
      }
      values[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
             static_cast<std::size_t>(x)] = v;
    }
  }
  return {width, height, direction, std::move(values)};
}

} // namespace

Image load_image(const std::filesystem::path &path) {
  const auto raw = read_png(path);
  const float max_value = raw.bit_depth == 16 ? 65535.F : 255.F;
  std::vector<Rgb> pixels(static_cast<std::size_t>(raw.width) * raw.height);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    if (raw.channels == 1) {
      const float v = static_cast<float>(raw.samples[i]) / max_value;
      pixels[i] = {v, v, v};
    } else {
      pixels[i] = {static_cast<float>(raw.samples[3 * i]) / max_value,
                   static_cast<float>(raw.samples[3 * i + 1]) / max_value,
                   static_cast<float>(raw.samples[3 * i + 2]) / max_value};
    }
  }
  return {raw.width, raw.height, std::move(pixels)};
}

void save_image(const Image &image, const std::filesystem::path &path) {
  if (image.empty()) {
    throw InvalidArgument("cannot save an empty image");
  }
  const auto encode = [](float c) -> png_byte {
    if (!std::isfinite(c)) {
      return 0;
    }
    const double v = std::round(static_cast<double>(c) * 255.0);
    return static_cast<png_byte>(std::clamp(v, 0.0, 255.0));
  };

  const auto width = static_cast<std::size_t>(image.width());
  std::vector<png_byte> row(width * 3);

  auto file = open_file(path, "wb");
  PngWriter writer;
  png_init_io(writer.png_, file.get());
  png_set_IHDR(writer.png_, writer.info_, static_cast<png_uint_32>(image.width()),
               static_cast<png_uint_32>(image.height()), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(writer.png_, writer.info_);
  for (int y = 0; y < image.height(); ++y) {
    const auto src = image.row(y);
    for (std::size_t x = 0; x < width; ++x) {
      row[3 * x] = encode(src[x].r);
      row[3 * x + 1] = encode(src[x].g);
      row[3 * x + 2] = encode(src[x].b);
    }
    png_write_row(writer.png_, row.data());
  }
  png_write_end(writer.png_, nullptr);
  if (std::fflush(file.get()) != 0 || std::ferror(file.get()) != 0) {
    throw IoError("write failed for '" + path.string() + "'");
  }
}

DisparityMap load_disparity(const std::filesystem::path &path, Direction direction,
                            std::optional<DisparityScale> png_scale) {
  const auto bytes = read_all(path);
  if (has_png_signature(bytes)) {
    if (!png_scale) {
      throw InvalidArgument("PNG disparity '" + path.string() +
                            "' requires an explicit scale and offset");
    }
    const auto raw = read_png(path);
    if (raw.channels != 1 || raw.bit_depth != 16) {
      throw FormatError("'" + path.string() + "': PNG disparity must be 16-bit grayscale");
    }
    std::vector<float> values(raw.samples.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double v = static_cast<double>(raw.samples[i]) * png_scale->scale + png_scale->offset;
      if (!std::isfinite(v)) {
        throw FormatError("'" + path.string() + "': scaled disparity is not finite");
      }
      values[i] = static_cast<float>(v);
    }
    return {raw.width, raw.height, direction, std::move(values)};
  }
  if (bytes.empty()) {
    throw FormatError("'" + path.string() + "' is empty");
  }
  return parse_pfm(bytes, direction, path.string());
}

void save_disparity(const DisparityMap &map, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out << "Pf\n" << map.width() << ' ' << map.height() << "\n-1.0\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(map.width()) * 4);
  for (int y = map.height() - 1; y >= 0; --y) {
    const auto src = map.row(y);
    for (std::size_t x = 0; x < src.size(); ++x) {
      std::array<unsigned char, 4> b{};
      std::memcpy(b.data(), &src[x], 4);
      if constexpr (std::endian::native == std::endian::big) {
        std::reverse(b.begin(), b.end());
      }
      std::memcpy(&row[4 * x], b.data(), 4);
    }
    out.write(reinterpret_cast<const char *>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) {
    throw IoError("write failed for '" + path.string() + "'");
  }
}

} // namespace mvst
