#pragma once

// Slow, obviously-correct reference implementations used only by the tests.

#include <mvst/guided_filter.hpp>
#include <mvst/image.hpp>
#include <mvst/viewsynth.hpp>

#include <zlib.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

// Per target pixel, scans every source pixel of the row and keeps the one the
// depth test prefers. No shared state between targets.
inline mvst::WarpBuffer warp(const mvst::Image &src, const mvst::DisparityMap &d,
                             mvst::DepthOrder order) {
  const int w = src.width();
  const int h = src.height();
  mvst::WarpBuffer out{mvst::MaskedImage(mvst::Image(w, h), std::vector<std::uint8_t>(src.size(), 0)),
                       std::vector<float>(src.size(), std::numeric_limits<float>::infinity())};
  for (int y = 0; y < h; ++y) {
    for (int tx = 0; tx < w; ++tx) {
      int best = -1;
      for (int x = 0; x < w; ++x) {
        const double v = static_cast<double>(x) + static_cast<double>(d(x, y));
        // Half away from zero, written out by hand.
        const double landing = v >= 0.0 ? std::floor(v + 0.5) : -std::floor(-v + 0.5);
        if (landing != static_cast<double>(tx)) {
          continue;
        }
        if (best < 0) {
          best = x;
          continue;
        }
        const float a = d(x, y);
        const float b = d(best, y);
        const bool better = a == b ? x > best
                                   : (order == mvst::DepthOrder::SmallerWins ? a < b : a > b);
        if (better) {
          best = x;
        }
      }
      if (best >= 0) {
        const auto i = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                       static_cast<std::size_t>(tx);
        out.color.image(tx, y) = src(best, y);
        out.color.valid[i] = 1;
        out.depth[i] = d(best, y);
      }
    }
  }
  return out;
}

inline double box_at(const mvst::Plane &p, int cx, int cy, int r) {
  double sum = 0.0;
  int n = 0;
  for (int y = cy - r; y <= cy + r; ++y) {
    for (int x = cx - r; x <= cx + r; ++x) {
      if (x >= 0 && y >= 0 && x < p.width && y < p.height) {
        sum += p(x, y);
        ++n;
      }
    }
  }
  return sum / n;
}

inline mvst::Plane box(const mvst::Plane &p, int r) {
  mvst::Plane out(p.width, p.height);
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < p.width; ++x) {
      out(x, y) = box_at(p, x, y, r);
    }
  }
  return out;
}

// Guided filter evaluated window by window: fit a, b in every window, then
// average the coefficients of all windows covering each pixel. Unclamped.
inline std::array<mvst::Plane, 3> guided(const mvst::Image &input, const mvst::Image &guide, int r,
                                         double eps) {
  const int w = input.width();
  const int h = input.height();
  mvst::Plane lum(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto &g = guide(x, y);
      lum(x, y) = 0.299 * g.r + 0.587 * g.g + 0.114 * g.b;
    }
  }
  std::array<mvst::Plane, 3> result;
  for (int c = 0; c < 3; ++c) {
    mvst::Plane p(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const auto &px = input(x, y);
        p(x, y) = c == 0 ? px.r : (c == 1 ? px.g : px.b);
      }
    }
    mvst::Plane a(w, h);
    mvst::Plane b(w, h);
    for (int cy = 0; cy < h; ++cy) {
      for (int cx = 0; cx < w; ++cx) {
        double si = 0, sp = 0, sii = 0, sip = 0;
        int n = 0;
        for (int y = std::max(0, cy - r); y <= std::min(h - 1, cy + r); ++y) {
          for (int x = std::max(0, cx - r); x <= std::min(w - 1, cx + r); ++x) {
            si += lum(x, y);
            sp += p(x, y);
            sii += lum(x, y) * lum(x, y);
            sip += lum(x, y) * p(x, y);
            ++n;
          }
        }
        const double mi = si / n;
        const double mp = sp / n;
        const double var = sii / n - mi * mi;
        const double cov = sip / n - mi * mp;
        a(cx, cy) = cov / (var + eps);
        b(cx, cy) = mp - a(cx, cy) * mi;
      }
    }
    const auto ma = box(a, r);
    const auto mb = box(b, r);
    mvst::Plane q(w, h);
    for (std::size_t i = 0; i < q.values.size(); ++i) {
      q.values[i] = ma.values[i] * lum.values[i] + mb.values[i];
    }
    result[static_cast<std::size_t>(c)] = std::move(q);
  }
  return result;
}

// Every invalid pixel takes the closest valid pixel of its row, ties left.
// Returns false when the row has no valid pixel.
inline bool nearest_row(const mvst::MaskedImage &buf, mvst::Image &out, int y) {
  bool any = false;
  for (int x = 0; x < buf.width(); ++x) {
    any = any || buf.is_valid(x, y);
  }
  if (!any) {
    return false;
  }
  for (int x = 0; x < buf.width(); ++x) {
    if (buf.is_valid(x, y)) {
      continue;
    }
    int best = -1;
    for (int s = 0; s < buf.width(); ++s) {
      if (buf.is_valid(s, y) && (best < 0 || std::abs(s - x) < std::abs(best - x))) {
        best = s;
      }
    }
    out(x, y) = buf.image(best, y);
  }
  return true;
}

inline mvst::Image nearest(const mvst::MaskedImage &buf) {
  mvst::Image out = buf.image;
  std::vector<int> filled;
  for (int y = 0; y < buf.height(); ++y) {
    if (nearest_row(buf, out, y)) {
      filled.push_back(y);
    }
  }
  for (int y = 0; y < buf.height(); ++y) {
    if (std::find(filled.begin(), filled.end(), y) != filled.end()) {
      continue;
    }
    int best = -1;
    for (const int f : filled) {
      if (best < 0 || std::abs(f - y) < std::abs(best - y)) {
        best = f;
      }
    }
    for (int x = 0; x < buf.width(); ++x) {
      out(x, y) = out(x, best);
    }
  }
  return out;
}

// ---- raw PNG bytes, independent of libpng -------------------------------

inline void put_u32(std::vector<unsigned char> &v, std::uint32_t x) {
  v.push_back(static_cast<unsigned char>(x >> 24));
  v.push_back(static_cast<unsigned char>(x >> 16));
  v.push_back(static_cast<unsigned char>(x >> 8));
  v.push_back(static_cast<unsigned char>(x));
}

inline std::uint32_t get_u32(const unsigned char *p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         std::uint32_t{p[3]};
}

inline void chunk(std::vector<unsigned char> &png, const char *type,
                  const std::vector<unsigned char> &data) {
  put_u32(png, static_cast<std::uint32_t>(data.size()));
  const std::size_t start = png.size();
  png.insert(png.end(), type, type + 4);
  png.insert(png.end(), data.begin(), data.end());
  const auto crc = crc32(0, png.data() + start, static_cast<uInt>(png.size() - start));
  put_u32(png, static_cast<std::uint32_t>(crc));
}

// Unfiltered PNG from already-packed scanline bytes.
inline std::vector<unsigned char> encode_png(int w, int h, int bit_depth, int color_type,
                                             const std::vector<unsigned char> &packed_rows,
                                             const std::vector<unsigned char> &palette = {}) {
  const std::size_t stride = packed_rows.size() / static_cast<std::size_t>(h);
  std::vector<unsigned char> raw;
  for (int y = 0; y < h; ++y) {
    raw.push_back(0);
    const auto *row = packed_rows.data() + static_cast<std::size_t>(y) * stride;
    raw.insert(raw.end(), row, row + stride);
  }
  uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> z(zlen);
  if (compress(z.data(), &zlen, raw.data(), static_cast<uLong>(raw.size())) != Z_OK) {
    throw std::runtime_error("compress failed");
  }
  z.resize(zlen);

  std::vector<unsigned char> png = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<unsigned char> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(w));
  put_u32(ihdr, static_cast<std::uint32_t>(h));
  ihdr.insert(ihdr.end(), {static_cast<unsigned char>(bit_depth),
                           static_cast<unsigned char>(color_type), 0, 0, 0});
  chunk(png, "IHDR", ihdr);
  if (!palette.empty()) {
    chunk(png, "PLTE", palette);
  }
  chunk(png, "IDAT", z);
  chunk(png, "IEND", {});
  return png;
}

struct DecodedPng {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int color_type = 0;
  std::vector<unsigned char> rows; // unfiltered, packed
};

inline int paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a);
  const int pb = std::abs(p - b);
  const int pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) {
    return a;
  }
  return pb <= pc ? b : c;
}

// Non-interlaced 8-bit RGB decoder; enough to inspect what save_image wrote.
inline DecodedPng decode_png(const std::vector<unsigned char> &bytes) {
  DecodedPng out;
  std::vector<unsigned char> z;
  std::size_t pos = 8;
  while (pos + 8 <= bytes.size()) {
    const auto len = get_u32(&bytes[pos]);
    const std::string type(reinterpret_cast<const char *>(&bytes[pos + 4]), 4);
    const auto *data = &bytes[pos + 8];
    if (type == "IHDR") {
      out.width = static_cast<int>(get_u32(data));
      out.height = static_cast<int>(get_u32(data + 4));
      out.bit_depth = data[8];
      out.color_type = data[9];
      if (data[12] != 0) {
        throw std::runtime_error("interlaced PNG");
      }
    } else if (type == "IDAT") {
      z.insert(z.end(), data, data + len);
    }
    pos += 12 + len;
  }
  if (out.bit_depth != 8 || out.color_type != 2) {
    throw std::runtime_error("decoder only handles 8-bit RGB");
  }
  const std::size_t bpp = 3;
  const std::size_t stride = static_cast<std::size_t>(out.width) * bpp;
  std::vector<unsigned char> raw((stride + 1) * static_cast<std::size_t>(out.height));
  uLongf rawlen = static_cast<uLongf>(raw.size());
  if (uncompress(raw.data(), &rawlen, z.data(), static_cast<uLong>(z.size())) != Z_OK ||
      rawlen != raw.size()) {
    throw std::runtime_error("bad zlib stream");
  }
  out.rows.assign(stride * static_cast<std::size_t>(out.height), 0);
  for (std::size_t y = 0; y < static_cast<std::size_t>(out.height); ++y) {
    const int filter = raw[y * (stride + 1)];
    const auto *in = &raw[y * (stride + 1) + 1];
    auto *cur = &out.rows[y * stride];
    const auto *prev = y > 0 ? &out.rows[(y - 1) * stride] : nullptr;
    for (std::size_t i = 0; i < stride; ++i) {
      const int a = i >= bpp ? cur[i - bpp] : 0;
      const int b = prev != nullptr ? prev[i] : 0;
      const int c = (prev != nullptr && i >= bpp) ? prev[i - bpp] : 0;
      int pred = 0;
      switch (filter) {
      case 0: pred = 0; break;
      case 1: pred = a; break;
      case 2: pred = b; break;
      case 3: pred = (a + b) / 2; break;
      case 4: pred = paeth(a, b, c); break;
      default: throw std::runtime_error("bad filter type");
      }
      cur[i] = static_cast<unsigned char>((in[i] + pred) & 0xff);
    }
  }
  return out;
}

inline std::vector<unsigned char> read_file(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path &p, const std::vector<unsigned char> &bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

// ---- generators & fixtures ------------------------------------------------

inline mvst::Image random_image(std::mt19937 &rng, int w, int h) {
  std::uniform_real_distribution<float> u(0.F, 1.F);
  mvst::Image img(w, h);
  for (auto &p : img.pixels()) {
    p = {u(rng), u(rng), u(rng)};
  }
  return img;
}

inline mvst::DisparityMap random_disparity(std::mt19937 &rng, int w, int h, mvst::Direction dir,
                                           float lo, float hi) {
  std::uniform_real_distribution<float> u(lo, hi);
  mvst::DisparityMap d(w, h, dir);
  for (auto &v : d.values()) {
    v = u(rng);
  }
  return d;
}

class TempDir {
public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("mvst-test-" + std::to_string(std::random_device{}()) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

} // namespace oracle
