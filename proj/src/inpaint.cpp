#include <mvst/inpaint.hpp>

#include <mvst/parallel.hpp>

#include <algorithm>
#include <iterator>
#include <string>

namespace mvst {
namespace {

void require_some_valid(const MaskedImage &buf) {
  if (buf.valid.size() != buf.image.size()) {
    throw InvalidArgument("validity mask size does not match image");
  }
  if (buf.valid_count() == 0) {
    throw AllInvalidError("cannot in-paint a frame with no valid pixel");
  }
}

// Valid pixels indexed in column-major order (x * height + y), ascending.
std::vector<std::size_t> column_major_valid(const MaskedImage &buf) {
  std::vector<std::size_t> out;
  for (int x = 0; x < buf.width(); ++x) {
    for (int y = 0; y < buf.height(); ++y) {
      if (buf.is_valid(x, y)) {
        out.push_back(static_cast<std::size_t>(x) * static_cast<std::size_t>(buf.height()) +
                      static_cast<std::size_t>(y));
      }
    }
  }
  return out;
}

Rgb nearest_column_major(const MaskedImage &buf, const std::vector<std::size_t> &valid, int x,
                         int y) {
  const auto h = static_cast<std::size_t>(buf.height());
  const auto key = static_cast<std::size_t>(x) * h + static_cast<std::size_t>(y);
  auto it = std::lower_bound(valid.begin(), valid.end(), key);
  std::size_t pick = 0;
  if (it == valid.end()) {
    pick = valid.back();
  } else if (it == valid.begin()) {
    pick = *it;
  } else {
    const auto above = *it;
    const auto below = *std::prev(it);
    pick = (key - below) <= (above - key) ? below : above;
  }
  return buf.image(static_cast<int>(pick / h), static_cast<int>(pick % h));
}

// Length of the run of valid pixels starting at `start` and moving by `step`.
int valid_span(const MaskedImage &buf, int y, int start, int step) {
  int n = 0;
  for (int x = start; x >= 0 && x < buf.width() && buf.is_valid(x, y); x += step) {
    ++n;
  }
  return n;
}

void reflect_row(const MaskedImage &buf, Image &out, int y) {
  const int width = buf.width();
  int x = 0;
  while (x < width) {
    if (buf.is_valid(x, y)) {
      ++x;
      continue;
    }
    const int start = x;
    while (x < width && !buf.is_valid(x, y)) {
      ++x;
    }
    const int end = x - 1;

    const int left_span = start > 0 ? valid_span(buf, y, start - 1, -1) : 0;
    const int right_span = end < width - 1 ? valid_span(buf, y, end + 1, +1) : 0;
    const bool use_left = left_span > 0 && left_span >= right_span;
    // Anchor column next to the hole and step pointing into the hole.
    const int anchor = use_left ? start - 1 : end + 1;
    const int step = use_left ? +1 : -1;
    const int span = use_left ? left_span : right_span;
    const int length = end - start + 1;

    for (int k = 1; k <= length; ++k) {
      const int phase = (k - 1) % (2 * span);
      const int back = phase < span ? phase : 2 * span - 1 - phase;
      out(anchor + step * k, y) = buf.image(anchor - step * back, y);
    }
  }
}

void nearest_in_row(const MaskedImage &buf, Image &out, int y) {
  const int width = buf.width();
  int previous = -1;
  for (int x = 0; x < width; ++x) {
    if (buf.is_valid(x, y)) {
      previous = x;
      continue;
    }
    int next = x + 1;
    while (next < width && !buf.is_valid(next, y)) {
      ++next;
    }
    // Fill the whole run [x, next) in one go.
    for (int h = x; h < next; ++h) {
      int source = 0;
      if (previous < 0) {
        source = next;
      } else if (next >= width) {
        source = previous;
      } else {
        source = (h - previous) <= (next - h) ? previous : next;
      }
      out(h, y) = buf.image(source, y);
    }
    x = next - 1;
  }
}

std::vector<std::uint8_t> rows_with_valid(const MaskedImage &buf) {
  std::vector<std::uint8_t> has(static_cast<std::size_t>(buf.height()), 0);
  for (int y = 0; y < buf.height(); ++y) {
    for (int x = 0; x < buf.width(); ++x) {
      if (buf.is_valid(x, y)) {
        has[static_cast<std::size_t>(y)] = 1;
        break;
      }
    }
  }
  return has;
}

} // namespace

Image inpaint_reflect(const MaskedImage &buf, unsigned threads) {
  require_some_valid(buf);
  Image out = buf.image;
  const auto has_valid = rows_with_valid(buf);
  const bool any_empty_row = std::find(has_valid.begin(), has_valid.end(), 0) != has_valid.end();
  const auto valid_cm = any_empty_row ? column_major_valid(buf) : std::vector<std::size_t>{};

  parallel_for(static_cast<std::size_t>(buf.height()), threads, [&](std::size_t row) {
    const int y = static_cast<int>(row);
    if (has_valid[row] != 0) {
      reflect_row(buf, out, y);
      return;
    }
    for (int x = 0; x < buf.width(); ++x) {
      out(x, y) = nearest_column_major(buf, valid_cm, x, y);
    }
  });
  return out;
}

Image inpaint_nearest(const MaskedImage &buf, unsigned threads) {
  require_some_valid(buf);
  Image out = buf.image;
  const auto has_valid = rows_with_valid(buf);

  parallel_for(static_cast<std::size_t>(buf.height()), threads, [&](std::size_t row) {
    if (has_valid[row] != 0) {
      nearest_in_row(buf, out, static_cast<int>(row));
    }
  });

  const int height = buf.height();
  parallel_for(static_cast<std::size_t>(height), threads, [&](std::size_t row) {
    if (has_valid[row] != 0) {
      return;
    }
    const int y = static_cast<int>(row);
    int source = -1;
    for (int dist = 1; source < 0; ++dist) {
      if (y - dist >= 0 && has_valid[static_cast<std::size_t>(y - dist)] != 0) {
        source = y - dist;
      } else if (y + dist < height && has_valid[static_cast<std::size_t>(y + dist)] != 0) {
        source = y + dist;
      }
    }
    for (int x = 0; x < buf.width(); ++x) {
      out(x, y) = out(x, source);
    }
  });
  return out;
}

Inpainter make_inpainter(InpaintMethod method, unsigned threads) {
  if (method == InpaintMethod::Nearest) {
    return [threads](const MaskedImage &buf) { return inpaint_nearest(buf, threads); };
  }
  return [threads](const MaskedImage &buf) { return inpaint_reflect(buf, threads); };
}

InpaintMethod parse_inpaint_method(std::string_view name) {
  if (name == "reflect") {
    return InpaintMethod::Reflect;
  }
  if (name == "nearest") {
    return InpaintMethod::Nearest;
  }
  throw InvalidArgument("unknown in-paint method '" + std::string(name) + "'");
}

std::string_view to_string(InpaintMethod method) noexcept {
  return method == InpaintMethod::Nearest ? "nearest" : "reflect";
}

} // namespace mvst
