#pragma once

#include <mvst/image.hpp>

#include <functional>
#include <string_view>

namespace mvst {

// Raised when a frame has no valid pixel to copy from.
class AllInvalidError : public Error {
public:
  using Error::Error;
};

enum class InpaintMethod { Reflect, Nearest };

/// Fills each horizontal run of invalid pixels by mirroring the valid span
/// next to it. The side with the longer adjacent valid span is used (ties go
/// left) and the mirror bounces back and forth when the hole is longer than
/// that span. Rows without any valid pixel copy the valid pixel nearest in
/// column-major order over the whole frame.
Image inpaint_reflect(const MaskedImage &buf, unsigned threads = 1);

/// Each invalid pixel copies the nearest valid pixel in its row (ties go
/// left). Rows with no valid pixel copy the same column of the nearest row
/// that has one (ties go up), after that row has been filled.
Image inpaint_nearest(const MaskedImage &buf, unsigned threads = 1);

using Inpainter = std::function<Image(const MaskedImage &)>;

Inpainter make_inpainter(InpaintMethod method, unsigned threads = 1);

InpaintMethod parse_inpaint_method(std::string_view name);
std::string_view to_string(InpaintMethod method) noexcept;

} // namespace mvst
