#pragma once

#include <mvst/pipeline.hpp>

namespace mvst {

/// Layered fronto-parallel test scene rendered into a consistent stereo pair.
/// Variant 0 is a textured background with one foreground rectangle; higher
/// variants add rectangles at other depths and change the textures. Nearer
/// layers carry more negative left disparities (and more positive right
/// ones); disparities are whole pixels so both views are exact.
StereoInput make_synthetic_scene(int width, int height, int variant = 0);

} // namespace mvst
