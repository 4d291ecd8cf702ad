#pragma once

#include "fnmr/common.hpp"
#include "fnmr/embed.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace fnmr {

/// Viridis-like ramp; `x` is clamped to [0, 1].
std::array<int, 3> color_ramp(double x);

/// Scatter plot of columns (cx, cy) colored by `color`, as SVG text.
std::string scatter_svg(const Matrix& coords, const Vector& color, Index cx = 0, Index cy = 1);

/// Writes the (1,2) projection to `path`; 3-D embeddings also get the (1,3)
/// projection next to it as `<stem>_13.svg`. Returns the files written.
std::vector<std::filesystem::path> render_scatter_svg(const Embedding& emb, const Vector& color,
                                                      const std::filesystem::path& path);

}  // namespace fnmr
