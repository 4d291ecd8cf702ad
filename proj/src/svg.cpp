#include "fnmr/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace fnmr {

namespace {

// Samples of the viridis colormap at 0, 1/8, ..., 1.
constexpr std::array<std::array<int, 3>, 9> kViridis = {{{68, 1, 84},
                                                          {71, 44, 122},
                                                          {59, 81, 139},
                                                          {44, 113, 142},
                                                          {33, 144, 141},
                                                          {39, 173, 129},
                                                          {92, 200, 99},
                                                          {170, 220, 50},
                                                          {253, 231, 37}}};

constexpr double kSize = 400.0;
constexpr double kMargin = 20.0;

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::array<int, 3> color_ramp(double x) {
  if (!std::isfinite(x)) x = 0.5;
  x = std::clamp(x, 0.0, 1.0) * static_cast<double>(kViridis.size() - 1);
  const auto lo = std::min<std::size_t>(static_cast<std::size_t>(x), kViridis.size() - 2);
  const double f = x - static_cast<double>(lo);
  std::array<int, 3> c{};
  for (int k = 0; k < 3; ++k)
    c[k] = static_cast<int>(std::lround(kViridis[lo][k] * (1.0 - f) + kViridis[lo + 1][k] * f));
  return c;
}

std::string scatter_svg(const Matrix& coords, const Vector& color, Index cx, Index cy) {
  require(coords.cols() > std::max(cx, cy), "scatter_svg: projection columns out of range");
  require(color.size() == coords.rows(), "scatter_svg: one color value per point required");
  const Index n = coords.rows();
  double xlo = 0, xhi = 1, ylo = 0, yhi = 1, clo = 0, chi = 1;
  if (n > 0) {
    xlo = coords.col(cx).minCoeff();
    xhi = coords.col(cx).maxCoeff();
    ylo = coords.col(cy).minCoeff();
    yhi = coords.col(cy).maxCoeff();
    clo = color.minCoeff();
    chi = color.maxCoeff();
  }
  const auto scale = [](double v, double lo, double hi) {
    return hi > lo ? (v - lo) / (hi - lo) : 0.5;
  };
  const double span = kSize - 2.0 * kMargin;
  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\" viewBox=\"0 0 400 400\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"400\" height=\"400\" fill=\"white\"/>\n";
  s += "<rect x=\"20\" y=\"20\" width=\"360\" height=\"360\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
  s += "<g>\n";
  char hex[8];
  for (Index i = 0; i < n; ++i) {
    const double px = kMargin + span * scale(coords(i, cx), xlo, xhi);
    const double py = kSize - kMargin - span * scale(coords(i, cy), ylo, yhi);
    const auto c = color_ramp(scale(color(i), clo, chi));
    std::snprintf(hex, sizeof(hex), "#%02x%02x%02x", c[0], c[1], c[2]);
    s += "<circle cx=\"" + fixed(px) + "\" cy=\"" + fixed(py) + "\" r=\"2.5\" fill=\"" + hex + "\"/>\n";
  }
  s += "</g>\n</svg>\n";
  return s;
}

std::vector<std::filesystem::path> render_scatter_svg(const Embedding& emb, const Vector& color,
                                                      const std::filesystem::path& path) {
  require(emb.dim() >= 2, "render_scatter_svg: embedding must have at least two dimensions");
  std::vector<std::pair<std::filesystem::path, Index>> jobs = {{path, 1}};
  if (emb.dim() >= 3) {
    std::filesystem::path alt = path;
    alt.replace_filename(path.stem().string() + "_13.svg");
    jobs.emplace_back(alt, 2);
  }
  std::vector<std::filesystem::path> written;
  for (const auto& [p, cy] : jobs) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << scatter_svg(emb.coords, color, 0, cy);
    if (!out) throw Error("cannot write " + p.string());
    written.push_back(p);
  }
  return written;
}

}  // namespace fnmr
