#include "cubecolor/color_features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "cubecolor/errors.hpp"

namespace cubecolor {

namespace {

constexpr double kHueRange = 360.0;

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Maps the unit square onto a quadrilateral: (0,0)->c0, (1,0)->c1,
// (1,1)->c2, (0,1)->c3.
struct SquareToQuad {
  double a, b, c, d, e, f, g, h;

  explicit SquareToQuad(const std::array<Point2, 4>& q) {
    const double dx1 = q[1].x - q[2].x, dx2 = q[3].x - q[2].x;
    const double dx3 = q[0].x - q[1].x + q[2].x - q[3].x;
    const double dy1 = q[1].y - q[2].y, dy2 = q[3].y - q[2].y;
    const double dy3 = q[0].y - q[1].y + q[2].y - q[3].y;
    if (dx3 == 0.0 && dy3 == 0.0) {
      g = h = 0.0;
    } else {
      const double det = dx1 * dy2 - dx2 * dy1;
      g = (dx3 * dy2 - dx2 * dy3) / det;
      h = (dx1 * dy3 - dx3 * dy1) / det;
    }
    a = q[1].x - q[0].x + g * q[1].x;
    b = q[3].x - q[0].x + h * q[3].x;
    c = q[0].x;
    d = q[1].y - q[0].y + g * q[1].y;
    e = q[3].y - q[0].y + h * q[3].y;
    f = q[0].y;
  }

  Point2 operator()(double u, double v) const {
    const double w = g * u + h * v + 1.0;
    return {(a * u + b * v + c) / w, (d * u + e * v + f) / w};
  }
};

struct RgbSample {
  double r, g, b;
};

RgbSample sample_bilinear(const RgbImage& img, double px, double py) {
  // Pixel centers sit at half-integer coordinates.
  // Coordinates within 1e-9 of a pixel center snap to it, so axis-aligned
  // warps reproduce source pixels exactly.
  auto snap = [](double t) {
    const double r = std::round(t);
    return std::abs(t - r) < 1e-9 ? r : t;
  };
  const double sx = snap(px - 0.5);
  const double sy = snap(py - 0.5);
  const double fx0 = std::floor(sx);
  const double fy0 = std::floor(sy);
  const double tx = sx - fx0;
  const double ty = sy - fy0;
  auto clamp_x = [&](double x) { return static_cast<int>(std::clamp(x, 0.0, img.width() - 1.0)); };
  auto clamp_y = [&](double y) { return static_cast<int>(std::clamp(y, 0.0, img.height() - 1.0)); };
  const int x0 = clamp_x(fx0), x1 = clamp_x(fx0 + 1.0);
  const int y0 = clamp_y(fy0), y1 = clamp_y(fy0 + 1.0);

  const Rgb8 p00 = img.at(x0, y0), p10 = img.at(x1, y0);
  const Rgb8 p01 = img.at(x0, y1), p11 = img.at(x1, y1);
  auto mix = [&](double v00, double v10, double v01, double v11) {
    const double top = v00 + (v10 - v00) * tx;
    const double bottom = v01 + (v11 - v01) * tx;
    return top + (bottom - top) * ty;
  };
  return {mix(p00.r, p10.r, p01.r, p11.r), mix(p00.g, p10.g, p01.g, p11.g),
          mix(p00.b, p10.b, p01.b, p11.b)};
}

bool in_unit_channel(double x, const Interval& iv) {
  return x >= iv.lo && (x < iv.hi || (iv.hi >= 1.0 && x <= 1.0));
}

void check_interval(const Interval& iv, double domain_hi, const char* what) {
  if (!(iv.lo >= 0.0 && iv.hi <= domain_hi && iv.lo < iv.hi)) {
    throw InvalidPartition(std::string("cell ") + what + " interval [" + std::to_string(iv.lo) + ", " +
                           std::to_string(iv.hi) + ") is empty or outside [0, " +
                           std::to_string(domain_hi) + "]");
  }
}

std::vector<double> breakpoints(const std::vector<PartitionCell>& cells, double domain_hi,
                                Interval PartitionCell::*axis) {
  std::set<double> pts{0.0, domain_hi};
  for (const auto& c : cells) {
    pts.insert((c.*axis).lo);
    pts.insert((c.*axis).hi);
  }
  return {pts.begin(), pts.end()};
}

int histogram_mode(const std::vector<HsvPixel>& px, double HsvPixel::*channel, double range,
                   int bins) {
  // Bin b covers [b * width, (b + 1) * width); the top bin also takes the
  // range maximum.
  const double width = range / bins;
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  for (const auto& p : px) {
    const double x = p.*channel;
    int idx = std::clamp(static_cast<int>(x / width), 0, bins - 1);
    if (idx > 0 && x < idx * width) --idx;
    if (idx + 1 < bins && x >= (idx + 1) * width) ++idx;
    ++counts[static_cast<std::size_t>(idx)];
  }
  // max_element returns the first maximum, i.e. the lowest bin on ties.
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

}  // namespace

RgbImage::RgbImage(int width, int height)
    : RgbImage(width, height,
               std::vector<std::uint8_t>(
                   width > 0 && height > 0 ? static_cast<std::size_t>(width) * height * 3 : 0)) {}

RgbImage::RgbImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width <= 0 || height <= 0) {
    throw DimensionError("image dimensions must be positive");
  }
  if (pixels_.size() != static_cast<std::size_t>(width) * height * 3) {
    throw DimensionError("pixel buffer length must equal width * height * 3");
  }
}

Rgb8 RgbImage::at(int x, int y) const {
  const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
}

void RgbImage::set(int x, int y, Rgb8 c) {
  const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  pixels_[i] = c.r;
  pixels_[i + 1] = c.g;
  pixels_[i + 2] = c.b;
}

FaceQuad::FaceQuad(const std::array<Point2, 4>& corners) : corners_(corners) {
  int positive = 0;
  int negative = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double z = cross(corners[i], corners[(i + 1) % 4], corners[(i + 2) % 4]);
    if (!std::isfinite(z)) throw DegenerateQuad("face quad has non-finite corners");
    if (z > 0.0) ++positive;
    if (z < 0.0) ++negative;
  }
  if (positive != 4 && negative != 4) {
    throw DegenerateQuad("face quad corners are collinear or not consistently wound");
  }
}

HsvRaster::HsvRaster(int width, int height) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw DimensionError("raster dimensions must be positive");
  pixels_.resize(static_cast<std::size_t>(width) * height);
}

std::size_t HsvRaster::index(int x, int y) const {
  return static_cast<std::size_t>(y) * width_ + x;
}

BlockPatch::BlockPatch(std::vector<HsvPixel> pixels)
    : BlockPatch(std::move(pixels), 0, 0, 0, 1) {
  width_ = static_cast<int>(pixels_.size());
}

BlockPatch::BlockPatch(std::vector<HsvPixel> pixels, int x0, int y0, int width, int height)
    : pixels_(std::move(pixels)), x0_(x0), y0_(y0), width_(width), height_(height) {
  if (pixels_.empty()) throw DimensionError("block patch must not be empty");
}

bool PartitionCell::contains(const HsvPixel& p) const {
  return p.h >= hue.lo && p.h < hue.hi && in_unit_channel(p.s, saturation) &&
         in_unit_channel(p.v, value);
}

UnevenPartition::UnevenPartition(std::vector<PartitionCell> cells) : cells_(std::move(cells)) {
  if (cells_.size() != 16) {
    throw InvalidPartition("partition must have exactly 16 cells, got " +
                           std::to_string(cells_.size()));
  }
  for (const auto& c : cells_) {
    check_interval(c.hue, kHueRange, "hue");
    check_interval(c.saturation, 1.0, "saturation");
    check_interval(c.value, 1.0, "value");
  }
  // Every elementary box of the breakpoint grid must lie in exactly one
  // cell; testing its midpoint is exact for half-open boxes.
  const auto hs = breakpoints(cells_, kHueRange, &PartitionCell::hue);
  const auto ss = breakpoints(cells_, 1.0, &PartitionCell::saturation);
  const auto vs = breakpoints(cells_, 1.0, &PartitionCell::value);
  for (std::size_t i = 0; i + 1 < hs.size(); ++i) {
    for (std::size_t j = 0; j + 1 < ss.size(); ++j) {
      for (std::size_t k = 0; k + 1 < vs.size(); ++k) {
        const HsvPixel mid{(hs[i] + hs[i + 1]) / 2, (ss[j] + ss[j + 1]) / 2,
                           (vs[k] + vs[k + 1]) / 2};
        const auto hits = std::count_if(cells_.begin(), cells_.end(),
                                        [&](const PartitionCell& c) { return c.contains(mid); });
        if (hits != 1) {
          throw InvalidPartition(std::string(hits == 0 ? "gap" : "overlap") + " at h=" +
                                 std::to_string(mid.h) + " s=" + std::to_string(mid.s) +
                                 " v=" + std::to_string(mid.v));
        }
      }
    }
  }
}

UnevenPartition UnevenPartition::standard() {
  constexpr double kDark = 0.15;
  constexpr double kGray = 0.15;
  constexpr std::array<double, 15> kHueEdges{0,   10,  22,  35,  50,  65,  90, 150,
                                             190, 250, 290, 320, 335, 345, 360};
  std::vector<PartitionCell> cells;
  cells.push_back({{0, 360}, {0, 1}, {0, kDark}});
  cells.push_back({{0, 360}, {0, kGray}, {kDark, 1}});
  for (std::size_t i = 0; i + 1 < kHueEdges.size(); ++i) {
    cells.push_back({{kHueEdges[i], kHueEdges[i + 1]}, {kGray, 1}, {kDark, 1}});
  }
  return UnevenPartition(std::move(cells));
}

std::size_t UnevenPartition::cell_of(const HsvPixel& p) const {
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i].contains(p)) return i;
  }
  throw DimensionError("HSV value outside the partition domain");
}

nlohmann::json UnevenPartition::to_json() const {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : cells_) {
    cells.push_back({{"hue", {c.hue.lo, c.hue.hi}},
                     {"s", {c.saturation.lo, c.saturation.hi}},
                     {"v", {c.value.lo, c.value.hi}}});
  }
  return {{"cells", cells}};
}

UnevenPartition UnevenPartition::from_json(const nlohmann::json& j) {
  try {
    std::vector<PartitionCell> cells;
    for (const auto& c : j.at("cells")) {
      PartitionCell cell;
      cell.hue = {c.at("hue").at(0).get<double>(), c.at("hue").at(1).get<double>()};
      if (c.contains("s")) cell.saturation = {c["s"].at(0).get<double>(), c["s"].at(1).get<double>()};
      if (c.contains("v")) cell.value = {c["v"].at(0).get<double>(), c["v"].at(1).get<double>()};
      cells.push_back(cell);
    }
    return UnevenPartition(std::move(cells));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidPartition(std::string("malformed partition: ") + e.what());
  }
}

UnevenPartition UnevenPartition::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open partition file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidPartition(path + ": " + e.what());
  }
  return from_json(j);
}

HsvPixel rgb_to_hsv(Rgb8 pixel) { return rgb_to_hsv(pixel.r, pixel.g, pixel.b); }

HsvPixel rgb_to_hsv(double r, double g, double b) {
  const double hi = std::max({r, g, b});
  const double lo = std::min({r, g, b});
  const double delta = hi - lo;
  HsvPixel out;
  out.v = hi / 255.0;
  out.s = hi > 0.0 ? delta / hi : 0.0;
  if (delta > 0.0) {
    double h;
    if (hi == r) {
      h = 60.0 * (g - b) / delta;
    } else if (hi == g) {
      h = 60.0 * (2.0 + (b - r) / delta);
    } else {
      h = 60.0 * (4.0 + (r - g) / delta);
    }
    if (h < 0.0) h += kHueRange;
    if (h >= kHueRange) h -= kHueRange;
    out.h = h;
  }
  return out;
}

HsvRaster to_hsv(const RgbImage& image) {
  HsvRaster out(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) out.at(x, y) = rgb_to_hsv(image.at(x, y));
  }
  return out;
}

RectifiedFace rectify_face(const RgbImage& image, const FaceQuad& quad, int size) {
  if (size <= 0 || size % 3 != 0) {
    throw DimensionError("rectification size must be a positive multiple of 3, got " +
                         std::to_string(size));
  }
  const SquareToQuad warp(quad.corners());
  RectifiedFace out(size, size);
  for (int row = 0; row < size; ++row) {
    const double v = (row + 0.5) / size;
    for (int col = 0; col < size; ++col) {
      const double u = (col + 0.5) / size;
      const Point2 src = warp(u, v);
      const RgbSample s = sample_bilinear(image, src.x, src.y);
      out.at(col, row) = rgb_to_hsv(s.r, s.g, s.b);
    }
  }
  return out;
}

std::array<BlockPatch, 9> split_blocks(const RectifiedFace& face, double margin_fraction) {
  if (face.width() != face.height() || face.width() % 3 != 0) {
    throw DimensionError("rectified face must be square with side divisible by 3");
  }
  if (!(margin_fraction >= 0.0 && margin_fraction < 0.5)) {
    throw DimensionError("margin fraction must lie in [0, 0.5)");
  }
  const int cell = face.width() / 3;
  int margin = static_cast<int>(std::lround(margin_fraction * cell));
  if (2 * margin >= cell) margin = (cell - 1) / 2;
  const int side = cell - 2 * margin;

  auto make = [&](int index) {
    const int x0 = (index % 3) * cell + margin;
    const int y0 = (index / 3) * cell + margin;
    std::vector<HsvPixel> px;
    px.reserve(static_cast<std::size_t>(side) * side);
    for (int y = y0; y < y0 + side; ++y) {
      for (int x = x0; x < x0 + side; ++x) px.push_back(face.at(x, y));
    }
    return BlockPatch(std::move(px), x0, y0, side, side);
  };
  return {make(0), make(1), make(2), make(3), make(4), make(5), make(6), make(7), make(8)};
}

FeatureVector3 feature_3dhsv(const BlockPatch& patch, const HistogramBins& bins) {
  if (bins.hue < 1 || bins.saturation < 1 || bins.value < 1) {
    throw DimensionError("histogram bin counts must be at least 1");
  }
  const auto& px = patch.pixels();
  const int h = histogram_mode(px, &HsvPixel::h, kHueRange, bins.hue);
  const int s = histogram_mode(px, &HsvPixel::s, 1.0, bins.saturation);
  const int v = histogram_mode(px, &HsvPixel::v, 1.0, bins.value);
  return {(h + 0.5) * (kHueRange / bins.hue), (s + 0.5) * (1.0 / bins.saturation),
          (v + 0.5) * (1.0 / bins.value)};
}

FeatureVector16 feature_16dhsv(const BlockPatch& patch, const UnevenPartition& partition) {
  std::array<std::size_t, 16> counts{};
  for (const auto& p : patch.pixels()) ++counts[partition.cell_of(p)];
  FeatureVector16 out{};
  const double n = static_cast<double>(patch.pixels().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<double>(counts[i]) / n;
  return out;
}

}  // namespace cubecolor
