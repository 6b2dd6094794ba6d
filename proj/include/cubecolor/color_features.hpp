#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace cubecolor {

struct Rgb8 {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
};

/// Row-major 8-bit RGB raster.
class RgbImage {
 public:
  RgbImage(int width, int height);
  RgbImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  const std::vector<std::uint8_t>& data() const noexcept { return pixels_; }

  Rgb8 at(int x, int y) const;
  void set(int x, int y, Rgb8 c);

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

/// h in degrees [0, 360), s and v in [0, 1]. Achromatic pixels have h = 0.
struct HsvPixel {
  double h = 0.0;
  double s = 0.0;
  double v = 0.0;

  friend bool operator==(const HsvPixel&, const HsvPixel&) = default;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Corners of one cube face in image coordinates, ordered top-left,
/// top-right, bottom-right, bottom-left. Pixel (x, y) covers the unit
/// square [x, x+1) x [y, y+1), so the full image is the quad
/// (0,0) (W,0) (W,H) (0,H).
class FaceQuad {
 public:
  /// Throws DegenerateQuad unless the corners form a strictly convex
  /// quadrilateral with consistent winding.
  explicit FaceQuad(const std::array<Point2, 4>& corners);

  const std::array<Point2, 4>& corners() const noexcept { return corners_; }

 private:
  std::array<Point2, 4> corners_;
};

/// Row-major HSV raster. Rectified faces are square with side divisible by 3.
class HsvRaster {
 public:
  HsvRaster(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  const HsvPixel& at(int x, int y) const { return pixels_[index(x, y)]; }
  HsvPixel& at(int x, int y) { return pixels_[index(x, y)]; }
  const std::vector<HsvPixel>& pixels() const noexcept { return pixels_; }

 private:
  std::size_t index(int x, int y) const;

  int width_;
  int height_;
  std::vector<HsvPixel> pixels_;
};

using RectifiedFace = HsvRaster;

/// Pixels of one sticker; never empty.
class BlockPatch {
 public:
  explicit BlockPatch(std::vector<HsvPixel> pixels);
  BlockPatch(std::vector<HsvPixel> pixels, int x0, int y0, int width, int height);

  const std::vector<HsvPixel>& pixels() const noexcept { return pixels_; }
  int x0() const noexcept { return x0_; }
  int y0() const noexcept { return y0_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

 private:
  std::vector<HsvPixel> pixels_;
  int x0_ = 0;
  int y0_ = 0;
  int width_ = 0;
  int height_ = 0;
};

/// Per-channel histogram modes (bin centers), same units as HsvPixel.
struct FeatureVector3 {
  double h = 0.0;
  double s = 0.0;
  double v = 0.0;

  friend bool operator==(const FeatureVector3&, const FeatureVector3&) = default;
};

using FeatureVector16 = std::array<double, 16>;

struct HistogramBins {
  int hue = 36;
  int saturation = 32;
  int value = 32;
};

/// Half-open interval [lo, hi). For s and v an upper bound of 1 is inclusive.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  friend bool operator==(const Interval&, const Interval&) = default;
};

struct PartitionCell {
  Interval hue{0.0, 360.0};
  Interval saturation{0.0, 1.0};
  Interval value{0.0, 1.0};

  bool contains(const HsvPixel& p) const;
  friend bool operator==(const PartitionCell&, const PartitionCell&) = default;
};

/// Exactly 16 axis-aligned cells that cover h x s x v = [0,360) x [0,1] x [0,1]
/// exactly once. Validated at construction.
class UnevenPartition {
 public:
  explicit UnevenPartition(std::vector<PartitionCell> cells);

  /// Two achromatic cells (dark, white/gray) plus 14 chromatic hue
  /// intervals, dense around red/orange/yellow.
  static UnevenPartition standard();

  const std::vector<PartitionCell>& cells() const noexcept { return cells_; }

  /// Index of the unique cell containing p.
  std::size_t cell_of(const HsvPixel& p) const;

  nlohmann::json to_json() const;
  static UnevenPartition from_json(const nlohmann::json& j);
  static UnevenPartition load(const std::string& path);

  friend bool operator==(const UnevenPartition&, const UnevenPartition&) = default;

 private:
  std::vector<PartitionCell> cells_;
};

HsvPixel rgb_to_hsv(Rgb8 pixel);
/// Same formula on real-valued channels in [0, 255].
HsvPixel rgb_to_hsv(double r, double g, double b);

/// Converts the whole image without resampling.
HsvRaster to_hsv(const RgbImage& image);

/// Warps the face quad onto a size x size square with bilinear sampling
/// (edge-clamped) and converts to HSV. Throws DimensionError unless size
/// is a positive multiple of 3.
RectifiedFace rectify_face(const RgbImage& image, const FaceQuad& quad, int size = 240);

/// Nine sticker patches in row-major order; margin_fraction of each cell
/// is trimmed from every side.
std::array<BlockPatch, 9> split_blocks(const RectifiedFace& face, double margin_fraction = 0.2);

FeatureVector3 feature_3dhsv(const BlockPatch& patch, const HistogramBins& bins = {});

FeatureVector16 feature_16dhsv(const BlockPatch& patch, const UnevenPartition& partition);

}  // namespace cubecolor
