#pragma once

#include <array>
#include <string>

#include "cubecolor/color_features.hpp"
#include "cubecolor/cube.hpp"

namespace cubecolor {

/// The 54 sticker features of one cube, face-major and row-major within a
/// face; the center of face i sits at index 9i + 4.
class CubeObservation {
 public:
  explicit CubeObservation(const std::array<FeatureVector3, kStickers>& blocks);

  const FeatureVector3& operator[](int i) const { return blocks_[static_cast<std::size_t>(i)]; }
  const std::array<FeatureVector3, kStickers>& blocks() const noexcept { return blocks_; }

 private:
  std::array<FeatureVector3, kStickers> blocks_;
};

/// Face label per sticker: nine stickers per label, center of face i has label i.
class FaceLabeling {
 public:
  explicit FaceLabeling(const std::array<int, kStickers>& labels);

  int operator[](int i) const { return labels_[static_cast<std::size_t>(i)]; }
  const std::array<int, kStickers>& labels() const noexcept { return labels_; }

  friend bool operator==(const FaceLabeling&, const FaceLabeling&) = default;

 private:
  std::array<int, kStickers> labels_;
};

/// Diagonal of a weight matrix over (hue, saturation, value).
struct ChannelWeights {
  double hue = 1.0;
  double saturation = 1.0;
  double value = 1.0;

  friend bool operator==(const ChannelWeights&, const ChannelWeights&) = default;
};

/// Color name of each face's center sticker; a bijection onto the six colors.
class CenterColors {
 public:
  /// U white, R red, F green, D yellow, L orange, B blue.
  CenterColors();
  explicit CenterColors(const std::array<CubeColor, kFaces>& colors);

  CubeColor operator[](int face) const { return colors_[static_cast<std::size_t>(face)]; }
  /// Face whose center has color c.
  int face_of(CubeColor c) const;
  const std::array<CubeColor, kFaces>& colors() const noexcept { return colors_; }

 private:
  std::array<CubeColor, kFaces> colors_;
};

/// Per-color distance weights; a label's weights are those of its center color.
class ColorWeights {
 public:
  ColorWeights();
  explicit ColorWeights(const std::array<ChannelWeights, kFaces>& by_color);

  const ChannelWeights& operator[](CubeColor c) const {
    return by_color_[static_cast<std::size_t>(color_index(c))];
  }

 private:
  std::array<ChannelWeights, kFaces> by_color_;
};

/// Counts of neighbor queries per hierarchic pass.
struct WlhpTrace {
  int pass1_queries = 0;
  int pass1_neighbors = 0;
  int pass2_queries = 0;
  int pass2_neighbors = 0;
};

/// sqrt(wh^2 dh^2 + ws^2 ds^2 + wv^2 dv^2) with dh the circular hue gap
/// divided by 360.
double block_distance(const FeatureVector3& a, const FeatureVector3& b,
                      const ChannelWeights& w = {});

FaceLabeling knn_baseline(const CubeObservation& obs);

FaceLabeling wlhp(const CubeObservation& obs, WlhpTrace* trace = nullptr);

inline constexpr double kDefaultHueWeight = 4.0;

FaceLabeling wlhp_star(const CubeObservation& obs, double hue_weight = kDefaultHueWeight);

FaceLabeling dwlp(const CubeObservation& obs, const CenterColors& centers,
                  const ColorWeights& weights);

/// white (0,2,1); yellow, green, blue (4,1,1); red, orange (6,1,2).
ColorWeights default_color_weights();
ColorWeights identity_color_weights();

/// Structured-text configuration for the online recognizers.
struct RecognizerConfig {
  CenterColors centers;
  ColorWeights weights = default_color_weights();
  double hue_weight = kDefaultHueWeight;
};

/// JSON: {"centers": {"U": "white", ...}, "weights": {"white": [wh, ws, wv], ...},
/// "hue_weight": 4}. Every key is optional and falls back to the defaults.
RecognizerConfig load_recognizer_config(const std::string& path);

}  // namespace cubecolor
