#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cubecolor/color_features.hpp"
#include "cubecolor/cube.hpp"
#include "cubecolor/online_recog.hpp"

namespace cubecolor {

/// Capture circumstances A..E.
bool is_circumstance(char tag);

/// One manifest entry: an image showing two faces of a cube.
struct AnnotationRecord {
  std::string image_path;  ///< resolved against the manifest's directory
  std::size_t line = 0;
  std::string group_id;
  char circumstance = 'A';
  std::array<std::array<Point2, 4>, 2> quads{};
  std::array<int, 2> faces{};
  std::array<std::array<CubeColor, kStickersPerFace>, 2> labels{};
};

/// Line-based manifest, one record per non-blank, non-'#' line:
///
///   <image> <group> <tag> <8 numbers: quad 1> <8 numbers: quad 2> <face 1> <face 2> <labels 1> <labels 2>
///
/// Quads list x y for the top-left, top-right, bottom-right, bottom-left
/// corners. Faces are letters from URFDLB; labels are nine color letters
/// (W Y R O G B) in row-major order. Set check_images to false to skip
/// decoding the referenced images.
std::vector<AnnotationRecord> load_manifest(const std::string& path, bool check_images = true);

/// Records grouped by group id, in order of first appearance.
std::vector<std::vector<AnnotationRecord>> group_annotations(
    const std::vector<AnnotationRecord>& records);

struct FeatureConfig {
  int rectify_size = 240;
  double margin = 0.2;
  HistogramBins bins;
  UnevenPartition partition = UnevenPartition::standard();
};

enum class RecordSource { Real, Synthetic };

/// One cube state: features and ground truth for all 54 stickers.
struct CubeStateRecord {
  std::string state_id;
  char circumstance = 'A';
  RecordSource source = RecordSource::Synthetic;
  std::uint64_t seed = 0;  ///< synthetic only
  std::array<FeatureVector3, kStickers> features3{};
  std::array<FeatureVector16, kStickers> features16{};
  std::array<CubeColor, kStickers> colors{};

  CubeObservation observation() const { return CubeObservation(features3); }
  CenterColors centers() const;

  friend bool operator==(const CubeStateRecord&, const CubeStateRecord&) = default;
};

/// Throws InvalidRecord unless there are nine stickers per color and the
/// six centers are distinct.
void validate_record(const CubeStateRecord& record);

/// Rectifies both faces of each of the three images and assembles one record.
CubeStateRecord extract_record(const std::vector<AnnotationRecord>& group,
                               const FeatureConfig& config = {});

/// Synthetic color drift: per-color base HSV values, the ranges one cube
/// state's global drift is drawn from, and per-sticker noise.
struct DriftConfig {
  std::array<HsvPixel, kFaces> base_colors{{
      {0.0, 0.03, 0.95},    // white
      {55.0, 0.85, 0.9},    // yellow
      {355.0, 0.9, 0.8},    // red
      {20.0, 0.9, 0.85},    // orange
      {120.0, 0.8, 0.7},    // green
      {220.0, 0.85, 0.7},   // blue
  }};
  Interval hue_shift{-10.0, 10.0};  ///< degrees
  Interval saturation_scale{0.6, 1.05};
  Interval value_scale{0.5, 1.1};
  HsvPixel noise_sigma{2.0, 0.02, 0.02};
  std::uint64_t seed = 42;
  char circumstance = 'A';
  std::string id_prefix = "s";

  /// Throws DimensionError on non-positive scales, negative sigma or
  /// out-of-range base colors.
  void validate() const;
};

/// Default ranges with every drift collapsed to the identity; noise kept.
DriftConfig undrifted_config();

/// Each state draws a uniform 9-per-color arrangement with the default
/// center scheme, one global (hue shift, s scale, v scale) drift, and
/// per-sticker Gaussian noise. 3DHSV is the noisy drifted value; 16DHSV is
/// the one-hot cell of the drifted color before noise. State i uses an RNG stream split from the
/// master seed, so states are independent of generation order.
std::vector<CubeStateRecord> generate_synthetic(
    const DriftConfig& config, int n_states,
    const UnevenPartition& partition = UnevenPartition::standard());

/// Single state; equal to generate_synthetic(config, n)[index] for any n > index.
CubeStateRecord generate_synthetic_state(const DriftConfig& config, int index,
                                         const UnevenPartition& partition);

/// One row per sticker: state_id, source, face, position, circumstance,
/// label, h, s, v, c0..c15. Reals use 17 significant digits.
void export_features(const std::vector<CubeStateRecord>& records, const std::string& path);
std::string features_to_csv(const std::vector<CubeStateRecord>& records);

std::vector<CubeStateRecord> import_features(const std::string& path);
std::vector<CubeStateRecord> features_from_csv(const std::string& text,
                                               const std::string& source_name = "<memory>");

}  // namespace cubecolor
