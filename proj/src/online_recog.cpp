#include "cubecolor/online_recog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <vector>

#include <json.hpp>

#include "cubecolor/errors.hpp"

namespace cubecolor {

namespace {

constexpr ChannelWeights kUnitWeights{1.0, 1.0, 1.0};

/// Unlabeled non-center stickers. Centers carry fixed labels from the start.
class Pool {
 public:
  Pool() {
    for (int i = 0; i < kStickers; ++i) free_[static_cast<std::size_t>(i)] = i % 9 != 4;
  }

  bool empty() const { return std::none_of(free_.begin(), free_.end(), [](bool b) { return b; }); }

  void take(int i) { free_[static_cast<std::size_t>(i)] = false; }

  /// The k free stickers nearest to query, ordered by (distance, index).
  std::vector<int> nearest(const CubeObservation& obs, const FeatureVector3& query, int k,
                           const ChannelWeights& w) const {
    std::vector<std::pair<double, int>> cand;
    for (int i = 0; i < kStickers; ++i) {
      if (free_[static_cast<std::size_t>(i)]) cand.emplace_back(block_distance(query, obs[i], w), i);
    }
    const auto take_n = std::min<std::size_t>(static_cast<std::size_t>(k), cand.size());
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take_n), cand.end());
    std::vector<int> out;
    for (std::size_t i = 0; i < take_n; ++i) out.push_back(cand[i].second);
    return out;
  }

  const std::array<bool, kStickers>& free() const { return free_; }

 private:
  std::array<bool, kStickers> free_{};
};

std::array<int, kStickers> seeded_labels() {
  std::array<int, kStickers> labels;
  labels.fill(-1);
  for (int f = 0; f < kFaces; ++f) labels[static_cast<std::size_t>(center_index(f))] = f;
  return labels;
}

void claim(std::array<int, kStickers>& labels, Pool& pool, int sticker, int face) {
  labels[static_cast<std::size_t>(sticker)] = face;
  pool.take(sticker);
}

/// Two-level propagation for the given faces: every center takes its 2
/// nearest free stickers, then each of those takes its 3 nearest.
void hierarchic_propagation(const CubeObservation& obs, const std::vector<int>& faces,
                            const ChannelWeights& w, std::array<int, kStickers>& labels, Pool& pool,
                            WlhpTrace* trace) {
  std::array<std::vector<int>, kFaces> first_level;
  for (int f : faces) {
    auto near = pool.nearest(obs, obs[center_index(f)], 2, w);
    if (trace) {
      ++trace->pass1_queries;
      trace->pass1_neighbors += static_cast<int>(near.size());
    }
    for (int m : near) claim(labels, pool, m, f);
    first_level[static_cast<std::size_t>(f)] = std::move(near);
  }
  for (int f : faces) {
    for (int m : first_level[static_cast<std::size_t>(f)]) {
      const auto second_level = pool.nearest(obs, obs[m], 3, w);
      if (trace) {
        ++trace->pass2_queries;
        trace->pass2_neighbors += static_cast<int>(second_level.size());
      }
      for (int n : second_level) claim(labels, pool, n, f);
    }
  }
}

ChannelWeights parse_weights(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

}  // namespace

CubeObservation::CubeObservation(const std::array<FeatureVector3, kStickers>& blocks)
    : blocks_(blocks) {
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& b = blocks_[i];
    if (!(b.h >= 0.0 && b.h < 360.0 && b.s >= 0.0 && b.s <= 1.0 && b.v >= 0.0 && b.v <= 1.0)) {
      throw DimensionError("sticker " + std::to_string(i) + " feature outside HSV ranges");
    }
  }
}

FaceLabeling::FaceLabeling(const std::array<int, kStickers>& labels) : labels_(labels) {
  std::array<int, kFaces> count{};
  for (int l : labels_) {
    if (l < 0 || l >= kFaces) throw DimensionError("face label out of range");
    ++count[static_cast<std::size_t>(l)];
  }
  for (int f = 0; f < kFaces; ++f) {
    if (count[static_cast<std::size_t>(f)] != kStickersPerFace) {
      throw DimensionError("face " + std::to_string(f) + " has " +
                           std::to_string(count[static_cast<std::size_t>(f)]) +
                           " stickers, expected 9");
    }
    if (labels_[static_cast<std::size_t>(center_index(f))] != f) {
      throw DimensionError("center of face " + std::to_string(f) + " is relabeled");
    }
  }
}

CenterColors::CenterColors()
    : CenterColors({CubeColor::White, CubeColor::Red, CubeColor::Green, CubeColor::Yellow,
                    CubeColor::Orange, CubeColor::Blue}) {}

CenterColors::CenterColors(const std::array<CubeColor, kFaces>& colors) : colors_(colors) {
  std::array<bool, kFaces> seen{};
  for (auto c : colors_) {
    const auto i = static_cast<std::size_t>(color_index(c));
    if (i >= seen.size() || seen[i]) throw DimensionError("center colors must be six distinct colors");
    seen[i] = true;
  }
}

int CenterColors::face_of(CubeColor c) const {
  for (int f = 0; f < kFaces; ++f) {
    if (colors_[static_cast<std::size_t>(f)] == c) return f;
  }
  throw DimensionError("color missing from centers");
}

ColorWeights::ColorWeights() { by_color_.fill(kUnitWeights); }

ColorWeights::ColorWeights(const std::array<ChannelWeights, kFaces>& by_color)
    : by_color_(by_color) {
  for (const auto& w : by_color_) {
    if (!(w.hue >= 0.0 && w.saturation >= 0.0 && w.value >= 0.0)) {
      throw DimensionError("color weights must be non-negative");
    }
    if (w.hue == 0.0 && w.saturation == 0.0 && w.value == 0.0) {
      throw DimensionError("each color needs at least one positive weight");
    }
  }
}

double block_distance(const FeatureVector3& a, const FeatureVector3& b, const ChannelWeights& w) {
  const double raw = std::abs(a.h - b.h);
  const double dh = std::min(raw, 360.0 - raw) / 360.0;
  const double ds = a.s - b.s;
  const double dv = a.v - b.v;
  return std::sqrt(w.hue * w.hue * dh * dh + w.saturation * w.saturation * ds * ds +
                   w.value * w.value * dv * dv);
}

FaceLabeling knn_baseline(const CubeObservation& obs) {
  auto labels = seeded_labels();
  Pool pool;
  for (int f = 0; f < kFaces; ++f) {
    for (int n : pool.nearest(obs, obs[center_index(f)], kStickersPerFace - 1, kUnitWeights)) {
      claim(labels, pool, n, f);
    }
  }
  return FaceLabeling(labels);
}

FaceLabeling wlhp(const CubeObservation& obs, WlhpTrace* trace) {
  auto labels = seeded_labels();
  Pool pool;
  hierarchic_propagation(obs, {0, 1, 2, 3, 4, 5}, kUnitWeights, labels, pool, trace);
  return FaceLabeling(labels);
}

FaceLabeling wlhp_star(const CubeObservation& obs, double hue_weight) {
  if (!(hue_weight >= 1.0)) throw DimensionError("hue weight must be at least 1");
  int white = 0;
  for (int f = 1; f < kFaces; ++f) {
    if (obs[center_index(f)].s < obs[center_index(white)].s) white = f;
  }
  auto labels = seeded_labels();
  Pool pool;
  // Hue carries no information for white stickers.
  hierarchic_propagation(obs, {white}, {0.0, 1.0, 1.0}, labels, pool, nullptr);
  std::vector<int> rest;
  for (int f = 0; f < kFaces; ++f) {
    if (f != white) rest.push_back(f);
  }
  hierarchic_propagation(obs, rest, {hue_weight, 1.0, 1.0}, labels, pool, nullptr);
  return FaceLabeling(labels);
}

FaceLabeling dwlp(const CubeObservation& obs, const CenterColors& centers,
                  const ColorWeights& weights) {
  auto labels = seeded_labels();
  Pool pool;
  std::array<std::vector<int>, kFaces> members;
  for (int f = 0; f < kFaces; ++f) members[static_cast<std::size_t>(f)] = {center_index(f)};

  // Distance from a free sticker to the nearest member of a label, under
  // that label's weights.
  auto label_distance = [&](int face, int sticker) {
    const auto& w = weights[centers[face]];
    double best = std::numeric_limits<double>::infinity();
    for (int m : members[static_cast<std::size_t>(face)]) {
      best = std::min(best, block_distance(obs[m], obs[sticker], w));
    }
    return best;
  };

  while (!pool.empty()) {
    // One sweep: every label still short of nine claims exactly one sticker.
    std::array<bool, kFaces> pending{};
    for (int f = 0; f < kFaces; ++f) {
      pending[static_cast<std::size_t>(f)] =
          members[static_cast<std::size_t>(f)].size() < static_cast<std::size_t>(kStickersPerFace);
    }
    for (;;) {
      double best_d = std::numeric_limits<double>::infinity();
      int best_face = -1;
      int best_sticker = -1;
      for (int f = 0; f < kFaces; ++f) {
        if (!pending[static_cast<std::size_t>(f)]) continue;
        for (int s = 0; s < kStickers; ++s) {
          if (!pool.free()[static_cast<std::size_t>(s)]) continue;
          const double d = label_distance(f, s);
          // Strict comparison keeps the lower label, then the lower index.
          if (best_face < 0 || d < best_d) {
            best_d = d;
            best_face = f;
            best_sticker = s;
          }
        }
      }
      if (best_face < 0) break;
      claim(labels, pool, best_sticker, best_face);
      members[static_cast<std::size_t>(best_face)].push_back(best_sticker);
      pending[static_cast<std::size_t>(best_face)] = false;
    }
  }
  return FaceLabeling(labels);
}

ColorWeights default_color_weights() {
  std::array<ChannelWeights, kFaces> w;
  w[color_index(CubeColor::White)] = {0.0, 2.0, 1.0};
  w[color_index(CubeColor::Yellow)] = {4.0, 1.0, 1.0};
  w[color_index(CubeColor::Green)] = {4.0, 1.0, 1.0};
  w[color_index(CubeColor::Blue)] = {4.0, 1.0, 1.0};
  w[color_index(CubeColor::Red)] = {6.0, 1.0, 2.0};
  w[color_index(CubeColor::Orange)] = {6.0, 1.0, 2.0};
  return ColorWeights(w);
}

ColorWeights identity_color_weights() { return ColorWeights(); }

RecognizerConfig load_recognizer_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open recognizer config " + path);
  RecognizerConfig cfg;
  try {
    nlohmann::json j;
    in >> j;
    if (j.contains("centers")) {
      auto colors = cfg.centers.colors();
      for (const auto& [face, name] : j["centers"].items()) {
        const auto f = parse_face(face);
        const auto c = parse_color(name.get<std::string>());
        if (!f || !c) throw DimensionError(path + ": bad center entry '" + face + "'");
        colors[static_cast<std::size_t>(*f)] = *c;
      }
      cfg.centers = CenterColors(colors);
    }
    if (j.contains("weights")) {
      std::array<ChannelWeights, kFaces> w;
      for (auto c : kAllColors) w[static_cast<std::size_t>(color_index(c))] = cfg.weights[c];
      for (const auto& [name, triple] : j["weights"].items()) {
        const auto c = parse_color(name);
        if (!c) throw DimensionError(path + ": unknown color '" + name + "' in weights");
        w[static_cast<std::size_t>(color_index(*c))] = parse_weights(triple);
      }
      cfg.weights = ColorWeights(w);
    }
    if (j.contains("hue_weight")) cfg.hue_weight = j["hue_weight"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DimensionError(path + ": " + e.what());
  }
  return cfg;
}

}  // namespace cubecolor
