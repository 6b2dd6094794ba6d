#include "cubecolor/eval.hpp"

#include <algorithm>
#include <cstdio>

#include "cubecolor/errors.hpp"
#include "cubecolor/random.hpp"

namespace cubecolor {

namespace {

std::size_t circumstance_column(char tag) {
  if (!is_circumstance(tag)) throw InvalidRecord(std::string("unknown circumstance '") + tag + "'");
  return static_cast<std::size_t>(tag - 'A');
}

std::string format_cell(const Tally& t) {
  const auto p = t.percent();
  if (!p) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *p);
  return buf;
}

using StickerRef = std::pair<std::size_t, int>;

/// Per-class training sample; the rest of each class goes to held_out.
std::vector<StickerRef> sample_per_class(const std::vector<CubeStateRecord>& records, int size,
                                         std::uint64_t seed, std::vector<StickerRef>* held_out) {
  std::array<std::vector<StickerRef>, kFaces> by_color;
  for (std::size_t r = 0; r < records.size(); ++r) {
    for (int s = 0; s < kStickers; ++s) {
      by_color[static_cast<std::size_t>(color_index(records[r].colors[static_cast<std::size_t>(s)]))]
          .emplace_back(r, s);
    }
  }
  Rng rng(seed);
  std::vector<StickerRef> train;
  for (std::size_t c = 0; c < by_color.size(); ++c) {
    auto& refs = by_color[c];
    if (size < 1 || refs.size() < static_cast<std::size_t>(size)) {
      throw InsufficientData("need " + std::to_string(size) + " training stickers of color " +
                             std::string(color_name(static_cast<CubeColor>(c))) + ", have " +
                             std::to_string(refs.size()));
    }
    // Partial Fisher-Yates: the first `size` entries form the sample.
    for (std::size_t i = 0; i < static_cast<std::size_t>(size); ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(refs.size() - i));
      std::swap(refs[i], refs[j]);
    }
    train.insert(train.end(), refs.begin(), refs.begin() + size);
    if (held_out) held_out->insert(held_out->end(), refs.begin() + size, refs.end());
  }
  return train;
}

AccuracyRow score_offline(std::string label, const SbElmModel& model,
                          const std::vector<CubeStateRecord>& records,
                          const std::vector<StickerRef>& stickers) {
  AccuracyRow row{std::move(label), {}};
  for (const auto& [r, s] : stickers) {
    const auto& rec = records[r];
    const auto& f = rec.features16[static_cast<std::size_t>(s)];
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
    const bool ok = sbelm_predict(model, x) == color_index(rec.colors[static_cast<std::size_t>(s)]);
    auto& cell = row.by_circumstance[circumstance_column(rec.circumstance)];
    cell.correct += ok ? 1 : 0;
    ++cell.total;
  }
  return row;
}

std::vector<StickerRef> all_stickers(const std::vector<CubeStateRecord>& records) {
  std::vector<StickerRef> out;
  for (std::size_t r = 0; r < records.size(); ++r) {
    for (int s = 0; s < kStickers; ++s) out.emplace_back(r, s);
  }
  return out;
}

AccuracyTable offline_table() { return {"Accuracy of SB-ELM with 16DHSV", "samples", {}}; }

}  // namespace

std::optional<double> Tally::percent() const {
  if (total == 0) return std::nullopt;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

Tally AccuracyRow::total() const {
  Tally t;
  for (const auto& c : by_circumstance) t += c;
  return t;
}

std::string AccuracyTable::to_text() const {
  std::size_t width = row_header.size();
  for (const auto& r : rows) width = std::max(width, r.label.size());
  auto pad_right = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); };
  auto pad_left = [](const std::string& s, std::size_t w) {
    return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
  };
  constexpr std::size_t kCell = 8;

  std::string out = title + "\n" + pad_right(row_header, width);
  for (char c : kCircumstances) out += pad_left(std::string(1, c), kCell);
  out += pad_left("total", kCell) + "\n";
  for (const auto& r : rows) {
    out += pad_right(r.label, width);
    for (const auto& c : r.by_circumstance) out += pad_left(format_cell(c), kCell);
    out += pad_left(format_cell(r.total()), kCell) + "\n";
  }
  return out;
}

std::string AccuracyTable::to_csv() const {
  std::string out = row_header;
  for (char c : kCircumstances) out += std::string(",") + c;
  out += ",total\n";
  for (const auto& r : rows) {
    out += r.label;
    for (const auto& c : r.by_circumstance) out += "," + format_cell(c);
    out += "," + format_cell(r.total()) + "\n";
  }
  return out;
}

AccuracyRow tally_stickers(std::string label, const std::vector<CubeStateRecord>& records,
                           const std::function<bool(const CubeStateRecord&, int)>& correct) {
  AccuracyRow row{std::move(label), {}};
  for (const auto& rec : records) {
    auto& cell = row.by_circumstance[circumstance_column(rec.circumstance)];
    for (int s = 0; s < kStickers; ++s) {
      cell.correct += correct(rec, s) ? 1 : 0;
      ++cell.total;
    }
  }
  return row;
}

std::string_view method_name(OnlineMethod m) {
  switch (m) {
    case OnlineMethod::Knn: return "KNN";
    case OnlineMethod::Wlhp: return "WLHP";
    case OnlineMethod::WlhpStar: return "WLHP*";
    case OnlineMethod::Dwlp: return "DWLP";
  }
  return "?";
}

std::optional<OnlineMethod> parse_online_method(std::string_view text) {
  std::string l(text);
  std::transform(l.begin(), l.end(), l.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (l == "knn") return OnlineMethod::Knn;
  if (l == "wlhp") return OnlineMethod::Wlhp;
  if (l == "wlhp*" || l == "wlhp-star") return OnlineMethod::WlhpStar;
  if (l == "dwlp") return OnlineMethod::Dwlp;
  return std::nullopt;
}

FaceLabeling run_online(OnlineMethod method, const CubeObservation& obs, const CenterColors& centers,
                        const RecognizerConfig& config) {
  switch (method) {
    case OnlineMethod::Knn: return knn_baseline(obs);
    case OnlineMethod::Wlhp: return wlhp(obs);
    case OnlineMethod::WlhpStar: return wlhp_star(obs, config.hue_weight);
    case OnlineMethod::Dwlp: return dwlp(obs, centers, config.weights);
  }
  throw DimensionError("unknown online method");
}

std::vector<bool> score_labeling(const CubeStateRecord& record, const FaceLabeling& labeling) {
  std::vector<bool> out(kStickers);
  for (int s = 0; s < kStickers; ++s) {
    const CubeColor predicted = record.colors[static_cast<std::size_t>(center_index(labeling[s]))];
    out[static_cast<std::size_t>(s)] = predicted == record.colors[static_cast<std::size_t>(s)];
  }
  return out;
}

AccuracyTable online_accuracy(const std::vector<CubeStateRecord>& records,
                              const std::vector<OnlineMethod>& methods,
                              const RecognizerConfig& config) {
  AccuracyTable table{"Accuracy of online methods with 3DHSV", "method", {}};
  for (auto m : methods) {
    AccuracyRow row{std::string(method_name(m)), {}};
    for (const auto& rec : records) {
      const auto correct = score_labeling(rec, run_online(m, rec.observation(), rec.centers(), config));
      auto& cell = row.by_circumstance[circumstance_column(rec.circumstance)];
      cell.correct += static_cast<std::size_t>(std::count(correct.begin(), correct.end(), true));
      cell.total += correct.size();
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

LabeledDataset sticker_dataset(const std::vector<CubeStateRecord>& records,
                               const std::vector<std::pair<std::size_t, int>>& stickers) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(stickers.size()), 16);
  std::vector<int> y;
  y.reserve(stickers.size());
  for (std::size_t i = 0; i < stickers.size(); ++i) {
    const auto& [r, s] = stickers[i];
    const auto& f = records[r].features16[static_cast<std::size_t>(s)];
    for (std::size_t c = 0; c < f.size(); ++c) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = f[c];
    y.push_back(color_index(records[r].colors[static_cast<std::size_t>(s)]));
  }
  return LabeledDataset(std::move(x), std::move(y), kFaces);
}

AccuracyTable offline_accuracy(const std::vector<CubeStateRecord>& records,
                               const OfflineConfig& config) {
  AccuracyTable table = offline_table();
  for (std::size_t i = 0; i < config.sizes.size(); ++i) {
    std::vector<StickerRef> held_out;
    const auto train = sample_per_class(records, config.sizes[i], mix_seed(config.split_seed, i), &held_out);
    const auto model = sbelm_train(sticker_dataset(records, train), config.params);
    table.rows.push_back(score_offline(std::to_string(config.sizes[i]), model, records,
                                       config.test_on_train ? train : held_out));
  }
  return table;
}

AccuracyTable offline_accuracy(const std::vector<CubeStateRecord>& train_records,
                               const std::vector<CubeStateRecord>& test_records,
                               const OfflineConfig& config) {
  AccuracyTable table = offline_table();
  const auto test = all_stickers(test_records);
  for (std::size_t i = 0; i < config.sizes.size(); ++i) {
    const auto train =
        sample_per_class(train_records, config.sizes[i], mix_seed(config.split_seed, i), nullptr);
    const auto model = sbelm_train(sticker_dataset(train_records, train), config.params);
    table.rows.push_back(score_offline(std::to_string(config.sizes[i]), model, test_records, test));
  }
  return table;
}

DriftBenchmark run_drift_benchmark(const DriftBenchmarkConfig& config) {
  DriftConfig undrifted = undrifted_config();
  undrifted.seed = config.seed;
  undrifted.circumstance = 'A';
  undrifted.id_prefix = "ref";
  DriftConfig drifted;
  drifted.seed = config.seed;
  drifted.circumstance = 'B';
  drifted.id_prefix = "drift";

  const auto reference = generate_synthetic(undrifted, config.states);
  const auto shifted = generate_synthetic(drifted, config.states);
  return {offline_accuracy(reference, config.offline),
          offline_accuracy(reference, shifted, config.offline),
          online_accuracy(shifted, config.methods, config.recognizer)};
}

double row_total_percent(const AccuracyTable& table, std::size_t row) {
  return table.rows.at(row).total().percent().value_or(0.0);
}

}  // namespace cubecolor
