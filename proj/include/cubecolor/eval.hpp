#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cubecolor/dataset.hpp"
#include "cubecolor/online_recog.hpp"
#include "cubecolor/sbelm.hpp"

namespace cubecolor {

inline constexpr std::string_view kCircumstances = "ABCDE";

struct Tally {
  std::size_t correct = 0;
  std::size_t total = 0;

  /// Percentage, or nullopt when nothing was scored.
  std::optional<double> percent() const;
  Tally& operator+=(const Tally& o) {
    correct += o.correct;
    total += o.total;
    return *this;
  }
};

struct AccuracyRow {
  std::string label;
  std::array<Tally, 5> by_circumstance{};  ///< A..E

  Tally total() const;
};

/// Rows are methods or training sizes; columns are circumstances A..E and
/// the sticker-weighted total. Empty cells print as "-".
struct AccuracyTable {
  std::string title;
  std::string row_header;
  std::vector<AccuracyRow> rows;

  std::string to_text() const;
  std::string to_csv() const;
};

/// Tallies a per-sticker correctness predicate over every record.
AccuracyRow tally_stickers(std::string label, const std::vector<CubeStateRecord>& records,
                           const std::function<bool(const CubeStateRecord&, int sticker)>& correct);

enum class OnlineMethod { Knn, Wlhp, WlhpStar, Dwlp };

std::string_view method_name(OnlineMethod m);
/// Accepts knn, wlhp, wlhp*, wlhp-star, dwlp.
std::optional<OnlineMethod> parse_online_method(std::string_view text);
inline constexpr std::array<OnlineMethod, 4> kAllOnlineMethods{
    OnlineMethod::Knn, OnlineMethod::Wlhp, OnlineMethod::WlhpStar, OnlineMethod::Dwlp};

FaceLabeling run_online(OnlineMethod method, const CubeObservation& obs, const CenterColors& centers,
                        const RecognizerConfig& config = {});

/// A sticker counts as correct when the center of its predicted face has
/// the sticker's ground-truth color.
std::vector<bool> score_labeling(const CubeStateRecord& record, const FaceLabeling& labeling);

/// Each record's own ground-truth centers drive DWLP and the scoring.
AccuracyTable online_accuracy(const std::vector<CubeStateRecord>& records,
                              const std::vector<OnlineMethod>& methods,
                              const RecognizerConfig& config = {});

struct OfflineConfig {
  std::vector<int> sizes{50, 100, 150, 200, 250, 300};  ///< training stickers per class
  SbElmParams params;
  std::uint64_t split_seed = 42;
  /// Diagnostic: score on the training stickers instead of held-out ones.
  bool test_on_train = false;
};

/// 16DHSV features and color labels of the given stickers.
LabeledDataset sticker_dataset(const std::vector<CubeStateRecord>& records,
                               const std::vector<std::pair<std::size_t, int>>& stickers);

/// Samples sizes[i] stickers per color (without replacement) to train
/// SB-ELM, then scores the remaining stickers.
AccuracyTable offline_accuracy(const std::vector<CubeStateRecord>& records,
                               const OfflineConfig& config);

/// Trains on a sample of train_records and scores every sticker of test_records.
AccuracyTable offline_accuracy(const std::vector<CubeStateRecord>& train_records,
                               const std::vector<CubeStateRecord>& test_records,
                               const OfflineConfig& config);

/// The synthetic drift benchmark: an undrifted and a drifted set of states
/// from the same seed. Undrifted states are tagged A, drifted ones B.
struct DriftBenchmark {
  AccuracyTable offline_undrifted;  ///< trained and tested (held out) on undrifted states
  AccuracyTable offline_drifted;    ///< trained on undrifted, tested on drifted states
  AccuracyTable online_drifted;
};

struct DriftBenchmarkConfig {
  int states = 100;
  std::uint64_t seed = 42;
  OfflineConfig offline{{250}, {}, 42, false};
  std::vector<OnlineMethod> methods{kAllOnlineMethods.begin(), kAllOnlineMethods.end()};
  RecognizerConfig recognizer;
};

DriftBenchmark run_drift_benchmark(const DriftBenchmarkConfig& config = {});

/// Mean accuracy of one table row as a percentage (total column).
double row_total_percent(const AccuracyTable& table, std::size_t row);

}  // namespace cubecolor
