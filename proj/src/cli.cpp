#include "cubecolor/cli.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "cubecolor/dataset.hpp"
#include "cubecolor/errors.hpp"
#include "cubecolor/eval.hpp"
#include "cubecolor/online_recog.hpp"
#include "cubecolor/sbelm.hpp"

namespace cubecolor {

namespace {

/// Flag combinations rejected before any work starts (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FeatureFlags {
  int size = 240;
  double margin = 0.2;
  std::vector<int> bins{36, 32, 32};
  std::string partition;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--size", size, "Side of the rectified face in pixels (multiple of 3)")
        ->capture_default_str();
    cmd->add_option("--margin", margin, "Fraction of each sticker cell trimmed from every side")
        ->capture_default_str();
    cmd->add_option("--bins", bins, "3DHSV histogram bins as H,S,V")
        ->expected(3)
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--partition", partition,
                    "JSON file with the 16-cell uneven HSV partition (default: built-in)");
  }

  void validate() const {
    if (size <= 0 || size % 3 != 0) throw UsageError("--size must be a positive multiple of 3");
    if (!(margin >= 0.0 && margin < 0.5)) throw UsageError("--margin must lie in [0, 0.5)");
    for (int b : bins) {
      if (b < 1) throw UsageError("--bins entries must be at least 1");
    }
  }

  UnevenPartition load_partition() const {
    return partition.empty() ? UnevenPartition::standard() : UnevenPartition::load(partition);
  }

  FeatureConfig config() const {
    return {size, margin, {bins[0], bins[1], bins[2]}, load_partition()};
  }
};

struct ModelFlags {
  int k = 8;
  int hidden = 100;
  double c = 1.0;
  std::uint64_t seed = 42;

  void add_to(CLI::App* cmd, const std::string& seed_flag) {
    cmd->add_option("--k", k, "ALDE output dimension")->capture_default_str();
    cmd->add_option("--hidden", hidden, "ELM hidden node count")->capture_default_str();
    cmd->add_option("--C", c, "ELM regularization constant")->capture_default_str();
    cmd->add_option(seed_flag, seed, "Seed for the ELM input weights")->capture_default_str();
  }

  void validate() const {
    if (k < 1 || k > 16) throw UsageError("--k must lie in [1, 16] for 16DHSV features");
    if (hidden < 1) throw UsageError("--hidden must be at least 1");
    if (!(c > 0.0)) throw UsageError("--C must be positive");
  }

  SbElmParams params() const { return {k, hidden, c, seed}; }
};

struct OutputFlags {
  std::string out;
  std::string format = "text";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--out", out, "Output file (default: standard output)");
    cmd->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"text", "csv"}))
        ->capture_default_str();
  }
};

void write_output(const OutputFlags& flags, const std::string& text, std::ostream& out) {
  if (flags.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(flags.out, std::ios::binary);
  if (!f) throw IoError("cannot write " + flags.out);
  f << text;
  if (!f) throw IoError("failed writing " + flags.out);
}

RecognizerConfig recognizer_config(const std::string& path, std::optional<double> hue_weight) {
  RecognizerConfig cfg = path.empty() ? RecognizerConfig{} : load_recognizer_config(path);
  if (hue_weight) cfg.hue_weight = *hue_weight;
  if (!(cfg.hue_weight >= 1.0)) throw UsageError("hue weight must be at least 1");
  return cfg;
}

Interval range_flag(const std::vector<double>& v) { return {v[0], v[1]}; }

std::string recognize_state(const CubeStateRecord& rec, const std::string& method,
                            const std::optional<SbElmModel>& model, const RecognizerConfig& cfg,
                            bool csv) {
  std::array<int, kStickers> faces{};
  std::array<CubeColor, kStickers> colors{};
  if (method == "sbelm") {
    for (int s = 0; s < kStickers; ++s) {
      const auto& f = rec.features16[static_cast<std::size_t>(s)];
      const Eigen::VectorXd x =
          Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
      colors[static_cast<std::size_t>(s)] = static_cast<CubeColor>(sbelm_predict(*model, x));
    }
    std::array<CubeColor, kFaces> center{};
    for (int face = 0; face < kFaces; ++face) {
      center[static_cast<std::size_t>(face)] = colors[static_cast<std::size_t>(center_index(face))];
    }
    std::optional<CenterColors> resolved;
    try {
      resolved.emplace(center);
    } catch (const DimensionError&) {
      throw Error("state " + rec.state_id +
                  ": predicted center colors are not six distinct colors; no facelet string");
    }
    for (int s = 0; s < kStickers; ++s) {
      faces[static_cast<std::size_t>(s)] = resolved->face_of(colors[static_cast<std::size_t>(s)]);
    }
  } else {
    const auto m = parse_online_method(method);
    const FaceLabeling labeling = run_online(*m, rec.observation(), cfg.centers, cfg);
    for (int s = 0; s < kStickers; ++s) {
      faces[static_cast<std::size_t>(s)] = labeling[s];
      colors[static_cast<std::size_t>(s)] = cfg.centers[labeling[s]];
    }
  }

  std::string labels, color_str, facelets;
  for (int s = 0; s < kStickers; ++s) {
    labels += static_cast<char>('0' + faces[static_cast<std::size_t>(s)]);
    color_str += color_letter(colors[static_cast<std::size_t>(s)]);
    facelets += kFaceNames[static_cast<std::size_t>(faces[static_cast<std::size_t>(s)])];
  }
  if (csv) return rec.state_id + "," + method + "," + labels + "," + color_str + "," + facelets + "\n";
  return rec.state_id + " " + labels + " " + color_str + " " + facelets + "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rubik's cube sticker color recognition"};
  app.require_subcommand(1);

  // features
  std::string manifest, features_out;
  FeatureFlags feature_flags;
  auto* features = app.add_subcommand("features", "Extract sticker features from annotated images");
  features->add_option("--manifest", manifest, "Annotation manifest")->required()->check(CLI::ExistingFile);
  features->add_option("--out", features_out, "Feature CSV to write")->required();
  feature_flags.add_to(features);

  // synth
  int synth_n = 1;
  std::string synth_out;
  DriftConfig drift;
  bool synth_undrifted = false;
  std::vector<double> hue_shift{drift.hue_shift.lo, drift.hue_shift.hi};
  std::vector<double> sat_scale{drift.saturation_scale.lo, drift.saturation_scale.hi};
  std::vector<double> val_scale{drift.value_scale.lo, drift.value_scale.hi};
  std::vector<double> noise{drift.noise_sigma.h, drift.noise_sigma.s, drift.noise_sigma.v};
  std::string synth_tag = "A";
  std::string synth_partition;
  auto* synth = app.add_subcommand("synth", "Generate synthetic drifted cube states");
  synth->add_option("--n", synth_n, "Number of cube states")->capture_default_str();
  synth->add_option("--seed", drift.seed, "Master seed")->capture_default_str();
  synth->add_option("--out", synth_out, "Feature CSV to write")->required();
  synth->add_flag("--undrifted", synth_undrifted, "Disable hue, saturation and value drift");
  synth->add_option("--hue-shift", hue_shift, "Hue shift range in degrees as LO,HI")
      ->expected(2)->delimiter(',')->capture_default_str();
  synth->add_option("--sat-scale", sat_scale, "Saturation scale range as LO,HI")
      ->expected(2)->delimiter(',')->capture_default_str();
  synth->add_option("--val-scale", val_scale, "Value scale range as LO,HI")
      ->expected(2)->delimiter(',')->capture_default_str();
  synth->add_option("--noise", noise, "Per-sticker noise sigma as H,S,V")
      ->expected(3)->delimiter(',')->capture_default_str();
  synth->add_option("--circumstance", synth_tag, "Circumstance tag A-E")
      ->check(CLI::IsMember({"A", "B", "C", "D", "E"}))->capture_default_str();
  synth->add_option("--id-prefix", drift.id_prefix, "Prefix of generated state ids")->capture_default_str();
  synth->add_option("--partition", synth_partition, "JSON 16DHSV partition (default: built-in)");

  // train
  std::string train_features, model_out;
  ModelFlags train_flags;
  auto* train = app.add_subcommand("train", "Train and save an SB-ELM model on 16DHSV features");
  train->add_option("--features", train_features, "Feature CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--model-out", model_out, "Model file to write")->required();
  train_flags.add_to(train, "--seed");

  // recognize
  std::string rec_features, rec_method, rec_model, rec_config, rec_state;
  std::optional<double> rec_hue_weight;
  OutputFlags rec_output;
  auto* recognize = app.add_subcommand("recognize", "Label the stickers of one or more cube states");
  recognize->add_option("--features", rec_features, "Feature CSV")->required()->check(CLI::ExistingFile);
  recognize->add_option("--method", rec_method, "Recognizer")
      ->required()
      ->check(CLI::IsMember({"sbelm", "knn", "wlhp", "wlhp-star", "dwlp"}));
  recognize->add_option("--model", rec_model, "SB-ELM model file (required for sbelm)");
  recognize->add_option("--config", rec_config, "JSON file with centers, weights and hue_weight");
  recognize->add_option("--hue-weight", rec_hue_weight, "WLHP* hue weight (default 4)");
  recognize->add_option("--state", rec_state, "Only recognize the state with this id");
  rec_output.add_to(recognize);

  // bench
  std::string bench_features, bench_train, bench_config;
  std::optional<int> bench_synthetic;
  std::vector<std::string> bench_methods{"sbelm", "knn", "wlhp", "wlhp-star", "dwlp"};
  std::vector<int> bench_sizes{50, 100, 150, 200, 250, 300};
  std::uint64_t bench_seed = 42;
  std::uint64_t bench_data_seed = 42;
  ModelFlags bench_model;
  OutputFlags bench_output;
  auto* bench = app.add_subcommand("bench", "Produce offline and online accuracy tables");
  auto* bench_src = bench->add_option("--features", bench_features, "Feature CSV to evaluate")
                        ->check(CLI::ExistingFile);
  auto* bench_syn = bench->add_option("--synthetic", bench_synthetic,
                                      "Run the synthetic drift benchmark with N states per condition");
  bench_src->excludes(bench_syn);
  bench->add_option("--train-features", bench_train,
                    "Feature CSV to draw SB-ELM training stickers from (default: --features)")
      ->check(CLI::ExistingFile)
      ->needs(bench_src);
  bench->add_option("--methods", bench_methods, "Methods among sbelm, knn, wlhp, wlhp-star, dwlp")
      ->delimiter(',')
      ->check(CLI::IsMember({"sbelm", "knn", "wlhp", "wlhp-star", "dwlp"}))
      ->capture_default_str();
  bench->add_option("--sizes", bench_sizes, "SB-ELM training stickers per class")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--seed", bench_seed, "Train/test split seed")->capture_default_str();
  bench->add_option("--data-seed", bench_data_seed, "Synthetic data seed")->capture_default_str();
  bench->add_option("--config", bench_config, "JSON file with centers, weights and hue_weight");
  bench_model.add_to(bench, "--model-seed");
  bench_output.add_to(bench);

  std::vector<const char*> argv{"cubecolor"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsageError;
  }

  try {
    if (features->parsed()) {
      feature_flags.validate();
      const FeatureConfig cfg = feature_flags.config();
      std::vector<CubeStateRecord> records;
      for (const auto& group : group_annotations(load_manifest(manifest))) {
        records.push_back(extract_record(group, cfg));
      }
      export_features(records, features_out);
      err << "wrote " << records.size() << " cube states to " << features_out << "\n";
    } else if (synth->parsed()) {
      if (synth_n < 0) throw UsageError("--n must be non-negative");
      if (synth_undrifted) {
        drift.hue_shift = {0.0, 0.0};
        drift.saturation_scale = {1.0, 1.0};
        drift.value_scale = {1.0, 1.0};
      } else {
        drift.hue_shift = range_flag(hue_shift);
        drift.saturation_scale = range_flag(sat_scale);
        drift.value_scale = range_flag(val_scale);
      }
      drift.noise_sigma = {noise[0], noise[1], noise[2]};
      drift.circumstance = synth_tag[0];
      try {
        drift.validate();
      } catch (const DimensionError& e) {
        throw UsageError(e.what());
      }
      const auto partition =
          synth_partition.empty() ? UnevenPartition::standard() : UnevenPartition::load(synth_partition);
      export_features(generate_synthetic(drift, synth_n, partition), synth_out);
    } else if (train->parsed()) {
      train_flags.validate();
      const auto records = import_features(train_features);
      std::vector<std::pair<std::size_t, int>> all;
      for (std::size_t r = 0; r < records.size(); ++r) {
        for (int s = 0; s < kStickers; ++s) all.emplace_back(r, s);
      }
      if (records.empty()) throw InsufficientData(train_features + ": no cube states");
      save_model(sbelm_train(sticker_dataset(records, all), train_flags.params()), model_out);
    } else if (recognize->parsed()) {
      if (rec_method == "sbelm" && rec_model.empty()) {
        throw UsageError("--model is required with --method sbelm");
      }
      if (rec_method != "sbelm" && !rec_model.empty()) {
        throw UsageError("--model only applies to --method sbelm");
      }
      const auto cfg = recognizer_config(rec_config, rec_hue_weight);
      std::optional<SbElmModel> model;
      if (!rec_model.empty()) model = load_model(rec_model);
      const auto records = import_features(rec_features);
      std::string text = rec_output.format == "csv" ? "state_id,method,labels,colors,facelets\n" : "";
      bool found = false;
      for (const auto& rec : records) {
        if (!rec_state.empty() && rec.state_id != rec_state) continue;
        found = true;
        text += recognize_state(rec, rec_method, model, cfg, rec_output.format == "csv");
      }
      if (!rec_state.empty() && !found) throw Error("state " + rec_state + " not found in " + rec_features);
      write_output(rec_output, text, out);
    } else if (bench->parsed()) {
      if (bench_features.empty() && !bench_synthetic) {
        throw UsageError("bench needs --features or --synthetic");
      }
      if (bench_synthetic && *bench_synthetic < 1) throw UsageError("--synthetic must be positive");
      for (int s : bench_sizes) {
        if (s < 1) throw UsageError("--sizes entries must be positive");
      }
      bench_model.validate();
      const auto cfg = recognizer_config(bench_config, std::nullopt);

      bool offline = false;
      std::vector<OnlineMethod> online;
      for (const auto& m : bench_methods) {
        if (m == "sbelm") {
          offline = true;
        } else {
          online.push_back(*parse_online_method(m));
        }
      }
      const OfflineConfig off{bench_sizes, bench_model.params(), bench_seed, false};

      std::vector<AccuracyTable> tables;
      if (bench_synthetic) {
        DriftBenchmarkConfig bc;
        bc.states = *bench_synthetic;
        bc.seed = bench_data_seed;
        bc.offline = off;
        bc.methods = online;
        bc.recognizer = cfg;
        auto result = run_drift_benchmark(bc);
        if (offline) {
          result.offline_undrifted.title += " (undrifted train, undrifted held-out test)";
          result.offline_drifted.title += " (undrifted train, drifted test)";
          tables.push_back(std::move(result.offline_undrifted));
          tables.push_back(std::move(result.offline_drifted));
        }
        if (!online.empty()) {
          result.online_drifted.title += " (drifted)";
          tables.push_back(std::move(result.online_drifted));
        }
      } else {
        const auto records = import_features(bench_features);
        if (offline) {
          tables.push_back(bench_train.empty()
                               ? offline_accuracy(records, off)
                               : offline_accuracy(import_features(bench_train), records, off));
        }
        if (!online.empty()) tables.push_back(online_accuracy(records, online, cfg));
      }
      std::string text;
      for (std::size_t i = 0; i < tables.size(); ++i) {
        if (i > 0) text += "\n";
        if (bench_output.format == "csv") {
          text += "# " + tables[i].title + "\n" + tables[i].to_csv();
        } else {
          text += tables[i].to_text();
        }
      }
      write_output(bench_output, text, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitOk;
}

}  // namespace cubecolor
