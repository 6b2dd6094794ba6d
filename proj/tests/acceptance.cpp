// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "cubecolor/cli.hpp"
#include "cubecolor/eval.hpp"
#include "test_support.hpp"

using namespace cubecolor;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

Outcome structural_invariants() {
  Outcome o;
  const auto t0 = Clock::now();
  Rng rng(20240601);
  const CenterColors centers;
  const auto weights = default_color_weights();
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto obs = testing::random_observation(rng);
    bad += !testing::nine_per_label_centers_fixed(knn_baseline(obs));
    bad += !testing::nine_per_label_centers_fixed(wlhp(obs));
    bad += !testing::nine_per_label_centers_fixed(wlhp_star(obs));
    bad += !testing::nine_per_label_centers_fixed(dwlp(obs, centers, weights));
  }
  const double secs = seconds_since(t0);
  o.require(bad == 0, std::to_string(bad) + " invalid labelings");
  o.require(secs < 10.0, "runtime " + fmt("%.2f s", secs));
  o.detail = "4000 labelings, " + fmt("%.2f s", secs) + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  Rng rng(20240602);
  int mismatched = 0, not_separated = 0;
  for (int i = 0; i < 100; ++i) {
    const auto cube = testing::separable_cube(rng);
    const auto oracle = testing::nearest_cluster_oracle(cube.features, cube.truth);
    not_separated += !oracle.separated;
    const CubeObservation obs(cube.features);
    mismatched += knn_baseline(obs).labels() != oracle.labels;
    mismatched += wlhp(obs).labels() != oracle.labels;
    mismatched += wlhp_star(obs).labels() != oracle.labels;
    mismatched += dwlp(obs, CenterColors{}, identity_color_weights()).labels() != oracle.labels;
  }
  o.require(not_separated == 0, std::to_string(not_separated) + " cubes not separated");
  o.require(mismatched == 0, std::to_string(mismatched) + " of 400 labelings differ from the oracle");
  if (o.pass) o.detail = "400/400 labelings equal the nearest-cluster oracle";
  return o;
}

Outcome alde_correctness() {
  Outcome o;
  Rng rng(20240603);
  double worst_orth = 0.0, worst_trace = 0.0, worst_scatter = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int d = 3 + static_cast<int>(rng.below(14));
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(d - 1)));
    const auto data = testing::random_dataset(rng, 30 + static_cast<int>(rng.below(120)),
                                              2 + static_cast<int>(rng.below(5)), d);
    const auto scatter = compute_scatter(data);
    const auto oracle = testing::scatter_oracle(data.x(), data.y(), data.classes());
    worst_scatter = std::max({worst_scatter, (scatter.within - oracle.within).cwiseAbs().maxCoeff(),
                              (scatter.between - oracle.between).cwiseAbs().maxCoeff()});
    const auto model = alde_fit(data, k);
    worst_orth = std::max(worst_orth,
                          (model.w.transpose() * model.w - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff());
    const auto m = alde_objective(oracle);
    Eigen::EigenSolver<Eigen::MatrixXd> es(m);
    std::vector<double> ev;
    for (Eigen::Index i = 0; i < m.rows(); ++i) ev.push_back(es.eigenvalues()(i).real());
    std::sort(ev.rbegin(), ev.rend());
    double top = 0.0;
    for (int i = 0; i < k; ++i) top += ev[static_cast<std::size_t>(i)];
    worst_trace = std::max(worst_trace, std::abs((model.w.transpose() * m * model.w).trace() - top));
  }
  o.require(worst_orth <= 1e-8, "W^T W deviates by " + fmt("%.3g", worst_orth));
  o.require(worst_trace <= 1e-8, "trace gap " + fmt("%.3g", worst_trace));
  o.require(worst_scatter <= 1e-12, "scatter gap " + fmt("%.3g", worst_scatter));
  const std::string summary = "max |W^T W - I| " + fmt("%.2g", worst_orth) + ", trace gap " + fmt("%.2g", worst_trace) +
                              ", scatter gap " + fmt("%.2g", worst_scatter);
  o.detail = o.pass ? summary : summary + "; " + o.detail;
  return o;
}

Outcome elm_optimality() {
  Outcome o;
  Rng rng(20240604);
  double worst = 0.0;
  int runs = 0;
  for (double c : {1e-2, 1.0, 1e2, 1e4, 1e6}) {
    for (int t = 0; t < 4; ++t) {
      const auto data = testing::random_dataset(rng, 120 + 30 * t, 6, 4 + 4 * t);
      const auto model = elm_train(data.x(), data.y(), 6, 100, c, static_cast<std::uint64_t>(t));
      worst = std::max(worst, elm_stationarity_residual(model, data.x(), data.y()));
      ++runs;
    }
  }
  const auto sep = testing::separable_classes(rng, 50);
  const auto model = elm_train(sep.x(), sep.y(), 6, 100, 1e6, 42);
  worst = std::max(worst, elm_stationarity_residual(model, sep.x(), sep.y()));
  ++runs;
  int ok = 0;
  for (Eigen::Index j = 0; j < sep.samples(); ++j) {
    ok += elm_predict(model, sep.x().row(j).transpose()) == sep.y()[static_cast<std::size_t>(j)];
  }
  o.require(worst <= 1e-6, "stationarity residual " + fmt("%.3g", worst));
  o.require(ok == sep.samples(), "separable training accuracy " + std::to_string(ok) + "/300");
  const std::string summary = std::to_string(runs) + " runs, max residual " + fmt("%.2g", worst) +
                              ", separable accuracy " + std::to_string(ok) + "/300";
  o.detail = o.pass ? summary : summary + "; " + o.detail;
  return o;
}

Outcome drift_finding() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto bench = run_drift_benchmark();
  const double secs = seconds_since(t0);
  const double undrifted = row_total_percent(bench.offline_undrifted, 0);
  const double drifted = row_total_percent(bench.offline_drifted, 0);
  double online[4];
  for (std::size_t i = 0; i < 4; ++i) online[i] = row_total_percent(bench.online_drifted, i);
  const double knn = online[0], wl = online[1], wls = online[2], dw = online[3];
  o.require(undrifted - drifted >= 5.0, "(a) SB-ELM drop " + fmt("%.2f", undrifted - drifted) + " < 5 points");
  o.require(dw - drifted >= 5.0, "(b) DWLP margin over drifted SB-ELM " + fmt("%.2f", dw - drifted) + " < 5 points");
  o.require(dw >= wls && wls >= wl && wl >= knn, "(c) ordering violated");
  o.require(secs < 120.0, "runtime " + fmt("%.1f s", secs));
  std::string summary = "SB-ELM undrifted " + fmt("%.2f", undrifted) + ", drifted " + fmt("%.2f", drifted) +
                        "; KNN " + fmt("%.2f", knn) + ", WLHP " + fmt("%.2f", wl) + ", WLHP* " + fmt("%.2f", wls) +
                        ", DWLP " + fmt("%.2f", dw) + "; " + fmt("%.2f s", secs);
  o.detail = o.pass ? summary : summary + "; " + o.detail;
  return o;
}

Outcome feature_correctness() {
  Outcome o;
  Rng rng(20240606);
  const auto part = UnevenPartition::standard();
  int mismatch3 = 0, mismatch16 = 0;
  double worst_sum = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto px = testing::random_patch(rng);
    const BlockPatch patch(px);
    mismatch3 += !(feature_3dhsv(patch) == testing::brute_3dhsv(px, HistogramBins{}));
    const auto f = feature_16dhsv(patch, part);
    mismatch16 += f != testing::brute_16dhsv(px, part);
    double sum = 0.0;
    for (double x : f) sum += x;
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
  }
  o.require(mismatch3 == 0, std::to_string(mismatch3) + " 3DHSV mismatches");
  o.require(mismatch16 == 0, std::to_string(mismatch16) + " 16DHSV mismatches");
  o.require(worst_sum <= 1e-9, "16DHSV sum off by " + fmt("%.3g", worst_sum));
  const std::string summary = "1000 patches, max |sum - 1| " + fmt("%.2g", worst_sum);
  o.detail = o.pass ? summary : summary + "; " + o.detail;
  return o;
}

Outcome determinism() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / "cubecolor_acceptance";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  auto bench_to = [&](const std::string& name) {
    std::ostringstream out, err;
    const int code = run_cli({"bench", "--synthetic", "100", "--format", "csv", "--out", (dir / name).string()}, out, err);
    std::ifstream in(dir / name, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return std::make_pair(code, s.str());
  };
  const auto a = bench_to("a.csv");
  const auto b = bench_to("b.csv");
  std::filesystem::remove_all(dir);
  o.require(a.first == 0 && b.first == 0, "bench exit codes " + std::to_string(a.first) + "," + std::to_string(b.first));
  o.require(!a.second.empty() && a.second == b.second, "bench reports differ");

  Rng rng(20240607);
  const auto recs = generate_synthetic(DriftConfig{}, 30);
  std::vector<std::pair<std::size_t, int>> all;
  for (std::size_t r = 0; r < recs.size(); ++r) {
    for (int s = 0; s < kStickers; ++s) all.emplace_back(r, s);
  }
  const auto model = sbelm_train(sticker_dataset(recs, all), SbElmParams{});
  const auto back = deserialize_model(serialize_model(model));
  int same = 0;
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd x(16);
    for (auto& v : x) v = rng.uniform();
    same += sbelm_predict(model, x) == sbelm_predict(back, x);
  }
  o.require(same == 1000, std::to_string(1000 - same) + " predictions changed after round trip");
  const std::string summary = "bench reports " + std::to_string(a.second.size()) +
                              " bytes identical; 1000/1000 predictions preserved";
  o.detail = o.pass ? summary : o.detail;
  return o;
}

Outcome rectification_round_trip() {
  Outcome o;
  Rng rng(20240608);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    std::array<Rgb8, 9> colors;
    for (auto& c : colors) {
      c = {static_cast<std::uint8_t>(rng.below(256)), static_cast<std::uint8_t>(rng.below(256)),
           static_cast<std::uint8_t>(rng.below(256))};
    }
    const int side = 120 + 3 * static_cast<int>(rng.below(20));
    const RgbImage source = testing::render_stickers(colors, side, 3);
    const std::array<Point2, 4> quad{{{80 + rng.uniform(-40, 40), 60 + rng.uniform(-40, 40)},
                                      {420 + rng.uniform(-40, 40), 70 + rng.uniform(-40, 40)},
                                      {440 + rng.uniform(-40, 40), 400 + rng.uniform(-40, 40)},
                                      {90 + rng.uniform(-40, 40), 390 + rng.uniform(-40, 40)}}};
    const RgbImage canvas = testing::warp_into(source, quad, 560, 480);
    const auto face = rectify_face(canvas, FaceQuad(quad), side);
    const auto truth = to_hsv(source);
    double err = 0.0;
    for (int y = 0; y < side; ++y) {
      for (int x = 0; x < side; ++x) err += std::abs(face.at(x, y).v - truth.at(x, y).v);
    }
    worst = std::max(worst, err / (static_cast<double>(side) * side));
  }
  o.require(worst <= 0.02, "mean |dV| " + fmt("%.4f", worst));
  o.detail = "20 warps, worst mean |dV| " + fmt("%.4f", worst) + (o.pass ? "" : "; " + o.detail);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"structural invariants", structural_invariants},
      {"oracle equivalence", oracle_equivalence},
      {"ALDE correctness", alde_correctness},
      {"ELM optimality", elm_optimality},
      {"drift finding", drift_finding},
      {"feature correctness", feature_correctness},
      {"determinism", determinism},
      {"rectification round trip", rectification_round_trip},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << i + 1 << " " << (o.pass ? "PASS" : "FAIL") << ": " << criteria[i].first << " ("
              << o.detail << ")" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
