#include "cubecolor/sbelm.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "base64.hpp"
#include "cubecolor/errors.hpp"
#include "cubecolor/random.hpp"

namespace cubecolor {

namespace {

constexpr const char* kModelFormat = "cubecolor-sbelm";
constexpr int kModelVersion = 1;

void check_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(want) +
                         ", got " + std::to_string(got));
  }
}

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xff) << (8 * (7 - i));
    return r;
  }
  return v;
}

nlohmann::json encode_matrix(const Eigen::MatrixXd& m) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(static_cast<std::size_t>(m.size()) * 8);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const auto bits = to_little_endian(std::bit_cast<std::uint64_t>(m(r, c)));
      for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    }
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", detail::base64_encode(bytes)}};
}

Eigen::MatrixXd decode_matrix(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  if (rows < 0 || cols < 0) throw ModelFormatError("negative matrix dimension");
  const auto bytes = detail::base64_decode(j.at("data").get<std::string>());
  if (bytes.size() != static_cast<std::size_t>(rows * cols * 8)) {
    throw ModelFormatError("matrix payload size does not match its dimensions");
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t at = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      std::uint64_t bits = 0;
      for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[at++]) << (8 * i);
      m(r, c) = std::bit_cast<double>(to_little_endian(bits));
    }
  }
  return m;
}

}  // namespace

LabeledDataset::LabeledDataset(Eigen::MatrixXd x, std::vector<int> y, int classes)
    : x_(std::move(x)), y_(std::move(y)), classes_(classes) {
  if (x_.cols() < 1) throw DimensionError("feature dimension must be at least 1");
  if (classes_ < 1) throw DimensionError("class count must be at least 1");
  check_dim(static_cast<Eigen::Index>(y_.size()), x_.rows(), "label count");
  if (x_.rows() < classes_) throw DimensionError("need at least one sample per class");
  std::vector<int> seen(static_cast<std::size_t>(classes_), 0);
  for (int label : y_) {
    if (label < 0 || label >= classes_) {
      throw DimensionError("label " + std::to_string(label) + " outside [0, " +
                           std::to_string(classes_) + ")");
    }
    ++seen[static_cast<std::size_t>(label)];
  }
  for (int i = 0; i < classes_; ++i) {
    if (seen[static_cast<std::size_t>(i)] == 0) {
      throw DimensionError("class " + std::to_string(i) + " has no samples");
    }
  }
}

Eigen::VectorXd unitize(const Eigen::VectorXd& v) {
  const double n = v.norm();
  if (n > 1e-12) return v / n;
  return Eigen::VectorXd::Zero(v.size());
}

ScatterPair compute_scatter(const LabeledDataset& data) {
  const auto d = data.dim();
  const auto n = data.samples();
  const auto c = static_cast<std::size_t>(data.classes());

  std::vector<Eigen::VectorXd> class_mean(c, Eigen::VectorXd::Zero(d));
  std::vector<double> class_count(c, 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto label = static_cast<std::size_t>(data.y()[static_cast<std::size_t>(j)]);
    class_mean[label] += data.x().row(j).transpose();
    class_count[label] += 1.0;
  }
  for (std::size_t i = 0; i < c; ++i) class_mean[i] /= class_count[i];
  const Eigen::VectorXd mean = data.x().colwise().mean().transpose();

  ScatterPair out{Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Zero(d, d)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto label = static_cast<std::size_t>(data.y()[static_cast<std::size_t>(j)]);
    const Eigen::VectorXd e = unitize(data.x().row(j).transpose() - class_mean[label]);
    out.within.noalias() += e * e.transpose();
  }
  for (std::size_t i = 0; i < c; ++i) {
    const Eigen::VectorXd e = unitize(class_mean[i] - mean);
    out.between.noalias() += class_count[i] * (e * e.transpose());
  }
  out.within /= static_cast<double>(n);
  out.between /= static_cast<double>(n);
  return out;
}

Eigen::MatrixXd alde_objective(const ScatterPair& scatter) {
  const auto d = scatter.within.rows();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, d) / static_cast<double>(d) - scatter.within +
                      scatter.between;
  // Symmetrize away round-off.
  return (m + m.transpose()) / 2.0;
}

AldeModel alde_fit(const LabeledDataset& data, int k) {
  if (k < 1 || k > data.dim()) {
    throw DimensionError("ALDE output dimension k=" + std::to_string(k) + " must lie in [1, " +
                         std::to_string(data.dim()) + "]");
  }
  const Eigen::MatrixXd m = alde_objective(compute_scatter(data));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) throw SingularSystem("eigendecomposition did not converge");

  const auto d = m.rows();
  AldeModel model{Eigen::MatrixXd(d, k), Eigen::VectorXd(k)};
  for (int col = 0; col < k; ++col) {
    // Eigen sorts eigenvalues ascending.
    const auto src = d - 1 - col;
    Eigen::VectorXd v = eig.eigenvectors().col(src);
    Eigen::Index pivot = 0;
    for (Eigen::Index r = 1; r < d; ++r) {
      if (std::abs(v(r)) > std::abs(v(pivot))) pivot = r;
    }
    if (v(pivot) < 0.0) v = -v;
    model.w.col(col) = v;
    model.eigenvalues(col) = eig.eigenvalues()(src);
  }
  return model;
}

Eigen::VectorXd alde_transform(const AldeModel& model, const Eigen::VectorXd& x) {
  check_dim(x.size(), model.input_dim(), "ALDE input");
  return model.w.transpose() * x;
}

Eigen::MatrixXd alde_transform_rows(const AldeModel& model, const Eigen::MatrixXd& x) {
  check_dim(x.cols(), model.input_dim(), "ALDE input");
  return x * model.w;
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Eigen::MatrixXd elm_hidden(const ElmModel& model, const Eigen::MatrixXd& x) {
  check_dim(x.cols(), model.input_dim(), "ELM input");
  Eigen::MatrixXd h = x * model.input_weights.transpose();
  h.rowwise() += model.biases.transpose();
  return h.unaryExpr([](double v) { return sigmoid(v); });
}

Eigen::MatrixXd one_hot(const std::vector<int>& y, int classes) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(y.size()), classes);
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (y[j] < 0 || y[j] >= classes) throw DimensionError("label outside class range");
    t(static_cast<Eigen::Index>(j), y[j]) = 1.0;
  }
  return t;
}

ElmModel elm_train(const Eigen::MatrixXd& x, const std::vector<int>& y, int classes, int hidden,
                   double c, std::uint64_t seed) {
  if (hidden < 1) throw DimensionError("hidden node count must be at least 1");
  if (!(c > 0.0) || !std::isfinite(c)) throw DimensionError("regularization C must be positive");
  if (classes < 1) throw DimensionError("class count must be at least 1");
  check_dim(static_cast<Eigen::Index>(y.size()), x.rows(), "label count");
  if (!x.allFinite()) throw SingularSystem("training features contain NaN or Inf");

  ElmModel model;
  model.c = c;
  model.seed = seed;
  model.input_weights.resize(hidden, x.cols());
  model.biases.resize(hidden);
  Rng rng(seed);
  for (Eigen::Index i = 0; i < hidden; ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) model.input_weights(i, j) = rng.uniform(-1.0, 1.0);
  }
  for (Eigen::Index i = 0; i < hidden; ++i) model.biases(i) = rng.uniform(-1.0, 1.0);

  const Eigen::MatrixXd h = elm_hidden(model, x);
  const Eigen::MatrixXd t = one_hot(y, classes);
  Eigen::MatrixXd gram = h.transpose() * h;
  gram.diagonal().array() += 1.0 / c;
  const Eigen::MatrixXd rhs = h.transpose() * t;

  const Eigen::LDLT<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) throw SingularSystem("regularized ELM system is singular");
  Eigen::MatrixXd beta = solver.solve(rhs);
  // One step of iterative refinement keeps the residual small for large C.
  beta += solver.solve(rhs - gram * beta);
  if (!beta.allFinite()) throw SingularSystem("regularized ELM system is singular");
  model.beta = std::move(beta);
  return model;
}

int elm_predict(const ElmModel& model, const Eigen::VectorXd& x) {
  check_dim(x.size(), model.input_dim(), "ELM input");
  Eigen::VectorXd hidden = model.input_weights * x + model.biases;
  hidden = hidden.unaryExpr([](double v) { return sigmoid(v); });
  const Eigen::VectorXd scores = model.beta.transpose() * hidden;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i) {
    if (scores(i) > scores(best)) best = i;
  }
  return static_cast<int>(best);
}

double elm_stationarity_residual(const ElmModel& model, const Eigen::MatrixXd& x,
                                 const std::vector<int>& y) {
  const Eigen::MatrixXd h = elm_hidden(model, x);
  const Eigen::MatrixXd t = one_hot(y, static_cast<int>(model.classes()));
  const Eigen::MatrixXd grad = model.beta + model.c * h.transpose() * (h * model.beta - t);
  const double norm = model.beta.norm();
  return norm > 0.0 ? grad.norm() / norm : grad.norm();
}

SbElmModel sbelm_train(const LabeledDataset& data, const SbElmParams& params,
                       const UnevenPartition& partition) {
  SbElmModel model{alde_fit(data, params.k), {}, partition};
  const Eigen::MatrixXd projected = alde_transform_rows(model.alde, data.x());
  model.elm = elm_train(projected, data.y(), data.classes(), params.hidden, params.c, params.seed);
  return model;
}

int sbelm_predict(const SbElmModel& model, const Eigen::VectorXd& x) {
  return elm_predict(model.elm, alde_transform(model.alde, x));
}

std::string serialize_model(const SbElmModel& model) {
  nlohmann::json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["alde"] = {{"input_dim", model.alde.input_dim()},
               {"output_dim", model.alde.output_dim()},
               {"w", encode_matrix(model.alde.w)},
               {"eigenvalues", encode_matrix(model.alde.eigenvalues)}};
  j["elm"] = {{"input_dim", model.elm.input_dim()},
              {"hidden", model.elm.hidden()},
              {"classes", model.elm.classes()},
              {"c", encode_matrix(Eigen::MatrixXd::Constant(1, 1, model.elm.c))},
              {"seed", model.elm.seed},
              {"input_weights", encode_matrix(model.elm.input_weights)},
              {"biases", encode_matrix(model.elm.biases)},
              {"beta", encode_matrix(model.elm.beta)}};
  j["partition"] = model.partition.to_json();
  return j.dump(2) + "\n";
}

SbElmModel deserialize_model(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format").get<std::string>() != kModelFormat) {
      throw ModelFormatError("not a cubecolor SB-ELM model file");
    }
    const int version = j.at("version").get<int>();
    if (version != kModelVersion) {
      throw ModelFormatError("unsupported model version " + std::to_string(version) +
                             " (expected " + std::to_string(kModelVersion) + ")");
    }
    const auto& a = j.at("alde");
    const auto& e = j.at("elm");
    SbElmModel model{{decode_matrix(a.at("w")), decode_matrix(a.at("eigenvalues"))},
                     {},
                     UnevenPartition::from_json(j.at("partition"))};
    model.elm.input_weights = decode_matrix(e.at("input_weights"));
    model.elm.biases = decode_matrix(e.at("biases"));
    model.elm.beta = decode_matrix(e.at("beta"));
    model.elm.c = decode_matrix(e.at("c"))(0, 0);
    model.elm.seed = e.at("seed").get<std::uint64_t>();

    if (model.alde.input_dim() != a.at("input_dim").get<Eigen::Index>() ||
        model.alde.output_dim() != a.at("output_dim").get<Eigen::Index>() ||
        model.elm.hidden() != e.at("hidden").get<Eigen::Index>() ||
        model.elm.classes() != e.at("classes").get<Eigen::Index>() ||
        model.elm.input_dim() != model.alde.output_dim() ||
        model.elm.biases.size() != model.elm.hidden() ||
        model.elm.beta.rows() != model.elm.hidden()) {
      throw ModelFormatError("model dimensions are inconsistent");
    }
    return model;
  } catch (const nlohmann::json::exception& ex) {
    throw ModelFormatError(std::string("malformed model file: ") + ex.what());
  }
}

void save_model(const SbElmModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file " + path);
  out << serialize_model(model);
  if (!out) throw IoError("failed writing model file " + path);
}

SbElmModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_model(ss.str());
}

}  // namespace cubecolor
