#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cubecolor/color_features.hpp"

namespace cubecolor {

/// Samples in rows, labels in {0..classes-1}.
class LabeledDataset {
 public:
  LabeledDataset(Eigen::MatrixXd x, std::vector<int> y, int classes);

  const Eigen::MatrixXd& x() const noexcept { return x_; }
  const std::vector<int>& y() const noexcept { return y_; }
  int classes() const noexcept { return classes_; }
  Eigen::Index samples() const noexcept { return x_.rows(); }
  Eigen::Index dim() const noexcept { return x_.cols(); }

 private:
  Eigen::MatrixXd x_;
  std::vector<int> y_;
  int classes_;
};

/// Within-class and between-class scatter built from unitized differences.
struct ScatterPair {
  Eigen::MatrixXd within;
  Eigen::MatrixXd between;
};

struct AldeModel {
  Eigen::MatrixXd w;  ///< d x k, orthonormal columns
  /// Eigenvalues of M for the kept columns, non-increasing.
  Eigen::VectorXd eigenvalues;

  Eigen::Index input_dim() const noexcept { return w.rows(); }
  Eigen::Index output_dim() const noexcept { return w.cols(); }
};

struct ElmModel {
  Eigen::MatrixXd input_weights;  ///< hidden x d_in
  Eigen::VectorXd biases;         ///< hidden
  Eigen::MatrixXd beta;           ///< hidden x classes
  double c = 1.0;
  std::uint64_t seed = 42;

  Eigen::Index hidden() const noexcept { return input_weights.rows(); }
  Eigen::Index input_dim() const noexcept { return input_weights.cols(); }
  Eigen::Index classes() const noexcept { return beta.cols(); }
};

struct SbElmParams {
  int k = 8;
  int hidden = 100;
  double c = 1.0;
  std::uint64_t seed = 42;
};

struct SbElmModel {
  AldeModel alde;
  ElmModel elm;
  UnevenPartition partition = UnevenPartition::standard();
};

/// v / |v| when |v| > 1e-12, the zero vector otherwise.
Eigen::VectorXd unitize(const Eigen::VectorXd& v);

ScatterPair compute_scatter(const LabeledDataset& data);

/// M = I/d - S'w + S'b.
Eigen::MatrixXd alde_objective(const ScatterPair& scatter);

/// Top-k eigenvectors of M; each column's largest-magnitude entry is
/// positive (first such entry on ties).
AldeModel alde_fit(const LabeledDataset& data, int k);

Eigen::VectorXd alde_transform(const AldeModel& model, const Eigen::VectorXd& x);
/// Row-wise transform of a sample matrix.
Eigen::MatrixXd alde_transform_rows(const AldeModel& model, const Eigen::MatrixXd& x);

double sigmoid(double x);

/// sigmoid(X A^T + 1 b^T), one row per sample.
Eigen::MatrixXd elm_hidden(const ElmModel& model, const Eigen::MatrixXd& x);

/// One-hot rows.
Eigen::MatrixXd one_hot(const std::vector<int>& y, int classes);

/// Closed-form ridge solve beta = (I/C + H^T H)^-1 H^T T with input
/// weights and biases drawn uniformly from [-1, 1].
ElmModel elm_train(const Eigen::MatrixXd& x, const std::vector<int>& y, int classes, int hidden,
                   double c, std::uint64_t seed);

/// Argmax of the network output; lowest class wins ties.
int elm_predict(const ElmModel& model, const Eigen::VectorXd& x);

/// |beta + C H^T (H beta - T)| / |beta|, zero at the exact minimizer.
double elm_stationarity_residual(const ElmModel& model, const Eigen::MatrixXd& x,
                                 const std::vector<int>& y);

SbElmModel sbelm_train(const LabeledDataset& data, const SbElmParams& params,
                       const UnevenPartition& partition = UnevenPartition::standard());
int sbelm_predict(const SbElmModel& model, const Eigen::VectorXd& x);

std::string serialize_model(const SbElmModel& model);
SbElmModel deserialize_model(const std::string& text);
void save_model(const SbElmModel& model, const std::string& path);
SbElmModel load_model(const std::string& path);

}  // namespace cubecolor
