#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "qaml/image.hpp"

namespace qaml {

// kernel_linear exists for validation only: kernel PCA with a linear kernel
// must reproduce linear PCA projections, which pins down the centering and
// scaling conventions.
enum class PcaKind { Linear, KernelRbf, KernelLinear };

struct PcaModel {
  PcaKind kind = PcaKind::Linear;
  int input_dim = 0;
  int output_dim = 0;
  Eigen::VectorXd mean;      // input-space mean (input_dim)
  // Linear: input_dim x output_dim, orthonormal columns.
  // Kernel: n_train x output_dim dual coefficients a_i / sqrt(lambda_i).
  Eigen::MatrixXd components;
  Eigen::VectorXd eigenvalues;   // top output_dim, descending
  double total_variance = 0.0;   // full spectrum sum for the variance ratio

  // Kernel-only state.
  double kernel_gamma = 0.0;
  Eigen::MatrixXd train_points;       // n_train x input_dim
  Eigen::VectorXd kernel_row_means;   // row means of the uncentered Gram
  double kernel_mean = 0.0;           // grand mean of the uncentered Gram
  Eigen::MatrixXd train_projections;  // n_train x output_dim, fit-time coords
};

// 1 / (d * median pairwise squared distance) over the rows of x. Pairwise
// medians use a deterministic subsample of at most 512 rows.
double default_rbf_gamma(const Eigen::MatrixXd& x);

// Throws std::invalid_argument for fewer than output_dim + 1 samples or a
// missing gamma mode mismatch; EvalError when the spectrum has rank below
// output_dim. Component signs are canonicalized: the largest-magnitude
// entry of each column is made positive.
PcaModel fit_pca(const LabeledDataset& data, PcaKind kind, int output_dim,
                 std::optional<double> kernel_gamma = std::nullopt);

// Throws std::invalid_argument on dimension mismatch.
Eigen::VectorXd pca_transform(const PcaModel& model, const ImageTensor& image);
Eigen::VectorXd pca_transform_flat(const PcaModel& model,
                                   const Eigen::VectorXd& flat);

// Rows = samples, columns = principal coordinates.
Eigen::MatrixXd pca_transform_all(const PcaModel& model,
                                  const LabeledDataset& data);

// eigenvalues / total_variance.
Eigen::VectorXd explained_variance_ratio(const PcaModel& model);

// Versioned little-endian binary format (magic "QPCA", u32 version = 1):
//   u32 kind, u32 input_dim, u32 output_dim, u32 n_train,
//   f64 kernel_gamma, f64 total_variance, f64 kernel_mean,
//   mean[input_dim], eigenvalues[output_dim],
//   components (column-major), then for kernel kinds: train_points
//   (row-major), kernel_row_means, train_projections (column-major).
void save_pca(const PcaModel& model, const std::string& path);
PcaModel load_pca(const std::string& path);

}  // namespace qaml
