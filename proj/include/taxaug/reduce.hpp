#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <functional>
#include <vector>

#include "taxaug/features.hpp"

namespace taxaug {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Stacks table rows into an n x dims matrix.
Matrix to_matrix(const FeatureTable& t);

/// Principal axes of a sample covariance (divisor n - 1). `components` holds
/// one direction per row in descending eigenvalue order; each row's
/// largest-magnitude coefficient is positive (first such index on ties).
struct PcaModel {
  std::size_t input_dims = 0;
  Vector mean;
  Matrix components;          // input_dims x input_dims
  Vector eigenvalues;         // clamped at 0
  Vector explained_ratio;

  /// Components with a nonzero explained ratio.
  std::size_t rank() const;
};

PcaModel fit_pca(const Matrix& rows);
PcaModel fit_pca(const FeatureTable& t);

/// Centres rows by the model mean and projects onto the first n_components axes.
Matrix transform(const PcaModel& m, const Matrix& rows, std::size_t n_components);
FeatureTable transform(const PcaModel& m, const FeatureTable& t, std::size_t n_components);

/// Maps scores back to the input space using the first scores.cols() axes.
Matrix reconstruct(const PcaModel& m, const Matrix& scores);

/// Smallest N with cumulative explained ratio >= ctv_percent / 100, at least 1
/// and at most rank().
std::size_t components_for_ctv(const PcaModel& m, double ctv_percent);

void write_pca(const PcaModel& m, const std::filesystem::path& path);
PcaModel read_pca(const std::filesystem::path& path);

/// The 10 %-step grid {10, 20, ..., 100}.
std::vector<int> ctv_grid();

struct CtvSweepEntry {
  int ctv_percent = 0;
  double retained_components = 0;  // averaged over folds when PCA is refit per fold
  double mean_accuracy = 0;
};

struct CtvSweepResult {
  std::vector<CtvSweepEntry> entries;
  CtvSweepEntry best;
};

/// Evaluates every CTV on the grid (ascending) and keeps the entry with the
/// highest mean accuracy; ties go to the smaller CTV. Exceptions thrown by the
/// callback are rethrown with the offending CTV in the message.
CtvSweepResult ctv_sweep(const std::function<CtvSweepEntry(int ctv_percent)>& evaluate,
                         const std::vector<int>& grid = ctv_grid());

/// Single-model form: retained dimensionality comes from `m`, the callback
/// scores a dimensionality.
CtvSweepResult ctv_sweep(const PcaModel& m,
                         const std::function<double(std::size_t retained)>& accuracy_for_dims,
                         const std::vector<int>& grid = ctv_grid());

}  // namespace taxaug
