#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "taxaug/features.hpp"
#include "taxaug/reduce.hpp"

namespace taxaug {

/// 1/2 |w|^2 + C * sum_i max(0, 1 - y_i (w.x_i + b))^2. Labels are +1 / -1.
double svm_objective(const Vector& w, double b, const Matrix& rows, std::span<const double> labels, double C);

/// Gradient of svm_objective with respect to (w, b).
void svm_gradient(const Vector& w, double b, const Matrix& rows, std::span<const double> labels, double C,
                  Vector& grad_w, double& grad_b);

struct TrainOptions {
  double C = 1.0;
  /// Stop when |grad| <= tol * max(1, |grad at start|).
  double tol = 1e-6;
  int max_iter = 20000;
};

struct BinaryFit {
  Vector w;
  double b = 0.0;
  double objective = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;  // false: max_iter hit, (w, b) is the last iterate
};

/// Full-batch gradient descent on svm_objective. Each iteration steps along
/// -grad, starting from the Barzilai-Borwein step length and halving until
/// the Armijo condition holds. Starts at (w0, b0) when given, else at zero.
BinaryFit train_binary(const Matrix& rows, std::span<const double> labels, const TrainOptions& opts,
                       const Vector* w0 = nullptr, double b0 = 0.0);

/// Train-set z-scoring. Zero-variance columns keep scale 1.
struct Standardizer {
  Vector mean;
  Vector scale;

  static Standardizer fit(const Matrix& rows);
  static Standardizer identity(std::size_t dims);
  Matrix apply(const Matrix& rows) const;
};

struct SvmModel {
  int n_classes = 0;
  std::size_t dims = 0;
  Matrix weights;  // n_classes x dims, in standardized coordinates
  Vector biases;
  double C = 1.0;
  Standardizer standardizer;
  int convergence_warnings = 0;

  /// w_s . standardize(x) + b_s for every class.
  Vector decision_values(std::span<const double> x) const;
  /// Per-class weights expressed on the unstandardized inputs.
  Matrix input_weights() const;
};

struct MulticlassOptions {
  TrainOptions train;
  bool standardize = true;
};

/// One-vs-rest: class s is trained with +1 for species s and -1 otherwise.
/// Labels are species ids in [0, n_classes).
SvmModel train_multiclass(const Matrix& rows, std::span<const int> labels, int n_classes,
                          const MulticlassOptions& opts = {});
SvmModel train_multiclass(const FeatureTable& t, double C);

/// Argmax of decision values; ties go to the lowest species id.
int predict(const SvmModel& m, std::span<const double> x);
SampleLabel predict(const SvmModel& m, const FeatureVector& x, const std::vector<std::string>& species_names);

/// "SVM1", u32 classes, u32 dims, f64 C, then f64 payload: standardizer
/// mean[dims], scale[dims], weights[classes x dims], biases[classes].
void write_svm(const SvmModel& m, const std::filesystem::path& path);
SvmModel read_svm(const std::filesystem::path& path);

}  // namespace taxaug
