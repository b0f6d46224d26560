#include "taxaug/classify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "taxaug/error.hpp"

namespace taxaug {

namespace {

Eigen::Map<const Vector> as_vector(std::span<const double> s) {
  return Eigen::Map<const Vector>(s.data(), static_cast<Eigen::Index>(s.size()));
}

void check_problem(const Matrix& rows, std::span<const double> labels, double C) {
  if (static_cast<std::size_t>(rows.rows()) != labels.size())
    throw Error(ErrorCode::shape, "row and label counts differ");
  if (!(C > 0.0) || !std::isfinite(C)) throw Error(ErrorCode::range, "penalty C must be a positive finite number");
  for (double y : labels)
    if (y != 1.0 && y != -1.0) throw Error(ErrorCode::range, "binary labels must be +1 or -1");
  if (!rows.allFinite()) throw Error(ErrorCode::numeric, "non-finite training value");
}

// Squared-hinge loss sum for margins z = Xw + b.
double loss_sum(const Vector& margins, const Vector& y) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    const double r = 1.0 - y[i] * margins[i];
    if (r > 0) s += r * r;
  }
  return s;
}

}  // namespace

double svm_objective(const Vector& w, double b, const Matrix& rows, std::span<const double> labels, double C) {
  check_problem(rows, labels, C);
  if (w.size() != rows.cols()) throw Error(ErrorCode::shape, "weight length does not match row width");
  if (!w.allFinite() || !std::isfinite(b)) throw Error(ErrorCode::numeric, "non-finite parameters");
  const Vector margins = (rows * w).array() + b;
  return 0.5 * w.squaredNorm() + C * loss_sum(margins, as_vector(labels));
}

void svm_gradient(const Vector& w, double b, const Matrix& rows, std::span<const double> labels, double C,
                  Vector& grad_w, double& grad_b) {
  check_problem(rows, labels, C);
  if (w.size() != rows.cols()) throw Error(ErrorCode::shape, "weight length does not match row width");
  const auto y = as_vector(labels);
  const Vector margins = (rows * w).array() + b;
  Vector coef(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) coef[i] = std::max(0.0, 1.0 - y[i] * margins[i]) * y[i];
  grad_w = w - 2.0 * C * (rows.transpose() * coef);
  grad_b = -2.0 * C * coef.sum();
}

BinaryFit train_binary(const Matrix& rows, std::span<const double> labels, const TrainOptions& opts,
                       const Vector* w0, double b0) {
  check_problem(rows, labels, opts.C);
  if (opts.max_iter < 0 || !(opts.tol > 0.0)) throw Error(ErrorCode::range, "bad solver options");
  const auto y = as_vector(labels);
  const Eigen::Index n = rows.rows(), d = rows.cols();
  if (std::find(labels.begin(), labels.end(), 1.0) == labels.end() ||
      std::find(labels.begin(), labels.end(), -1.0) == labels.end())
    throw Error(ErrorCode::missing_class, "binary training needs both +1 and -1 labels");
  const double C = opts.C;

  BinaryFit fit;
  fit.w = w0 ? *w0 : Vector::Zero(d);
  if (fit.w.size() != d) throw Error(ErrorCode::shape, "initial weight length does not match row width");
  fit.b = w0 ? b0 : 0.0;

  Vector margins = (rows * fit.w).array() + fit.b;
  double f = 0.5 * fit.w.squaredNorm() + C * loss_sum(margins, y);
  Vector coef(n), gw(d), xg(n), gw_prev(d), w_prev(d);
  double gb = 0.0, gb_prev = 0.0, b_prev = 0.0;

  auto gradient = [&]() {
    for (Eigen::Index i = 0; i < n; ++i) coef[i] = std::max(0.0, 1.0 - y[i] * margins[i]) * y[i];
    gw.noalias() = fit.w - 2.0 * C * (rows.transpose() * coef);
    gb = -2.0 * C * coef.sum();
  };
  gradient();
  double gnorm = std::sqrt(gw.squaredNorm() + gb * gb);
  const double stop = opts.tol * std::max(1.0, gnorm);
  double step = 1.0 / std::max(1.0, gnorm);

  int it = 0;
  for (; it < opts.max_iter && gnorm > stop; ++it) {
    if (it > 0) {
      const Vector sw = fit.w - w_prev;
      const double sb = fit.b - b_prev;
      const double ss = sw.squaredNorm() + sb * sb;
      const double sy = sw.dot(gw - gw_prev) + sb * (gb - gb_prev);
      step = sy > 0 ? ss / sy : step * 2.0;
    }
    // Trial points move linearly in the margins: z(t) = z - t * (X gw + gb).
    xg.noalias() = rows * gw;
    xg.array() += gb;
    const double wg = fit.w.dot(gw), gg = gw.squaredNorm();
    const double g2 = gnorm * gnorm;
    double f_new = f;
    Vector trial(n);
    int halvings = 0;
    for (;;) {
      trial = margins - step * xg;
      const double reg = 0.5 * (fit.w.squaredNorm() - 2 * step * wg + step * step * gg);
      f_new = reg + C * loss_sum(trial, y);
      if (f_new <= f - 1e-4 * step * g2) break;
      step *= 0.5;
      if (++halvings > 60) break;
    }
    if (halvings > 60) break;  // no descent possible at working precision
    w_prev = fit.w;
    b_prev = fit.b;
    gw_prev = gw;
    gb_prev = gb;
    fit.w -= step * gw;
    fit.b -= step * gb;
    margins = trial;
    f = f_new;
    gradient();
    gnorm = std::sqrt(gw.squaredNorm() + gb * gb);
  }
  fit.objective = 0.5 * fit.w.squaredNorm() + C * loss_sum((rows * fit.w).array() + fit.b, y);
  fit.grad_norm = gnorm;
  fit.iterations = it;
  fit.converged = gnorm <= stop;
  return fit;
}

Standardizer Standardizer::fit(const Matrix& rows) {
  if (rows.rows() < 1) throw Error(ErrorCode::degenerate, "cannot standardize an empty table");
  Standardizer s;
  s.mean = rows.colwise().mean().transpose();
  s.scale.resize(rows.cols());
  const double n = static_cast<double>(rows.rows());
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    const double var = (rows.col(j).array() - s.mean[j]).square().sum() / n;
    s.scale[j] = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  return s;
}

Standardizer Standardizer::identity(std::size_t dims) {
  Standardizer s;
  s.mean = Vector::Zero(static_cast<Eigen::Index>(dims));
  s.scale = Vector::Ones(static_cast<Eigen::Index>(dims));
  return s;
}

Matrix Standardizer::apply(const Matrix& rows) const {
  if (rows.cols() != mean.size()) throw Error(ErrorCode::shape, "standardizer width mismatch");
  return ((rows.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array()).matrix();
}

Vector SvmModel::decision_values(std::span<const double> x) const {
  if (x.size() != dims)
    throw Error(ErrorCode::shape, "input has " + std::to_string(x.size()) + " dims, model expects " +
                                      std::to_string(dims));
  const Vector z = (as_vector(x) - standardizer.mean).cwiseQuotient(standardizer.scale);
  return weights * z + biases;
}

Matrix SvmModel::input_weights() const {
  return (weights.array().rowwise() / standardizer.scale.transpose().array()).matrix();
}

SvmModel train_multiclass(const Matrix& rows, std::span<const int> labels, int n_classes,
                          const MulticlassOptions& opts) {
  if (n_classes < 2) throw Error(ErrorCode::missing_class, "multiclass training needs >= 2 classes");
  if (static_cast<std::size_t>(rows.rows()) != labels.size())
    throw Error(ErrorCode::shape, "row and label counts differ");
  std::vector<std::size_t> counts(n_classes, 0);
  for (int l : labels) {
    if (l < 0 || l >= n_classes) throw Error(ErrorCode::range, "label outside [0, n_classes)");
    ++counts[l];
  }
  for (int s = 0; s < n_classes; ++s)
    if (counts[s] == 0) throw Error(ErrorCode::missing_class, "class " + std::to_string(s) + " has no training rows");

  SvmModel m;
  m.n_classes = n_classes;
  m.dims = static_cast<std::size_t>(rows.cols());
  m.C = opts.train.C;
  m.standardizer = opts.standardize ? Standardizer::fit(rows) : Standardizer::identity(m.dims);
  const Matrix z = m.standardizer.apply(rows);
  m.weights.resize(n_classes, rows.cols());
  m.biases.resize(n_classes);
  std::vector<double> y(labels.size());
  for (int s = 0; s < n_classes; ++s) {
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == s ? 1.0 : -1.0;
    const auto fit = train_binary(z, y, opts.train);
    m.weights.row(s) = fit.w.transpose();
    m.biases[s] = fit.b;
    if (!fit.converged) ++m.convergence_warnings;
  }
  return m;
}

SvmModel train_multiclass(const FeatureTable& t, double C) {
  std::vector<int> labels;
  int n_classes = 0;
  for (const auto& r : t.rows()) {
    labels.push_back(r.label.species_id);
    n_classes = std::max(n_classes, r.label.species_id + 1);
  }
  MulticlassOptions opts;
  opts.train.C = C;
  return train_multiclass(to_matrix(t), labels, n_classes, opts);
}

int predict(const SvmModel& m, std::span<const double> x) {
  const Vector v = m.decision_values(x);
  int best = 0;
  for (int s = 1; s < m.n_classes; ++s)
    if (v[s] > v[best]) best = s;
  return best;
}

SampleLabel predict(const SvmModel& m, const FeatureVector& x, const std::vector<std::string>& species_names) {
  const int s = predict(m, x.values);
  return {s, static_cast<std::size_t>(s) < species_names.size() ? species_names[s] : std::string()};
}

namespace {

void put_bytes(std::ostream& out, const void* p, std::size_t n) {
  unsigned char b[8];
  std::memcpy(b, p, n);
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + n);
  out.write(reinterpret_cast<const char*>(b), static_cast<std::streamsize>(n));
}

void get_bytes(std::istream& in, void* p, std::size_t n) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), static_cast<std::streamsize>(n));
  if (in.gcount() != static_cast<std::streamsize>(n)) throw Error(ErrorCode::format, "truncated SVM blob");
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + n);
  std::memcpy(p, b, n);
}

}  // namespace

void write_svm(const SvmModel& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path.string() + "'");
  out.write("SVM1", 4);
  const auto S = static_cast<std::uint32_t>(m.n_classes);
  const auto d = static_cast<std::uint32_t>(m.dims);
  put_bytes(out, &S, 4);
  put_bytes(out, &d, 4);
  put_bytes(out, &m.C, 8);
  for (Eigen::Index j = 0; j < m.standardizer.mean.size(); ++j) put_bytes(out, &m.standardizer.mean[j], 8);
  for (Eigen::Index j = 0; j < m.standardizer.scale.size(); ++j) put_bytes(out, &m.standardizer.scale[j], 8);
  for (Eigen::Index s = 0; s < m.weights.rows(); ++s)
    for (Eigen::Index j = 0; j < m.weights.cols(); ++j) put_bytes(out, &m.weights(s, j), 8);
  for (Eigen::Index s = 0; s < m.biases.size(); ++s) put_bytes(out, &m.biases[s], 8);
}

SvmModel read_svm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, "SVM1", 4) != 0)
    throw Error(ErrorCode::format, "'" + path.string() + "' is not an SVM1 blob");
  std::uint32_t S = 0, d = 0;
  SvmModel m;
  get_bytes(in, &S, 4);
  get_bytes(in, &d, 4);
  get_bytes(in, &m.C, 8);
  if (S < 2 || d < 1) throw Error(ErrorCode::format, "bad SVM1 header");
  m.n_classes = static_cast<int>(S);
  m.dims = d;
  m.standardizer.mean.resize(d);
  m.standardizer.scale.resize(d);
  for (std::uint32_t j = 0; j < d; ++j) get_bytes(in, &m.standardizer.mean[j], 8);
  for (std::uint32_t j = 0; j < d; ++j) get_bytes(in, &m.standardizer.scale[j], 8);
  m.weights.resize(S, d);
  for (std::uint32_t s = 0; s < S; ++s)
    for (std::uint32_t j = 0; j < d; ++j) get_bytes(in, &m.weights(s, j), 8);
  m.biases.resize(S);
  for (std::uint32_t s = 0; s < S; ++s) get_bytes(in, &m.biases[s], 8);
  return m;
}

}  // namespace taxaug
