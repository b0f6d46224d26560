#include "taxaug/reduce.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "taxaug/error.hpp"

namespace taxaug {

Matrix to_matrix(const FeatureTable& t) {
  Matrix m(static_cast<Eigen::Index>(t.size()), static_cast<Eigen::Index>(t.dims()));
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t d = 0; d < t.dims(); ++d) m(i, d) = t[i].values[d];
  return m;
}

std::size_t PcaModel::rank() const {
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < explained_ratio.size(); ++i)
    if (explained_ratio[i] > 0.0) ++r;
  return r;
}

namespace {

// Eigenvalues below this fraction of the largest are rounding noise.
constexpr double kRelativeZero = 1e-12;

}  // namespace

PcaModel fit_pca(const Matrix& rows) {
  const auto n = rows.rows();
  const auto d = rows.cols();
  if (d < 1) throw Error(ErrorCode::degenerate, "PCA needs at least one dimension");
  if (n < 2) throw Error(ErrorCode::degenerate, "PCA needs at least two rows");
  if (!rows.allFinite()) throw Error(ErrorCode::data, "non-finite value in PCA input");

  PcaModel m;
  m.input_dims = static_cast<std::size_t>(d);
  m.mean = rows.colwise().mean().transpose();
  const Matrix centered = rows.rowwise() - m.mean.transpose();
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::numeric, "covariance eigendecomposition failed");

  // Eigen returns ascending eigenvalues; flip to descending.
  m.eigenvalues.resize(d);
  m.components.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Eigen::Index src = d - 1 - i;
    m.eigenvalues[i] = solver.eigenvalues()[src];
    Vector v = solver.eigenvectors().col(src);
    Eigen::Index pivot = 0;
    const double biggest = v.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < d; ++j) {
      if (std::abs(v[j]) >= biggest - 1e-12) {
        pivot = j;
        break;
      }
    }
    if (v[pivot] < 0) v = -v;
    m.components.row(i) = v.transpose();
  }
  const double top = std::max(0.0, m.eigenvalues[0]);
  for (Eigen::Index i = 0; i < d; ++i)
    if (m.eigenvalues[i] <= top * kRelativeZero) m.eigenvalues[i] = 0.0;
  const double total = m.eigenvalues.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::degenerate, "PCA input has zero variance");
  m.explained_ratio = m.eigenvalues / total;
  return m;
}

PcaModel fit_pca(const FeatureTable& t) { return fit_pca(to_matrix(t)); }

Matrix transform(const PcaModel& m, const Matrix& rows, std::size_t n_components) {
  if (static_cast<std::size_t>(rows.cols()) != m.input_dims)
    throw Error(ErrorCode::shape, "input has " + std::to_string(rows.cols()) + " dims, PCA expects " +
                                      std::to_string(m.input_dims));
  if (n_components < 1 || n_components > m.input_dims)
    throw Error(ErrorCode::range, "n_components must lie in [1, " + std::to_string(m.input_dims) + "]");
  const auto n = static_cast<Eigen::Index>(n_components);
  return (rows.rowwise() - m.mean.transpose()) * m.components.topRows(n).transpose();
}

FeatureTable transform(const PcaModel& m, const FeatureTable& t, std::size_t n_components) {
  if (t.dims() != m.input_dims)
    throw Error(ErrorCode::shape, "table has " + std::to_string(t.dims()) + " dims, PCA expects " +
                                      std::to_string(m.input_dims));
  const Matrix scores = transform(m, to_matrix(t), n_components);
  FeatureTable out(n_components);
  for (std::size_t i = 0; i < t.size(); ++i) {
    FeatureVector fv = t[i];
    fv.values.assign(scores.row(i).data(), scores.row(i).data() + scores.cols());
    out.add(std::move(fv));
  }
  return out;
}

Matrix reconstruct(const PcaModel& m, const Matrix& scores) {
  const auto n = scores.cols();
  if (n < 1 || static_cast<std::size_t>(n) > m.input_dims) throw Error(ErrorCode::shape, "bad score width");
  return (scores * m.components.topRows(n)).rowwise() + m.mean.transpose();
}

std::size_t components_for_ctv(const PcaModel& m, double ctv_percent) {
  if (!(ctv_percent > 0.0) || ctv_percent > 100.0)
    throw Error(ErrorCode::range, "CTV percent must lie in (0, 100]");
  const std::size_t rank = std::max<std::size_t>(1, m.rank());
  const double target = ctv_percent / 100.0 - 1e-12;
  double cum = 0.0;
  for (std::size_t i = 0; i < rank; ++i) {
    cum += m.explained_ratio[static_cast<Eigen::Index>(i)];
    if (cum >= target) return i + 1;
  }
  return rank;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4) throw Error(ErrorCode::format, "truncated PCA blob");
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (in.gcount() != 8) throw Error(ErrorCode::format, "truncated PCA blob");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

// "PCA1", u32 dims, u32 components, then f64: mean[dims], eigenvalues[c],
// components[c x dims] row-major. Ratios are recomputed on read.
void write_pca(const PcaModel& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path.string() + "'");
  out.write("PCA1", 4);
  const auto d = static_cast<std::uint32_t>(m.input_dims);
  const auto c = static_cast<std::uint32_t>(m.components.rows());
  put_u32(out, d);
  put_u32(out, c);
  for (Eigen::Index i = 0; i < m.mean.size(); ++i) put_f64(out, m.mean[i]);
  for (Eigen::Index i = 0; i < m.eigenvalues.size(); ++i) put_f64(out, m.eigenvalues[i]);
  for (Eigen::Index i = 0; i < m.components.rows(); ++i)
    for (Eigen::Index j = 0; j < m.components.cols(); ++j) put_f64(out, m.components(i, j));
}

PcaModel read_pca(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, "PCA1", 4) != 0)
    throw Error(ErrorCode::format, "'" + path.string() + "' is not a PCA1 blob");
  PcaModel m;
  const auto d = get_u32(in);
  const auto c = get_u32(in);
  if (d == 0 || c == 0 || c > d) throw Error(ErrorCode::format, "bad PCA1 header");
  m.input_dims = d;
  m.mean.resize(d);
  for (std::uint32_t i = 0; i < d; ++i) m.mean[i] = get_f64(in);
  m.eigenvalues.resize(c);
  for (std::uint32_t i = 0; i < c; ++i) m.eigenvalues[i] = get_f64(in);
  m.components.resize(c, d);
  for (std::uint32_t i = 0; i < c; ++i)
    for (std::uint32_t j = 0; j < d; ++j) m.components(i, j) = get_f64(in);
  const double total = m.eigenvalues.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::format, "PCA1 blob has no variance");
  m.explained_ratio = m.eigenvalues / total;
  return m;
}

std::vector<int> ctv_grid() {
  std::vector<int> g;
  for (int p = 10; p <= 100; p += 10) g.push_back(p);
  return g;
}

CtvSweepResult ctv_sweep(const std::function<CtvSweepEntry(int)>& evaluate, const std::vector<int>& grid) {
  if (grid.empty()) throw Error(ErrorCode::config, "empty CTV grid");
  CtvSweepResult result;
  for (int ctv : grid) {
    if (ctv < 10 || ctv > 100 || ctv % 10 != 0)
      throw Error(ErrorCode::config, "CTV grid values must come from {10, 20, ..., 100}");
    CtvSweepEntry e;
    try {
      e = evaluate(ctv);
    } catch (const Error& err) {
      throw Error(err.code(), "CTV " + std::to_string(ctv) + "%: " + err.what());
    } catch (const std::exception& err) {
      throw Error(ErrorCode::numeric, "CTV " + std::to_string(ctv) + "%: " + err.what());
    }
    e.ctv_percent = ctv;
    if (result.entries.empty() || e.mean_accuracy > result.best.mean_accuracy ||
        (e.mean_accuracy == result.best.mean_accuracy && ctv < result.best.ctv_percent))
      result.best = e;
    result.entries.push_back(e);
  }
  return result;
}

CtvSweepResult ctv_sweep(const PcaModel& m, const std::function<double(std::size_t)>& accuracy_for_dims,
                         const std::vector<int>& grid) {
  return ctv_sweep(
      [&](int ctv) {
        const auto n = components_for_ctv(m, ctv);
        return CtvSweepEntry{ctv, static_cast<double>(n), accuracy_for_dims(n)};
      },
      grid);
}

}  // namespace taxaug
