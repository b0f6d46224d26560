#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oracle {

Eigen jacobi(std::vector<std::vector<double>> a, double tol, int max_sweeps) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0, scale = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) (i == j ? scale : off) += a[i][j] * a[i][j];
    if (off <= tol * tol * std::max(scale, 1e-300)) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return a[x][x] > a[y][y]; });
  Eigen out;
  for (auto i : order) {
    out.values.push_back(a[i][i]);
    std::vector<double> col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v[k][i];
    out.vectors.push_back(col);
  }
  return out;
}

std::vector<std::vector<double>> covariance(const Matrix& rows) {
  const auto n = static_cast<std::size_t>(rows.rows()), d = static_cast<std::size_t>(rows.cols());
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mean[j] += rows(i, j) / static_cast<double>(n);
  std::vector<std::vector<double>> c(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) c[j][k] += (rows(i, j) - mean[j]) * (rows(i, k) - mean[k]);
  for (auto& r : c)
    for (double& x : r) x /= static_cast<double>(n - 1);
  return c;
}

GridMin svm_grid_search(const Matrix& rows, const std::vector<double>& labels, double C) {
  constexpr int steps = 601;  // -3 .. 3 by 0.01
  auto at = [](int i) { return -3.0 + 0.01 * i; };
  const auto n = static_cast<std::size_t>(rows.rows());
  GridMin best{INFINITY, 0, 0, 0};
  for (int i = 0; i < steps; ++i) {
    const double w1 = at(i);
    for (int j = 0; j < steps; ++j) {
      const double w2 = at(j);
      auto f = [&](int k) {
        const double b = at(k);
        double loss = 0;
        for (std::size_t r = 0; r < n; ++r) {
          const double m = 1.0 - labels[r] * (w1 * rows(r, 0) + w2 * rows(r, 1) + b);
          if (m > 0) loss += m * m;
        }
        return 0.5 * (w1 * w1 + w2 * w2) + C * loss;
      };
      // Discrete convex function of k: bisect on the sign of the forward difference.
      int lo = 0, hi = steps - 1;
      while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (f(mid) <= f(mid + 1)) hi = mid;
        else lo = mid + 1;
      }
      const double v = f(lo);
      if (v < best.objective) best = {v, w1, w2, at(lo)};
    }
  }
  return best;
}

std::vector<std::size_t> brute_knn(const taxaug::FeatureTable& t, std::size_t query, std::size_t k,
                                   bool same_class_only) {
  std::vector<std::pair<double, std::size_t>> all;
  const auto& q = t[query];
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i == query) continue;
    if (same_class_only && t[i].label.species_id != q.label.species_id) continue;
    double d = 0;
    for (std::size_t j = 0; j < q.values.size(); ++j) d += (t[i].values[j] - q.values[j]) * (t[i].values[j] - q.values[j]);
    all.emplace_back(std::sqrt(d), i);
  }
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < std::min(k, all.size()); ++i) out.push_back(all[i].second);
  return out;
}

std::array<double, 2> cell_mean_std(const taxaug::RasterImage& gray, int grid, int gx, int gy) {
  const int W = gray.width(), H = gray.height();
  std::vector<double> px;
  for (int y = gy * H / grid; y < (gy + 1) * H / grid; ++y)
    for (int x = gx * W / grid; x < (gx + 1) * W / grid; ++x) px.push_back(gray.at(x, y));
  double mean = 0;
  for (double v : px) mean += v;
  mean /= static_cast<double>(px.size());
  double var = 0;
  for (double v : px) var += (v - mean) * (v - mean);
  return {mean, std::sqrt(var / static_cast<double>(px.size()))};
}

std::vector<double> bilinear_2x2_to_3x3(double a, double b, double c, double d) {
  // a b     a        (a+b)/2        b
  // c d ->  (a+c)/2  (a+b+c+d)/4    (b+d)/2
  //         c        (c+d)/2        d
  return {a, (a + b) / 2, b, (a + c) / 2, (a + b + c + d) / 4, (b + d) / 2, c, (c + d) / 2, d};
}

}  // namespace oracle
