#include "taxaug/explain.hpp"

#include <algorithm>
#include <cmath>

#include "taxaug/error.hpp"

namespace taxaug {

double ScalarMap::min() const { return *std::min_element(values.begin(), values.end()); }
double ScalarMap::max() const { return *std::max_element(values.begin(), values.end()); }

ScalarMap compute_cam(const FeatureMaps& maps, std::span<const double> class_weights) {
  if (class_weights.size() != static_cast<std::size_t>(maps.channels()))
    throw Error(ErrorCode::shape, "CAM needs " + std::to_string(maps.channels()) + " weights, got " +
                                      std::to_string(class_weights.size()));
  ScalarMap raw{maps.width(), maps.height(), std::vector<double>(static_cast<std::size_t>(maps.width()) * maps.height(), 0.0)};
  for (int c = 0; c < maps.channels(); ++c) {
    const double w = class_weights[c];
    for (int h = 0; h < maps.height(); ++h)
      for (int x = 0; x < maps.width(); ++x) raw.at(x, h) += w * maps.at(c, h, x);
  }
  return raw;
}

ScalarMap upscale_bilinear(const ScalarMap& raw, int target_w, int target_h) {
  if (raw.width < 1 || raw.height < 1) throw Error(ErrorCode::shape, "empty map");
  if (target_w < raw.width || target_h < raw.height)
    throw Error(ErrorCode::range, "upscale target smaller than the source map");
  ScalarMap out{target_w, target_h, std::vector<double>(static_cast<std::size_t>(target_w) * target_h)};
  auto coord = [](int i, int src, int dst) {
    return dst == 1 ? 0.0 : static_cast<double>(i) * (src - 1) / (dst - 1);
  };
  for (int y = 0; y < target_h; ++y) {
    const double sy = coord(y, raw.height, target_h);
    const int y0 = std::min(static_cast<int>(sy), raw.height - 1);
    const int y1 = std::min(y0 + 1, raw.height - 1);
    const double ay = sy - y0;
    for (int x = 0; x < target_w; ++x) {
      const double sx = coord(x, raw.width, target_w);
      const int x0 = std::min(static_cast<int>(sx), raw.width - 1);
      const int x1 = std::min(x0 + 1, raw.width - 1);
      const double ax = sx - x0;
      const double top = (1 - ax) * raw.at(x0, y0) + ax * raw.at(x1, y0);
      const double bot = (1 - ax) * raw.at(x0, y1) + ax * raw.at(x1, y1);
      out.at(x, y) = (1 - ay) * top + ay * bot;
    }
  }
  return out;
}

Heatmap normalize(const ScalarMap& m) {
  Heatmap hm{m};
  const double lo = m.min(), hi = m.max();
  for (auto& v : hm.map.values) v = hi > lo ? std::clamp((v - lo) / (hi - lo), 0.0, 1.0) : 0.0;
  return hm;
}

std::array<double, 3> heat_color(double v) {
  static constexpr std::array<std::array<double, 3>, 4> stops = {{
      {0.0, 0.0, 1.0},  // blue
      {0.0, 1.0, 0.0},  // green
      {1.0, 0.5, 0.0},  // orange
      {1.0, 0.0, 0.0},  // red
  }};
  v = std::clamp(v, 0.0, 1.0) * 3.0;
  const int i = std::min(static_cast<int>(v), 2);
  const double t = v - i;
  return {(1 - t) * stops[i][0] + t * stops[i + 1][0], (1 - t) * stops[i][1] + t * stops[i + 1][1],
          (1 - t) * stops[i][2] + t * stops[i + 1][2]};
}

RasterImage render_overlay(const RasterImage& img, const Heatmap& hm, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::range, "alpha must lie in [0, 1]");
  if (hm.map.width != img.width() || hm.map.height != img.height())
    throw Error(ErrorCode::shape, "heatmap and image sizes differ");
  const RasterImage gray = to_grayscale(img);
  RasterImage out(img.width(), img.height(), 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const auto color = heat_color(hm.map.at(x, y));
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = (1 - alpha) * gray.at(x, y) + alpha * color[c];
    }
  }
  return out;
}

Matrix backproject_weights(const PcaModel& pca, const SvmModel& svm) {
  const auto n = static_cast<Eigen::Index>(svm.dims);
  if (n < 1 || n > pca.components.rows()) throw Error(ErrorCode::shape, "SVM width exceeds the PCA components");
  return svm.input_weights() * pca.components.topRows(n);
}

RasterImage explain_image(const RasterImage& img, const FeatureMaps& maps, std::span<const double> class_weights,
                          double alpha, Heatmap* heatmap) {
  const Heatmap hm = normalize(upscale_bilinear(compute_cam(maps, class_weights), img.width(), img.height()));
  if (heatmap) *heatmap = hm;
  return render_overlay(img, hm, alpha);
}

}  // namespace taxaug
