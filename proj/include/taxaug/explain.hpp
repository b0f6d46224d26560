#pragma once

#include <array>
#include <span>
#include <vector>

#include "taxaug/classify.hpp"
#include "taxaug/features.hpp"
#include "taxaug/image.hpp"
#include "taxaug/reduce.hpp"

namespace taxaug {

/// Dense H x W grid of reals, row-major.
struct ScalarMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  double min() const;
  double max() const;
};

/// Heatmap at image resolution, values in [0, 1].
struct Heatmap {
  ScalarMap map;
};

/// raw(h, w) = sum_c weights[c] * maps[c][h][w]. No clamping of negative evidence.
ScalarMap compute_cam(const FeatureMaps& maps, std::span<const double> class_weights);

/// Corner-aligned bilinear resize: target pixel i samples the source at
/// i * (src - 1) / (target - 1).
ScalarMap upscale_bilinear(const ScalarMap& raw, int target_w, int target_h);

/// Min-max scaling to [0, 1]; a constant map becomes all zeros.
Heatmap normalize(const ScalarMap& m);

/// Piecewise-linear colormap: 0 blue (0,0,1), 1/3 green (0,1,0),
/// 2/3 orange (1,0.5,0), 1 red (1,0,0).
std::array<double, 3> heat_color(double v);

/// Grayscale of `img` blended with the colormapped heatmap:
/// out = (1 - alpha) * gray + alpha * color. Always returns RGB.
RasterImage render_overlay(const RasterImage& img, const Heatmap& hm, double alpha);

/// Per-class weights on the pooled features for a classifier trained on the
/// first n PCA scores: components[0:n]^T * (w_s ./ scale).
Matrix backproject_weights(const PcaModel& pca, const SvmModel& svm);

/// compute_cam -> upscale to the image size -> normalize -> overlay.
RasterImage explain_image(const RasterImage& img, const FeatureMaps& maps, std::span<const double> class_weights,
                          double alpha, Heatmap* heatmap = nullptr);

}  // namespace taxaug
