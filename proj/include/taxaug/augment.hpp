#pragma once

#include <optional>
#include <string>
#include <vector>

#include "taxaug/dataset.hpp"
#include "taxaug/image.hpp"

namespace taxaug {

inline constexpr double kMaxRotationDeg = 20.0;

/// Rotation about the image centre ((w-1)/2, (h-1)/2) with bilinear
/// resampling on the unchanged canvas. Positive angles turn the content
/// counter-clockwise as displayed. Samples falling outside the source take
/// `fill`; when no fill is given, the per-channel median of the border pixels
/// is used.
RasterImage rotate_image(const RasterImage& img, double angle_deg,
                         std::optional<double> fill = std::nullopt);

/// Per-channel median of the outermost ring of pixels.
std::vector<double> border_median(const RasterImage& img);

/// {-max, ..., -step, +step, ..., +max}, ascending, no zero.
std::vector<double> rotation_set(double angles_max, double step);

/// Id of the rotated child of `parent_id` at `angle_deg`, e.g. "P12@rot-15".
std::string rotated_id(const std::string& parent_id, double angle_deg);

/// Appends one rotated child per (original, angle), originals in manifest
/// order, angles ascending. Children share their parent's payload; the pixels
/// are produced when features are resolved.
DatasetManifest augment_dataset(const DatasetManifest& m, const std::vector<double>& angles);

}  // namespace taxaug
