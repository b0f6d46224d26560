#include "taxaug/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "taxaug/error.hpp"

namespace taxaug {

std::vector<double> border_median(const RasterImage& img) {
  std::vector<double> out(img.channels());
  for (int c = 0; c < img.channels(); ++c) {
    std::vector<double> ring;
    for (int x = 0; x < img.width(); ++x) {
      ring.push_back(img.at(x, 0, c));
      if (img.height() > 1) ring.push_back(img.at(x, img.height() - 1, c));
    }
    for (int y = 1; y + 1 < img.height(); ++y) {
      ring.push_back(img.at(0, y, c));
      if (img.width() > 1) ring.push_back(img.at(img.width() - 1, y, c));
    }
    const auto mid = ring.size() / 2;
    std::nth_element(ring.begin(), ring.begin() + mid, ring.end());
    double m = ring[mid];
    if (ring.size() % 2 == 0) {
      const double lo = *std::max_element(ring.begin(), ring.begin() + mid);
      m = 0.5 * (m + lo);
    }
    out[c] = m;
  }
  return out;
}

RasterImage rotate_image(const RasterImage& img, double angle_deg, std::optional<double> fill) {
  if (img.empty()) throw Error(ErrorCode::geometry, "cannot rotate an empty image");
  if (!std::isfinite(angle_deg) || std::abs(angle_deg) > kMaxRotationDeg)
    throw Error(ErrorCode::range, "rotation angle must lie in [-20, 20] degrees");
  if (fill && (!std::isfinite(*fill) || *fill < 0.0 || *fill > 1.0))
    throw Error(ErrorCode::range, "fill intensity must lie in [0, 1]");
  if (angle_deg == 0.0) return img;

  const auto fills = fill ? std::vector<double>(img.channels(), *fill) : border_median(img);
  const int w = img.width(), h = img.height(), nc = img.channels();
  const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
  const double theta = angle_deg * std::numbers::pi / 180.0;
  const double cs = std::cos(theta), sn = std::sin(theta);

  RasterImage out(w, h, nc);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // Inverse map. With y pointing down, counter-clockwise display rotation
      // by theta sends source (u,v) to (cs*u + sn*v, -sn*u + cs*v).
      const double dx = x - cx, dy = y - cy;
      const double sx = cs * dx - sn * dy + cx;
      const double sy = sn * dx + cs * dy + cy;
      const double eps = 1e-9;
      if (sx < -eps || sy < -eps || sx > w - 1 + eps || sy > h - 1 + eps) {
        for (int c = 0; c < nc; ++c) out.at(x, y, c) = fills[c];
        continue;
      }
      const double fx = std::clamp(sx, 0.0, static_cast<double>(w - 1));
      const double fy = std::clamp(sy, 0.0, static_cast<double>(h - 1));
      const int x0 = std::min(static_cast<int>(fx), std::max(w - 2, 0));
      const int y0 = std::min(static_cast<int>(fy), std::max(h - 2, 0));
      const int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
      const double ax = fx - x0, ay = fy - y0;
      for (int c = 0; c < nc; ++c) {
        const double top = (1 - ax) * img.at(x0, y0, c) + ax * img.at(x1, y0, c);
        const double bot = (1 - ax) * img.at(x0, y1, c) + ax * img.at(x1, y1, c);
        out.at(x, y, c) = std::clamp((1 - ay) * top + ay * bot, 0.0, 1.0);
      }
    }
  }
  return out;
}

std::vector<double> rotation_set(double angles_max, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::range, "rotation step must be > 0");
  if (!(angles_max > 0.0)) throw Error(ErrorCode::range, "maximum rotation must be > 0");
  const double ratio = angles_max / step;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-9 || n < 1)
    throw Error(ErrorCode::range, "rotation step must divide the maximum angle");
  std::vector<double> out;
  const int count = static_cast<int>(n);
  for (int i = count; i >= 1; --i) out.push_back(-i * step);
  for (int i = 1; i <= count; ++i) out.push_back(i * step);
  return out;
}

std::string rotated_id(const std::string& parent_id, double angle_deg) {
  std::ostringstream os;
  os << parent_id << "@rot" << (angle_deg > 0 ? "+" : "") << angle_deg;
  return os.str();
}

DatasetManifest augment_dataset(const DatasetManifest& m, const std::vector<double>& angles) {
  if (angles.empty()) throw Error(ErrorCode::range, "augmentation needs at least one angle");
  auto sorted = angles;
  std::sort(sorted.begin(), sorted.end());
  for (double a : sorted)
    if (!std::isfinite(a) || std::abs(a) > kMaxRotationDeg)
      throw Error(ErrorCode::range, "rotation angle must lie in [-20, 20] degrees");

  auto records = m.records();
  for (const auto& r : m.records()) {
    if (r.provenance != Provenance::original) continue;
    for (double a : sorted) {
      SampleRecord child;
      child.sample_id = rotated_id(r.sample_id, a);
      child.label = r.label;
      child.payload = r.payload;
      child.provenance = Provenance::rotated;
      child.angle_deg = a;
      child.parent_id = r.sample_id;
      records.push_back(std::move(child));
    }
  }
  return DatasetManifest::from_records(std::move(records));
}

}  // namespace taxaug
