#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

namespace taxaug {

/// Row-major, interleaved channels, intensities in [0, 1].
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, int channels, double value = 0.0);
  RasterImage(int width, int height, int channels, std::vector<double> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return pixels_.empty(); }

  double at(int x, int y, int c = 0) const {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  double& at(int x, int y, int c = 0) {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  const std::vector<double>& pixels() const { return pixels_; }

  bool operator==(const RasterImage&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> pixels_;
};

/// Luma with fixed weights 0.299 R + 0.587 G + 0.114 B. Grayscale input is copied.
RasterImage to_grayscale(const RasterImage& img);

/// Mean absolute per-value difference; images must share shape.
double mean_abs_diff(const RasterImage& a, const RasterImage& b);

/// PNG (any bit depth, read as 8-bit gray or RGB; alpha dropped) or binary PGM
/// (P5, maxval <= 65535),
/// chosen by extension.
RasterImage read_image(const std::filesystem::path& path);

/// Writes 8-bit PNG (.png) or 8-bit P5 PGM (.pgm, grayscale only).
void write_image(const RasterImage& img, const std::filesystem::path& path);

}  // namespace taxaug
