#include "taxaug/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "taxaug/error.hpp"

namespace taxaug {

RasterImage::RasterImage(int width, int height, int channels, double value)
    : width_(width), height_(height), channels_(channels) {
  if (width < 1 || height < 1 || (channels != 1 && channels != 3))
    throw Error(ErrorCode::geometry, "invalid image geometry");
  pixels_.assign(static_cast<std::size_t>(width) * height * channels, value);
}

RasterImage::RasterImage(int width, int height, int channels, std::vector<double> pixels)
    : width_(width), height_(height), channels_(channels), pixels_(std::move(pixels)) {
  if (width < 1 || height < 1 || (channels != 1 && channels != 3))
    throw Error(ErrorCode::geometry, "invalid image geometry");
  if (pixels_.size() != static_cast<std::size_t>(width) * height * channels)
    throw Error(ErrorCode::shape, "pixel count does not match geometry");
  for (double v : pixels_)
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
      throw Error(ErrorCode::data, "pixel value outside [0,1]");
}

RasterImage to_grayscale(const RasterImage& img) {
  if (img.channels() == 1) return img;
  RasterImage out(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      out.at(x, y) = std::clamp(
          0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2), 0.0, 1.0);
  return out;
}

double mean_abs_diff(const RasterImage& a, const RasterImage& b) {
  if (a.width() != b.width() || a.height() != b.height() || a.channels() != b.channels())
    throw Error(ErrorCode::shape, "image shapes differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.pixels().size(); ++i) sum += std::abs(a.pixels()[i] - b.pixels()[i]);
  return a.pixels().empty() ? 0.0 : sum / static_cast<double>(a.pixels().size());
}

namespace {

std::string lower_ext(const std::filesystem::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

RasterImage read_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw Error(ErrorCode::io, "cannot read PNG '" + path.string() + "': " + image.message);
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::io, "cannot decode PNG '" + path.string() + "': " + msg);
  }
  const int channels = color ? 3 : 1;
  std::vector<double> px(buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) px[i] = buffer[i] / 255.0;
  return RasterImage(static_cast<int>(image.width), static_cast<int>(image.height), channels,
                     std::move(px));
}

void write_png(const RasterImage& img, const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(img.pixels().size());
  for (std::size_t i = 0; i < buffer.size(); ++i)
    buffer[i] = static_cast<png_byte>(std::lround(std::clamp(img.pixels()[i], 0.0, 1.0) * 255.0));
  if (!png_image_write_to_file(&image, path.c_str(), 0, buffer.data(), 0, nullptr))
    throw Error(ErrorCode::io, "cannot write PNG '" + path.string() + "': " + image.message);
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok += static_cast<char>(c);
  }
  return tok;
}

RasterImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  if (pgm_token(in) != "P5") throw Error(ErrorCode::format, "'" + path.string() + "' is not a P5 PGM");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(pgm_token(in));
    h = std::stoi(pgm_token(in));
    maxval = std::stoi(pgm_token(in));
  } catch (const std::exception&) {
    throw Error(ErrorCode::format, "bad PGM header in '" + path.string() + "'");
  }
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
    throw Error(ErrorCode::format, "bad PGM header in '" + path.string() + "'");
  const std::size_t n = static_cast<std::size_t>(w) * h;
  const std::size_t bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(n * bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size())
    throw Error(ErrorCode::format, "truncated PGM '" + path.string() + "'");
  std::vector<double> px(n);
  for (std::size_t i = 0; i < n; ++i) {
    unsigned v = bytes == 2 ? (raw[2 * i] << 8) | raw[2 * i + 1] : raw[i];
    px[i] = std::min(1.0, static_cast<double>(v) / maxval);
  }
  return RasterImage(w, h, 1, std::move(px));
}

void write_pgm(const RasterImage& img, const std::filesystem::path& path) {
  if (img.channels() != 1) throw Error(ErrorCode::shape, "PGM output requires a grayscale image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path.string() + "'");
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  for (double v : img.pixels())
    out.put(static_cast<char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
}

}  // namespace

RasterImage read_image(const std::filesystem::path& path) {
  const auto ext = lower_ext(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".pgm") return read_pgm(path);
  throw Error(ErrorCode::format, "unsupported image type '" + path.string() + "'");
}

void write_image(const RasterImage& img, const std::filesystem::path& path) {
  const auto ext = lower_ext(path);
  if (ext == ".png") return write_png(img, path);
  if (ext == ".pgm") return write_pgm(img, path);
  throw Error(ErrorCode::format, "unsupported image type '" + path.string() + "'");
}

}  // namespace taxaug
