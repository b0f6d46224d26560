#include "taxaug/features.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

#include "taxaug/error.hpp"

namespace taxaug {

FeatureMaps::FeatureMaps(int channels, int height, int width, double value)
    : channels_(channels), height_(height), width_(width) {
  if (channels < 1 || height < 1 || width < 1) throw Error(ErrorCode::shape, "feature maps need C, H, W >= 1");
  values_.assign(static_cast<std::size_t>(channels) * height * width, value);
}

FeatureMaps::FeatureMaps(int channels, int height, int width, std::vector<double> values)
    : channels_(channels), height_(height), width_(width), values_(std::move(values)) {
  if (channels < 1 || height < 1 || width < 1) throw Error(ErrorCode::shape, "feature maps need C, H, W >= 1");
  if (values_.size() != static_cast<std::size_t>(channels) * height * width)
    throw Error(ErrorCode::shape, "feature map value count does not match C x H x W");
  for (double v : values_)
    if (!std::isfinite(v)) throw Error(ErrorCode::data, "non-finite feature map value");
}

FeatureTable::FeatureTable(std::size_t dims, std::vector<FeatureVector> rows) : dims_(dims) {
  rows_.reserve(rows.size());
  for (auto& r : rows) add(std::move(r));
}

void FeatureTable::add(FeatureVector row) {
  if (row.values.size() != dims_)
    throw Error(ErrorCode::shape, "row '" + row.sample_id + "' has " + std::to_string(row.values.size()) +
                                      " values, table has " + std::to_string(dims_));
  for (double v : row.values)
    if (!std::isfinite(v)) throw Error(ErrorCode::data, "non-finite value in row '" + row.sample_id + "'");
  if (!index_.emplace(row.sample_id, rows_.size()).second)
    throw Error(ErrorCode::duplicate, "duplicate sample_id '" + row.sample_id + "' in feature table");
  rows_.push_back(std::move(row));
}

const FeatureVector* FeatureTable::find(const std::string& sample_id) const {
  auto it = index_.find(sample_id);
  return it == index_.end() ? nullptr : &rows_[it->second];
}

FeatureVector global_average_pool(const FeatureMaps& maps) {
  FeatureVector v;
  v.values.resize(maps.channels());
  const std::size_t cell = static_cast<std::size_t>(maps.height()) * maps.width();
  const double* p = maps.values().data();
  for (int c = 0; c < maps.channels(); ++c, p += cell) {
    double sum = 0.0;
    for (std::size_t i = 0; i < cell; ++i) sum += p[i];
    v.values[c] = sum / static_cast<double>(cell);
  }
  return v;
}

std::size_t mock_channel_count(unsigned stats) {
  std::size_t k = 0;
  if (stats & kStatMean) k += 1;
  if (stats & kStatStdDev) k += 1;
  if (stats & kStatGradient) k += 2;
  if (stats & kStatEdges) k += 4;
  return k;
}

FeatureMaps mock_extract(const RasterImage& raw, int grid, unsigned stats) {
  if (grid < 1) throw Error(ErrorCode::geometry, "grid must be >= 1");
  if (raw.empty()) throw Error(ErrorCode::geometry, "cannot extract features from an empty image");
  if (raw.width() < grid || raw.height() < grid)
    throw Error(ErrorCode::geometry, "image smaller than the extraction grid");
  const std::size_t K = mock_channel_count(stats);
  if (K == 0) throw Error(ErrorCode::range, "no mock statistics selected");

  const RasterImage img = to_grayscale(raw);
  const int W = img.width(), H = img.height();
  auto px = [&](int x, int y) {
    return img.at(std::clamp(x, 0, W - 1), std::clamp(y, 0, H - 1));
  };

  FeatureMaps maps(static_cast<int>(K), grid, grid);
  for (int gy = 0; gy < grid; ++gy) {
    const int y0 = gy * H / grid, y1 = (gy + 1) * H / grid;
    for (int gx = 0; gx < grid; ++gx) {
      const int x0 = gx * W / grid, x1 = (gx + 1) * W / grid;
      const double n = static_cast<double>((y1 - y0) * (x1 - x0));
      double sum = 0, sumsq = 0, adx = 0, ady = 0;
      double bins[4] = {0, 0, 0, 0};
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          const double v = img.at(x, y);
          sum += v;
          sumsq += v * v;
          const double dx = 0.5 * (px(x + 1, y) - px(x - 1, y));
          const double dy = 0.5 * (px(x, y + 1) - px(x, y - 1));
          adx += std::abs(dx);
          ady += std::abs(dy);
          const double mag = std::hypot(dx, dy);
          if (mag > 0) {
            double angle = std::atan2(dy, dx);
            if (angle < 0) angle += std::numbers::pi;
            int bin = static_cast<int>(std::floor((angle + std::numbers::pi / 8) / (std::numbers::pi / 4))) % 4;
            bins[bin] += mag;
          }
        }
      }
      const double mean = sum / n;
      int c = 0;
      if (stats & kStatMean) maps.at(c++, gy, gx) = mean;
      if (stats & kStatStdDev) maps.at(c++, gy, gx) = std::sqrt(std::max(0.0, sumsq / n - mean * mean));
      if (stats & kStatGradient) {
        maps.at(c++, gy, gx) = adx / n;
        maps.at(c++, gy, gx) = ady / n;
      }
      if (stats & kStatEdges)
        for (double b : bins) maps.at(c++, gy, gx) = b / n;
    }
  }
  return maps;
}

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const std::filesystem::path& path) {
  unsigned char bytes[sizeof(T)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(T)))
    throw Error(ErrorCode::format, "truncated feature file '" + path.string() + "'");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

std::string get_string(std::istream& in, const std::filesystem::path& path) {
  const auto len = get_le<std::uint16_t>(in, path);
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (in.gcount() != len) throw Error(ErrorCode::format, "truncated feature file '" + path.string() + "'");
  return s;
}

constexpr char kMagic[] = "FVEC1\n";
constexpr std::size_t kMagicLen = 6;

bool is_csv(const std::filesystem::path& p) {
  auto e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == ".csv";
}

// Species ids in a feature file follow first appearance, like the manifest.
void assign_labels(std::vector<FeatureVector>& rows) {
  std::vector<std::string> names;
  for (auto& r : rows) {
    auto it = std::find(names.begin(), names.end(), r.label.species_name);
    r.label.species_id = static_cast<int>(it - names.begin());
    if (it == names.end()) names.push_back(r.label.species_name);
  }
}

void write_csv(const FeatureTable& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path.string() + "'");
  out << "sample_id,species_name";
  for (std::size_t d = 0; d < t.dims(); ++d) out << ",v" << d;
  out << '\n';
  char buf[64];
  for (const auto& r : t.rows()) {
    if (r.sample_id.find_first_of(",\"\n") != std::string::npos ||
        r.label.species_name.find_first_of(",\"\n") != std::string::npos)
      throw Error(ErrorCode::format, "CSV feature files cannot hold ids containing ',', '\"' or newlines");
    out << r.sample_id << ',' << r.label.species_name;
    for (double v : r.values) {
      auto res = std::to_chars(buf, buf + sizeof buf, v);
      out << ',' << std::string_view(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

FeatureTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::format, "empty feature CSV '" + path.string() + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("sample_id,species_name", 0) != 0)
    throw Error(ErrorCode::format, "feature CSV header must start with 'sample_id,species_name'");
  const std::size_t dims = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) - 1;
  std::vector<FeatureVector> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    FeatureVector fv;
    std::size_t start = 0, field = 0;
    for (;;) {
      std::size_t end = line.find(',', start);
      std::string_view tok(line.data() + start, (end == std::string::npos ? line.size() : end) - start);
      if (field == 0) {
        fv.sample_id = tok;
      } else if (field == 1) {
        fv.label.species_name = tok;
      } else {
        double v = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size())
          throw Error(ErrorCode::format, "line " + std::to_string(line_no) + ": bad number '" + std::string(tok) + "'");
        if (!std::isfinite(v))
          throw Error(ErrorCode::data, "line " + std::to_string(line_no) + ": non-finite value");
        fv.values.push_back(v);
      }
      ++field;
      if (end == std::string::npos) break;
      start = end + 1;
    }
    if (fv.values.size() != dims)
      throw Error(ErrorCode::format, "line " + std::to_string(line_no) + ": expected " + std::to_string(dims) +
                                         " values, got " + std::to_string(fv.values.size()));
    rows.push_back(std::move(fv));
  }
  assign_labels(rows);
  return FeatureTable(dims, std::move(rows));
}

}  // namespace

void write_feature_table(const FeatureTable& t, const std::filesystem::path& path) {
  for (const auto& r : t.rows())
    for (double v : r.values)
      if (!std::isfinite(v)) throw Error(ErrorCode::data, "non-finite value in row '" + r.sample_id + "'");
  if (is_csv(path)) return write_csv(t, path);
  if (t.dims() > UINT32_MAX || t.size() > UINT32_MAX)
    throw Error(ErrorCode::format, "feature table too large for .fvec");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path.string() + "'");
  out.write(kMagic, kMagicLen);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.dims()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.size()));
  for (const auto& r : t.rows()) {
    for (const std::string* s : {&r.sample_id, &r.label.species_name}) {
      if (s->size() > UINT16_MAX) throw Error(ErrorCode::format, "string too long for .fvec");
      put_le<std::uint16_t>(out, static_cast<std::uint16_t>(s->size()));
      out.write(s->data(), static_cast<std::streamsize>(s->size()));
    }
    for (double v : r.values) put_le<double>(out, v);
  }
  if (!out) throw Error(ErrorCode::io, "write failed for '" + path.string() + "'");
}

FeatureTable read_feature_table(const std::filesystem::path& path) {
  if (is_csv(path)) return read_csv(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  char magic[kMagicLen];
  in.read(magic, kMagicLen);
  if (in.gcount() != static_cast<std::streamsize>(kMagicLen) || std::memcmp(magic, kMagic, kMagicLen) != 0)
    throw Error(ErrorCode::format, "'" + path.string() + "' is not an FVEC1 file");
  const auto dims = get_le<std::uint32_t>(in, path);
  const auto count = get_le<std::uint32_t>(in, path);
  std::vector<FeatureVector> rows;
  rows.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    FeatureVector fv;
    fv.sample_id = get_string(in, path);
    fv.label.species_name = get_string(in, path);
    fv.values.resize(dims);
    for (auto& v : fv.values) {
      v = get_le<double>(in, path);
      if (!std::isfinite(v))
        throw Error(ErrorCode::data, "non-finite value in row '" + fv.sample_id + "' of '" + path.string() + "'");
    }
    rows.push_back(std::move(fv));
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw Error(ErrorCode::format, "trailing bytes after " + std::to_string(count) + " rows in '" +
                                       path.string() + "'");
  assign_labels(rows);
  return FeatureTable(dims, std::move(rows));
}

FeatureFileInfo validate_feature_file(const std::filesystem::path& path) {
  const auto t = read_feature_table(path);
  return {static_cast<std::uint32_t>(t.dims()), static_cast<std::uint32_t>(t.size())};
}

}  // namespace taxaug
