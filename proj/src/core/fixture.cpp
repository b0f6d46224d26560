#include "taxaug/fixture.hpp"

#include <cmath>
#include <numbers>

#include "taxaug/augment.hpp"
#include "taxaug/error.hpp"
#include "taxaug/rng.hpp"

namespace taxaug {

namespace {

// Box-Muller on the project generator so fixtures are portable.
double gaussian(Rng& rng) {
  double u1 = rng.uniform01();
  while (u1 <= 0.0) u1 = rng.uniform01();
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<double> gaussian_vector(Rng& rng, int n, double scale) {
  std::vector<double> v(n);
  for (auto& x : v) x = scale * gaussian(rng);
  return v;
}

std::vector<int> class_sizes(const FixtureOptions& o, Rng& rng) {
  std::vector<int> sizes(o.classes);
  const auto span = static_cast<std::uint64_t>(o.max_count - o.min_count + 1);
  for (auto& s : sizes) s = o.min_count + static_cast<int>(rng.below(span));
  // Both ends of the range are always represented.
  sizes[0] = o.max_count;
  if (o.classes > 1) sizes[1] = o.min_count;
  return sizes;
}

std::string species_name(int c) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "species_%02d", c);
  return buf;
}

std::string sample_name(int c, int i, const char* tag) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "s%02d_%s%02d", c, tag, i);
  return buf;
}

// dims x latent basis with unit-norm columns.
std::vector<std::vector<double>> random_basis(Rng& rng, int dims, int latent) {
  std::vector<std::vector<double>> basis(latent);
  for (auto& col : basis) {
    col = gaussian_vector(rng, dims, 1.0);
    double n = 0;
    for (double v : col) n += v * v;
    n = std::sqrt(n);
    for (double& v : col) v /= n;
  }
  return basis;
}

void add_latent(std::vector<double>& x, const std::vector<std::vector<double>>& basis,
                const std::vector<double>& coeffs, double scale) {
  for (std::size_t k = 0; k < basis.size(); ++k)
    for (std::size_t d = 0; d < x.size(); ++d) x[d] += scale * coeffs[k] * basis[k][d];
}

RasterImage draw_specimen(const FixtureOptions& o, int c, Rng& rng) {
  const int n = o.image_size;
  RasterImage img(n, n, 1);
  const double cx = (n - 1) / 2.0 + gaussian(rng) * 0.5, cy = (n - 1) / 2.0 + gaussian(rng) * 0.5;
  // Size and aspect carry the species signal; orientation is a nuisance.
  const double a = n * (0.22 + 0.03 * (c % 5)) * (1.0 + 0.04 * gaussian(rng));
  const double b = n * (0.10 + 0.025 * ((c / 5) % 4)) * (1.0 + 0.04 * gaussian(rng));
  const double tilt = (gaussian(rng) * 6.0) * std::numbers::pi / 180.0;
  const double spot_angle = 2.0 * std::numbers::pi * (c % 7) / 7.0;
  const double sx = cx + 0.6 * a * std::cos(spot_angle), sy = cy + 0.6 * b * std::sin(spot_angle);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double dx = x - cx, dy = y - cy;
      const double u = std::cos(tilt) * dx + std::sin(tilt) * dy;
      const double v = -std::sin(tilt) * dx + std::cos(tilt) * dy;
      const double r = std::sqrt((u / a) * (u / a) + (v / b) * (v / b));
      // Soft edge over about one pixel.
      double val = 0.15 + 0.55 / (1.0 + std::exp((r - 1.0) * a));
      const double ds = std::hypot(x - sx, y - sy);
      val += 0.25 * std::exp(-ds * ds / (2.0 * 2.5 * 2.5));
      val += 0.02 * gaussian(rng);
      img.at(x, y) = std::clamp(val, 0.0, 1.0);
    }
  }
  return img;
}

}  // namespace

Fixture make_fixture(const FixtureOptions& o) {
  if (o.classes < 2) throw Error(ErrorCode::config, "fixture needs >= 2 classes");
  if (o.min_count < 1 || o.max_count < o.min_count) throw Error(ErrorCode::config, "bad fixture class-size range");
  if (o.dims < 1 || o.latent_dims < 1 || o.gan_per_class < 0) throw Error(ErrorCode::config, "bad fixture dims");
  if (o.images && o.image_size < 16) throw Error(ErrorCode::config, "fixture images must be >= 16 px");

  Rng rng(o.seed);
  const auto sizes = class_sizes(o, rng);
  const auto angles = rotation_set(20.0, 5.0);
  Fixture fx;
  fx.features = FeatureTable(static_cast<std::size_t>(o.images ? 0 : o.dims));
  std::vector<SampleRecord> records;

  if (o.images) {
    for (int c = 0; c < o.classes; ++c) {
      for (int i = 0; i < sizes[c]; ++i) {
        SampleRecord r;
        r.sample_id = sample_name(c, i, "o");
        r.label.species_name = species_name(c);
        r.payload = "images/" + r.sample_id + ".pgm";
        records.push_back(r);
      }
      for (int g = 0; g < o.gan_per_class; ++g) {
        SampleRecord r;
        r.sample_id = sample_name(c, g, "g");
        r.label.species_name = species_name(c);
        r.payload = "images/" + r.sample_id + ".pgm";
        r.provenance = Provenance::gan_ingested;
        records.push_back(r);
      }
    }
    fx.manifest = DatasetManifest::from_records(std::move(records));
    return fx;
  }

  const auto latent = random_basis(rng, o.dims, o.latent_dims);
  const auto nuisance = random_basis(rng, o.dims, 4);
  std::vector<FeatureVector> rows;
  for (int c = 0; c < o.classes; ++c) {
    std::vector<double> mean(o.dims, 0.0);
    add_latent(mean, latent, gaussian_vector(rng, o.latent_dims, 1.0), o.class_spread);
    const SampleLabel label{c, species_name(c)};

    auto draw = [&](double spread) {
      std::vector<double> x = mean;
      add_latent(x, latent, gaussian_vector(rng, o.latent_dims, 1.0), o.within_spread * spread);
      for (double& v : x) v += o.noise / std::sqrt(static_cast<double>(o.dims) / o.latent_dims) * gaussian(rng);
      return x;
    };

    for (int i = 0; i < sizes[c]; ++i) {
      SampleRecord r;
      r.sample_id = sample_name(c, i, "o");
      r.label.species_name = label.species_name;
      r.payload = "features.fvec";
      records.push_back(r);
      FeatureVector fv{r.sample_id, label, draw(1.0), Provenance::original};
      for (double a : angles) {
        FeatureVector child{rotated_id(r.sample_id, a), label, fv.values, Provenance::rotated};
        add_latent(child.values, latent, gaussian_vector(rng, o.latent_dims, 1.0), o.rotation_jitter);
        add_latent(child.values, nuisance, gaussian_vector(rng, 4, 1.0), o.rotation_jitter);
        rows.push_back(std::move(child));
      }
      rows.push_back(std::move(fv));
    }
    for (int g = 0; g < o.gan_per_class; ++g) {
      SampleRecord r;
      r.sample_id = sample_name(c, g, "g");
      r.label.species_name = label.species_name;
      r.payload = "features.fvec";
      r.provenance = Provenance::gan_ingested;
      records.push_back(r);
      rows.push_back({r.sample_id, label, draw(o.gan_spread), Provenance::gan_ingested});
    }
  }
  fx.manifest = DatasetManifest::from_records(std::move(records));
  fx.features = FeatureTable(static_cast<std::size_t>(o.dims), std::move(rows));
  return fx;
}

Fixture write_fixture(const FixtureOptions& o, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  Fixture fx = make_fixture(o);
  if (o.images) {
    std::filesystem::create_directories(out_dir / "images");
    // Images are drawn in manifest order from a generator of their own, so
    // the manifest layout above does not depend on image content.
    Rng rng(derive_seed(o.seed, {1}));
    for (const auto& r : fx.manifest.records())
      write_image(draw_specimen(o, r.label.species_id, rng), out_dir / r.payload);
  } else {
    write_feature_table(fx.features, out_dir / "features.fvec");
  }
  write_manifest(fx.manifest, out_dir / "manifest.csv");
  return fx;
}

}  // namespace taxaug
