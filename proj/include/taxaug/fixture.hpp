#pragma once

#include <cstdint>
#include <filesystem>

#include "taxaug/dataset.hpp"
#include "taxaug/features.hpp"

namespace taxaug {

struct FixtureOptions {
  int classes = 20;
  int min_count = 2;
  int max_count = 7;
  int dims = 512;
  int gan_per_class = 20;
  std::uint64_t seed = 20210101;

  // Feature-space model: class means and within-class spread live in a
  // low-dimensional latent subspace; isotropic noise covers all dims.
  int latent_dims = 16;
  double class_spread = 1.0;
  double within_spread = 0.9;
  double noise = 0.35;
  double rotation_jitter = 0.25;  // per rotated child, along a few nuisance axes
  double gan_spread = 1.1;        // GAN rows are slightly more diffuse than real ones

  // Image mode writes PGM images instead of a feature file.
  bool images = false;
  int image_size = 64;
};

struct Fixture {
  DatasetManifest manifest;  // originals + GAN rows, as written
  FeatureTable features;     // originals, GAN rows and every rotated child (feature mode)
};

/// Seeded synthetic dataset. Class sizes are drawn in [min_count, max_count]
/// with both bounds present. In feature mode the table also holds the
/// rotated children `<id>@rot<angle>` for the +/-5..+/-20 set so rotation
/// runs can resolve them.
Fixture make_fixture(const FixtureOptions& opts);

/// make_fixture, then writes manifest.csv and features.fvec (or images/*.pgm).
Fixture write_fixture(const FixtureOptions& opts, const std::filesystem::path& out_dir);

}  // namespace taxaug
