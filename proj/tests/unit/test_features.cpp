#include <cmath>
#include <fstream>

#include "../oracles/oracles.hpp"
#include "support.hpp"
#include "taxaug/error.hpp"
#include "taxaug/features.hpp"

using namespace taxaug;

namespace {

FeatureTable small_table() {
  FeatureTable t(3);
  t.add({"a", {0, "alpha"}, {1.0, -2.5, 3.25}});
  t.add({"b", {1, "beta"}, {0.0, 1e-300, -7.0}});
  t.add({"c", {0, "alpha"}, {4.0, 5.0, 6.0}});
  return t;
}

RasterImage ramp(int w, int h) {
  RasterImage img(w, h, 1);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(x, y) = std::fmod(0.37 * x + 0.11 * y * y, 1.0);
  return img;
}

}  // namespace

TEST_SUITE("features") {
  TEST_CASE("fvec round trip is exact") {
    testing::TempDir dir("fvec");
    const auto t = small_table();
    write_feature_table(t, dir / "t.fvec");
    const auto back = read_feature_table(dir / "t.fvec");
    CHECK(back.dims() == 3);
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(back[i].sample_id == t[i].sample_id);
      CHECK(back[i].label.species_name == t[i].label.species_name);
      CHECK(back[i].values == t[i].values);
    }
    const auto info = validate_feature_file(dir / "t.fvec");
    CHECK(info.dims == 3);
    CHECK(info.rows == 3);
  }

  TEST_CASE("csv fallback round trip") {
    testing::TempDir dir("fcsv");
    write_feature_table(small_table(), dir / "t.csv");
    const auto back = read_feature_table(dir / "t.csv");
    REQUIRE(back.size() == 3);
    CHECK(back[0].values == small_table()[0].values);
    CHECK(back[2].values == small_table()[2].values);
  }

  TEST_CASE("fvec layout is little-endian with length-prefixed strings") {
    testing::TempDir dir("fvec-layout");
    FeatureTable t(1);
    t.add({"id", {0, "sp"}, {1.0}});
    write_feature_table(t, dir / "t.fvec");
    const std::string bytes = testing::read_file(dir / "t.fvec");
    const std::string expect = std::string("FVEC1\n") + std::string("\x01\0\0\0", 4) + std::string("\x01\0\0\0", 4) +
                               std::string("\x02\0", 2) + "id" + std::string("\x02\0", 2) + "sp" +
                               std::string("\0\0\0\0\0\0\xf0\x3f", 8);
    CHECK(bytes == expect);
  }

  TEST_CASE("corrupt feature files are rejected") {
    testing::TempDir dir("fvec-bad");
    write_feature_table(small_table(), dir / "t.fvec");
    const std::string good = testing::read_file(dir / "t.fvec");

    testing::write_file(dir / "trunc.fvec", good.substr(0, good.size() - 3));
    CHECK_THROWS_AS(read_feature_table(dir / "trunc.fvec"), Error);
    testing::write_file(dir / "tail.fvec", good + "x");
    CHECK_THROWS_AS(read_feature_table(dir / "tail.fvec"), Error);
    testing::write_file(dir / "magic.fvec", "FVEC2\n" + good.substr(6));
    CHECK_THROWS_AS(read_feature_table(dir / "magic.fvec"), Error);

    std::string nan = good;
    const double q = std::nan("");
    nan.replace(nan.size() - 8, 8, reinterpret_cast<const char*>(&q), 8);
    testing::write_file(dir / "nan.fvec", nan);
    try {
      read_feature_table(dir / "nan.fvec");
      FAIL("expected a data error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::data);
    }
  }

  TEST_CASE("duplicate ids and ragged rows are refused") {
    FeatureTable t(2);
    t.add({"a", {0, "x"}, {1, 2}});
    CHECK_THROWS_AS(t.add({"a", {0, "x"}, {1, 2}}), Error);
    CHECK_THROWS_AS(t.add({"b", {0, "x"}, {1}}), Error);
    CHECK(t.find("a") != nullptr);
    CHECK(t.find("zz") == nullptr);
  }

  TEST_CASE("global average pooling") {
    FeatureMaps maps(2, 2, 2, std::vector<double>{1, 2, 3, 4, -1, -1, 1, 1});
    const auto v = global_average_pool(maps);
    CHECK(v.values == std::vector<double>{2.5, 0.0});
  }

  TEST_CASE("mock extractor matches a per-cell loop") {
    const auto img = ramp(23, 17);
    const auto maps = mock_extract(img, 4, kStatMean | kStatStdDev);
    REQUIRE(maps.channels() == 2);
    for (int gy = 0; gy < 4; ++gy)
      for (int gx = 0; gx < 4; ++gx) {
        const auto [mean, sd] = oracle::cell_mean_std(img, 4, gx, gy);
        CHECK(maps.at(0, gy, gx) == doctest::Approx(mean).epsilon(1e-12));
        CHECK(maps.at(1, gy, gx) == doctest::Approx(sd).epsilon(1e-9));
      }
    CHECK(mock_channel_count(kStatAll) == 8);
    CHECK(mock_extract(img, 7).channels() == 8);
  }

  TEST_CASE("mock gradients see a horizontal ramp only along x") {
    RasterImage img(16, 16, 1);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) img.at(x, y) = x / 16.0;
    const auto maps = mock_extract(img, 2, kStatGradient | kStatEdges);
    // Interior cells: |d/dx| = 1/16, |d/dy| = 0, all edge energy in the 0 deg bin.
    CHECK(maps.at(1, 0, 0) == doctest::Approx(0.0));
    CHECK(maps.at(0, 0, 0) > 0.0);
    CHECK(maps.at(2, 0, 0) > 0.0);
    CHECK(maps.at(3, 0, 0) == 0.0);
    CHECK(maps.at(4, 0, 0) == 0.0);
    CHECK(maps.at(5, 0, 0) == 0.0);
  }

  TEST_CASE("extractor rejects images smaller than the grid") {
    CHECK_THROWS_AS(mock_extract(RasterImage(3, 3, 1), 7), Error);
  }
}
