#include "support.hpp"
#include "taxaug/augment.hpp"
#include "taxaug/error.hpp"

using namespace taxaug;

TEST_SUITE("augment") {
  TEST_CASE("rotation set is symmetric, ascending, without zero") {
    CHECK(rotation_set(20, 5) == std::vector<double>{-20, -15, -10, -5, 5, 10, 15, 20});
    CHECK(rotation_set(10, 10) == std::vector<double>{-10, 10});
    CHECK_THROWS_AS(rotation_set(20, 3), Error);
    CHECK_THROWS_AS(rotation_set(20, 0), Error);
  }

  TEST_CASE("zero angle is the identity") {
    RasterImage img(5, 4, 1);
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 5; ++x) img.at(x, y) = 0.1 * x + 0.05 * y;
    CHECK(rotate_image(img, 0.0) == img);
  }

  TEST_CASE("angles beyond twenty degrees are rejected") {
    RasterImage img(8, 8, 1, 0.5);
    CHECK_THROWS_AS(rotate_image(img, 20.5), Error);
    CHECK_NOTHROW(rotate_image(img, -20.0));
  }

  TEST_CASE("positive angles turn content counter-clockwise on screen") {
    // A bright dot right of centre should move up (smaller y) under +20 deg.
    RasterImage img(41, 41, 1, 0.0);
    img.at(35, 20) = 1.0;
    const auto out = rotate_image(img, 20.0, 0.0);
    double best = -1;
    int bx = 0, by = 0;
    for (int y = 0; y < 41; ++y)
      for (int x = 0; x < 41; ++x)
        if (out.at(x, y) > best) {
          best = out.at(x, y);
          bx = x;
          by = y;
        }
    // 15 px from centre at 20 deg: (20 + 14.1, 20 - 5.1).
    CHECK(bx == 34);
    CHECK(by == 15);
  }

  TEST_CASE("constant image stays constant and fill defaults to the border median") {
    RasterImage img(16, 16, 3, 0.25);
    const auto out = rotate_image(img, 15.0);
    for (double v : out.pixels()) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(border_median(img) == std::vector<double>{0.25, 0.25, 0.25});
  }

  TEST_CASE("rotated ids") {
    CHECK(rotated_id("P12", -15) == "P12@rot-15");
    CHECK(rotated_id("P12", 5) == "P12@rot+5");
  }

  TEST_CASE("augment_dataset appends one child per original and angle") {
    std::vector<SampleRecord> recs;
    for (int i = 0; i < 3; ++i) {
      SampleRecord r;
      r.sample_id = "o" + std::to_string(i);
      r.label.species_name = i < 2 ? "a" : "b";
      r.payload = "x.png";
      recs.push_back(r);
    }
    SampleRecord g = recs[0];
    g.sample_id = "g0";
    g.provenance = Provenance::gan_ingested;
    recs.push_back(g);
    const auto m = augment_dataset(DatasetManifest::from_records(recs), rotation_set(20, 5));
    CHECK(m.records().size() == 4 + 3 * 8);
    CHECK(m.count(Provenance::rotated) == 24);
    const auto& first_child = m.records()[4];
    CHECK(first_child.sample_id == "o0@rot-20");
    CHECK(first_child.parent_id == "o0");
    CHECK(first_child.label.species_id == 0);
    CHECK(first_child.payload == "x.png");
    CHECK_THROWS_AS(augment_dataset(DatasetManifest::from_records(recs), {25.0}), Error);
  }
}
