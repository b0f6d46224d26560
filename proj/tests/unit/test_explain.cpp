#include <cmath>

#include "../oracles/oracles.hpp"
#include "support.hpp"
#include "taxaug/error.hpp"
#include "taxaug/explain.hpp"

using namespace taxaug;

namespace {

FeatureMaps random_maps(Rng& rng, int c, int h, int w) {
  FeatureMaps m(c, h, w);
  for (int k = 0; k < c; ++k)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) m.at(k, y, x) = rng.uniform01();
  return m;
}

}  // namespace

TEST_SUITE("explain") {
  TEST_CASE("cam is the weighted channel sum") {
    FeatureMaps m(2, 1, 2, std::vector<double>{1, 2, 10, 20});
    const std::vector<double> w{0.5, -1};
    const auto cam = compute_cam(m, w);
    CHECK(cam.at(0, 0) == -9.5);
    CHECK(cam.at(1, 0) == -19.0);
    CHECK_THROWS_AS(compute_cam(m, std::vector<double>{1}), Error);
  }

  TEST_CASE("cam is linear in the weights") {
    Rng rng(41);
    const auto m = random_maps(rng, 8, 7, 7);
    std::vector<double> a(8), b(8), mix(8);
    for (int i = 0; i < 8; ++i) {
      a[i] = rng.uniform01() - 0.5;
      b[i] = rng.uniform01() - 0.5;
      mix[i] = 2.0 * a[i] - 3.0 * b[i];
    }
    const auto ca = compute_cam(m, a), cb = compute_cam(m, b), cm = compute_cam(m, mix);
    for (std::size_t i = 0; i < cm.values.size(); ++i)
      CHECK(std::abs(cm.values[i] - (2.0 * ca.values[i] - 3.0 * cb.values[i])) < 1e-12);
  }

  TEST_CASE("bilinear 2x2 to 3x3 by hand") {
    ScalarMap s{2, 2, {1, 2, 3, 5}};
    const auto up = upscale_bilinear(s, 3, 3);
    CHECK(up.values == oracle::bilinear_2x2_to_3x3(1, 2, 3, 5));
    ScalarMap z{2, 2, {0, 1, 0, 1}};
    const auto mid = upscale_bilinear(z, 3, 3);
    CHECK(mid.at(1, 0) == 0.5);
    CHECK(mid.at(1, 2) == 0.5);
  }

  TEST_CASE("upscaling keeps values inside the source range and hits the corners") {
    Rng rng(42);
    ScalarMap s{7, 7, std::vector<double>(49)};
    for (auto& v : s.values) v = rng.uniform01() * 4 - 2;
    const auto up = upscale_bilinear(s, 64, 48);
    CHECK(up.min() >= s.min());
    CHECK(up.max() <= s.max());
    CHECK(up.at(0, 0) == s.at(0, 0));
    CHECK(up.at(63, 47) == s.at(6, 6));
    CHECK_THROWS_AS(upscale_bilinear(s, 5, 5), Error);
  }

  TEST_CASE("normalisation") {
    const auto hm = normalize(ScalarMap{2, 1, {-3, 1}});
    CHECK(hm.map.values == std::vector<double>{0, 1});
    const auto flat = normalize(ScalarMap{2, 2, {4, 4, 4, 4}});
    CHECK(flat.map.values == std::vector<double>{0, 0, 0, 0});
  }

  TEST_CASE("colormap anchors") {
    using C = std::array<double, 3>;
    CHECK(heat_color(0.0) == C{0, 0, 1});
    CHECK(heat_color(1.0 / 3.0) == C{0, 1, 0});
    CHECK(heat_color(2.0 / 3.0) == C{1, 0.5, 0});
    CHECK(heat_color(1.0) == C{1, 0, 0});
  }

  TEST_CASE("overlay blends gray and heat") {
    RasterImage img(2, 1, 1, std::vector<double>{0.2, 0.8});
    Heatmap hm{ScalarMap{2, 1, {0, 1}}};
    const auto zero = render_overlay(img, hm, 0.0);
    CHECK(zero.channels() == 3);
    CHECK(zero.at(1, 0, 2) == doctest::Approx(0.8));
    const auto full = render_overlay(img, hm, 1.0);
    CHECK(full.at(0, 0, 2) == 1.0);
    CHECK(full.at(1, 0, 0) == 1.0);
    CHECK_THROWS_AS(render_overlay(img, hm, 1.5), Error);
  }

  TEST_CASE("explain_image produces an image-sized overlay") {
    Rng rng(43);
    const auto maps = random_maps(rng, 8, 7, 7);
    RasterImage img(40, 30, 1, 0.5);
    std::vector<double> w(8, 0.1);
    Heatmap hm;
    const auto out = explain_image(img, maps, w, 0.5, &hm);
    CHECK(out.width() == 40);
    CHECK(out.height() == 30);
    CHECK(hm.map.min() == 0.0);
    CHECK(hm.map.max() == 1.0);
  }

  TEST_CASE("back-projected weights reproduce decision values up to a constant") {
    Rng rng(44);
    const Matrix x = testing::random_matrix(rng, 30, 6);
    std::vector<int> y;
    for (int i = 0; i < 30; ++i) y.push_back(i % 3);
    const auto pca = fit_pca(x);
    const std::size_t n = 4;
    const Matrix z = transform(pca, x, n);
    const auto svm = train_multiclass(z, y, 3);
    const Matrix w = backproject_weights(pca, svm);
    REQUIRE(w.rows() == 3);
    REQUIRE(w.cols() == 6);
    auto dv = [&](int i) {
      return svm.decision_values(std::span<const double>(z.row(i).data(), n));
    };
    const Vector off0 = dv(0) - w * x.row(0).transpose();
    const Vector off1 = dv(11) - w * x.row(11).transpose();
    CHECK((off0 - off1).cwiseAbs().maxCoeff() < 1e-9);
  }
}
