#include <cmath>

#include "../oracles/oracles.hpp"
#include "support.hpp"
#include "taxaug/error.hpp"
#include "taxaug/reduce.hpp"

using namespace taxaug;

TEST_SUITE("reduce") {
  TEST_CASE("jacobi oracle diagonalises a known matrix") {
    const auto e = oracle::jacobi({{2, 1}, {1, 2}});
    CHECK(e.values[0] == doctest::Approx(3.0));
    CHECK(e.values[1] == doctest::Approx(1.0));
  }

  TEST_CASE("eigenvalues agree with the jacobi oracle") {
    Rng rng(1234);
    for (int trial = 0; trial < 40; ++trial) {
      const int n = 2 + static_cast<int>(rng.below(7)), d = 1 + static_cast<int>(rng.below(6));
      const Matrix x = testing::random_matrix(rng, n, d, 3.0);
      const auto pca = fit_pca(x);
      const auto ref = oracle::jacobi(oracle::covariance(x));
      double total = 0;
      for (double v : ref.values) total += std::max(v, 0.0);
      for (int i = 0; i < d; ++i) {
        CHECK(std::abs(pca.eigenvalues(i) - std::max(ref.values[i], 0.0)) < 1e-8);
        CHECK(std::abs(pca.explained_ratio(i) - std::max(ref.values[i], 0.0) / total) < 1e-8);
      }
    }
  }

  TEST_CASE("components are orthonormal and sign-fixed") {
    Rng rng(77);
    const Matrix x = testing::random_matrix(rng, 30, 5);
    const auto pca = fit_pca(x);
    const Matrix gram = pca.components * pca.components.transpose();
    CHECK((gram - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-10);
    for (int r = 0; r < 5; ++r) {
      Eigen::Index at = 0;
      pca.components.row(r).cwiseAbs().maxCoeff(&at);
      CHECK(pca.components(r, at) > 0);
    }
  }

  TEST_CASE("full-rank transform then reconstruct is lossless") {
    Rng rng(5);
    const Matrix x = testing::random_matrix(rng, 12, 4);
    const auto pca = fit_pca(x);
    const Matrix back = reconstruct(pca, transform(pca, x, 4));
    CHECK((back - x).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("scores of the training rows are centred with eigenvalue variance") {
    Rng rng(8);
    const Matrix x = testing::random_matrix(rng, 50, 3);
    const auto pca = fit_pca(x);
    const Matrix z = transform(pca, x, 3);
    for (int c = 0; c < 3; ++c) {
      CHECK(std::abs(z.col(c).mean()) < 1e-12);
      CHECK(z.col(c).squaredNorm() / 49.0 == doctest::Approx(pca.eigenvalues(c)).epsilon(1e-10));
    }
  }

  TEST_CASE("components_for_ctv is monotone and capped by rank") {
    Rng rng(2);
    const Matrix x = testing::random_matrix(rng, 4, 10);  // rank 3
    const auto pca = fit_pca(x);
    CHECK(pca.rank() == 3);
    std::size_t prev = 0;
    for (int ctv : ctv_grid()) {
      const auto n = components_for_ctv(pca, ctv);
      CHECK(n >= prev);
      CHECK(n >= 1);
      CHECK(n <= 3);
      prev = n;
    }
    CHECK(components_for_ctv(pca, 100) == 3);
  }

  TEST_CASE("ctv exactly on a boundary keeps the smaller count") {
    // Two equal variances: 50 % is reached with one component.
    Matrix x(4, 2);
    x << 1, 0, -1, 0, 0, 1, 0, -1;
    const auto pca = fit_pca(x);
    CHECK(components_for_ctv(pca, 50) == 1);
    CHECK(components_for_ctv(pca, 60) == 2);
  }

  TEST_CASE("degenerate inputs") {
    CHECK_THROWS_AS(fit_pca(Matrix::Zero(1, 3)), Error);
    CHECK_THROWS_AS(fit_pca(Matrix::Ones(5, 3)), Error);
  }

  TEST_CASE("ctv grid and sweep tie-break") {
    CHECK(ctv_grid() == std::vector<int>{10, 20, 30, 40, 50, 60, 70, 80, 90, 100});
    const auto flat = ctv_sweep([](int c) { return CtvSweepEntry{c, 1.0, 0.5}; });
    CHECK(flat.best.ctv_percent == 10);
    CHECK(flat.entries.size() == 10);
    const auto peaked = ctv_sweep([](int c) { return CtvSweepEntry{c, 1.0, c == 70 || c == 90 ? 0.9 : 0.1}; });
    CHECK(peaked.best.ctv_percent == 70);
    CHECK_THROWS_WITH(ctv_sweep([](int c) -> CtvSweepEntry {
                        if (c == 40) throw Error(ErrorCode::numeric, "boom");
                        return {c, 1, 0};
                      }),
                      doctest::Contains("40"));
  }

  TEST_CASE("pca blob round trip") {
    testing::TempDir dir("pca");
    Rng rng(3);
    const auto pca = fit_pca(testing::random_matrix(rng, 9, 4));
    write_pca(pca, dir / "p.bin");
    const auto back = read_pca(dir / "p.bin");
    CHECK(back.components == pca.components);
    CHECK(back.eigenvalues == pca.eigenvalues);
    CHECK(back.mean == pca.mean);
  }
}
