#include <cmath>

#include "../oracles/oracles.hpp"
#include "support.hpp"
#include "taxaug/classify.hpp"
#include "taxaug/error.hpp"

using namespace taxaug;

TEST_SUITE("classify") {
  TEST_CASE("gradient matches central differences") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 3 + static_cast<int>(rng.below(6)), d = 1 + static_cast<int>(rng.below(4));
      const Matrix x = testing::random_matrix(rng, n, d, 2.0);
      std::vector<double> y(static_cast<std::size_t>(n));
      for (auto& v : y) v = rng.below(2) ? 1.0 : -1.0;
      std::vector<double> p(static_cast<std::size_t>(d + 1));
      for (auto& v : p) v = 2.0 * rng.uniform01() - 1.0;
      const double C = 0.5 + rng.uniform01();

      auto f = [&](const std::vector<double>& q) {
        const Vector w = Eigen::Map<const Vector>(q.data(), d);
        return svm_objective(w, q[static_cast<std::size_t>(d)], x, y, C);
      };
      const auto fd = oracle::finite_gradient(f, p);
      Vector gw;
      double gb = 0;
      svm_gradient(Eigen::Map<const Vector>(p.data(), d), p.back(), x, y, C, gw, gb);
      for (int j = 0; j < d; ++j)
        CHECK(std::abs(gw(j) - fd[static_cast<std::size_t>(j)]) <= 1e-4 * std::max(1.0, std::abs(fd[static_cast<std::size_t>(j)])));
      CHECK(std::abs(gb - fd.back()) <= 1e-4 * std::max(1.0, std::abs(fd.back())));
    }
  }

  TEST_CASE("objective at zero is C times the row count") {
    Matrix x(3, 2);
    x << 1, 2, 3, 4, 5, 6;
    const std::vector<double> y{1, -1, 1};
    CHECK(svm_objective(Vector::Zero(2), 0.0, x, y, 2.0) == doctest::Approx(6.0));
  }

  TEST_CASE("training drives the gradient below tolerance") {
    Rng rng(32);
    const Matrix x = testing::random_matrix(rng, 20, 3);
    std::vector<double> y(20);
    for (int i = 0; i < 20; ++i) y[static_cast<std::size_t>(i)] = x(i, 0) + 0.3 * x(i, 1) > 0 ? 1.0 : -1.0;
    const auto fit = train_binary(x, y, {1.0, 1e-8, 20000});
    CHECK(fit.converged);
    Vector gw;
    double gb = 0;
    svm_gradient(fit.w, fit.b, x, y, 1.0, gw, gb);
    CHECK(std::sqrt(gw.squaredNorm() + gb * gb) == doctest::Approx(fit.grad_norm));
    CHECK(fit.objective < svm_objective(Vector::Zero(3), 0.0, x, y, 1.0));
  }

  TEST_CASE("iteration limit is reported, not hidden") {
    Rng rng(33);
    const Matrix x = testing::random_matrix(rng, 30, 4, 10.0);
    std::vector<double> y(30);
    for (auto& v : y) v = rng.below(2) ? 1.0 : -1.0;
    const auto fit = train_binary(x, y, {100.0, 1e-14, 3});
    CHECK_FALSE(fit.converged);
    CHECK(fit.iterations == 3);
  }

  TEST_CASE("standardizer keeps zero-variance columns at scale one") {
    Matrix x(3, 2);
    x << 1, 5, 2, 5, 3, 5;
    const auto s = Standardizer::fit(x);
    CHECK(s.scale(1) == 1.0);
    const Matrix z = s.apply(x);
    CHECK(z.col(1).cwiseAbs().maxCoeff() == 0.0);
    CHECK(z.col(0).mean() == doctest::Approx(0.0));
    CHECK(z.col(0).squaredNorm() / 3.0 == doctest::Approx(1.0));
  }

  TEST_CASE("one-vs-rest separates well-spaced blobs") {
    Rng rng(34);
    const int S = 4, per = 10;
    Matrix x(S * per, 2);
    std::vector<int> y;
    for (int s = 0; s < S; ++s)
      for (int i = 0; i < per; ++i) {
        x(s * per + i, 0) = 5.0 * std::cos(s * 1.57) + 0.3 * (rng.uniform01() - 0.5);
        x(s * per + i, 1) = 5.0 * std::sin(s * 1.57) + 0.3 * (rng.uniform01() - 0.5);
        y.push_back(s);
      }
    const auto model = train_multiclass(x, y, S, {{1.0, 1e-6, 5000}, true});
    int hits = 0;
    for (int i = 0; i < S * per; ++i) hits += predict(model, std::span<const double>(x.row(i).data(), 2)) == y[static_cast<std::size_t>(i)];
    CHECK(hits == S * per);
    CHECK(model.convergence_warnings == 0);

    // Weights on raw inputs reproduce the decision values.
    const Matrix wi = model.input_weights();
    const auto dv = model.decision_values(std::span<const double>(x.row(3).data(), 2));
    Vector raw = wi * x.row(3).transpose();
    const Vector off = dv - raw;
    const auto dv2 = model.decision_values(std::span<const double>(x.row(17).data(), 2));
    const Vector raw2 = wi * x.row(17).transpose();
    CHECK(((dv2 - raw2) - off).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("ties go to the lowest species id") {
    SvmModel m;
    m.n_classes = 3;
    m.dims = 1;
    m.weights = Matrix::Zero(3, 1);
    m.biases = Vector::Constant(3, 0.5);
    m.standardizer = Standardizer::identity(1);
    const double x = 2.0;
    CHECK(predict(m, std::span<const double>(&x, 1)) == 0);
    m.biases(0) = 0.1;
    CHECK(predict(m, std::span<const double>(&x, 1)) == 1);
  }

  TEST_CASE("a species with no training rows is an error") {
    Matrix x(2, 1);
    x << 0, 1;
    const std::vector<int> y{0, 2};
    try {
      train_multiclass(x, y, 3);
      FAIL("expected missing_class");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::missing_class);
    }
  }

  TEST_CASE("model blob round trip") {
    testing::TempDir dir("svm");
    Rng rng(35);
    const Matrix x = testing::random_matrix(rng, 12, 3);
    std::vector<int> y;
    for (int i = 0; i < 12; ++i) y.push_back(i % 3);
    const auto m = train_multiclass(x, y, 3);
    write_svm(m, dir / "m.bin");
    const auto back = read_svm(dir / "m.bin");
    CHECK(back.weights == m.weights);
    CHECK(back.biases == m.biases);
    CHECK(back.standardizer.scale == m.standardizer.scale);
  }
}
