#include <cmath>
#include <random>
#include <stdexcept>

#include "comob/nmf.hpp"
#include "doctest.h"

using namespace comob;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                     double lo = 0.1, double hi = 1.1) {
  std::mt19937_64 rng(seed);
  Matrix m(rows, cols);
  for (double& v : m.data())
    v = lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return m;
}

}  // namespace

TEST_CASE("nmf reconstructs a rank-1 matrix almost exactly") {
  const Matrix u = random_matrix(40, 1, 1);
  const Matrix v = random_matrix(1, 30, 2);
  Matrix x;
  serial::matmul(u, v, x);
  NmfOptions opts;
  opts.k = 1;
  opts.max_iter = 2000;
  opts.tol = 0.0;
  const NmfModel model = nmf_factorize(x, opts);
  CHECK(model.frobenius_error / frobenius_norm(x) < 1e-6);
}

TEST_CASE("nmf recovers a seeded rank-3 product to 1% relative error") {
  const Matrix w0 = random_matrix(500, 3, 7);
  const Matrix h0 = random_matrix(3, 59, 8);
  Matrix x;
  serial::matmul(w0, h0, x);
  NmfOptions opts;
  opts.k = 3;
  opts.max_iter = 500;
  opts.seed = 99;
  const NmfModel model = nmf_factorize(x, opts);
  CHECK(model.frobenius_error / frobenius_norm(x) < 1e-2);

  SUBCASE("factors stay non-negative") {
    for (double v : model.w.data()) CHECK(v >= 0.0);
    for (double v : model.h.data()) CHECK(v >= 0.0);
  }
  SUBCASE("objective never increases along the recorded history") {
    for (std::size_t i = 1; i < model.error_history.size(); ++i)
      CHECK(model.error_history[i] <= model.error_history[i - 1] + 1e-10);
  }
}

TEST_CASE("nmf is deterministic for a given seed") {
  const Matrix x = random_matrix(60, 20, 3);
  NmfOptions opts;
  opts.k = 3;
  opts.max_iter = 50;
  opts.seed = 42;
  const NmfModel a = nmf_factorize(x, opts);
  const NmfModel b = nmf_factorize(x, opts);
  CHECK(a.w.data() == b.w.data());
  CHECK(a.h.data() == b.h.data());
  CHECK(a.error_history == b.error_history);

  opts.seed = 43;
  const NmfModel c = nmf_factorize(x, opts);
  CHECK(a.w.data() != c.w.data());
}

TEST_CASE("nmf input validation") {
  Matrix x(4, 4, 1.0);
  SUBCASE("negative entry") {
    x(2, 2) = -0.5;
    CHECK_THROWS_AS(nmf_factorize(x), std::invalid_argument);
  }
  SUBCASE("bad k") {
    NmfOptions opts;
    opts.k = 0;
    CHECK_THROWS_AS(nmf_factorize(x, opts), std::invalid_argument);
    opts.k = 9;  // more components than rows
    CHECK_THROWS_AS(nmf_factorize(x, opts), std::invalid_argument);
  }
  SUBCASE("empty matrix") {
    CHECK_THROWS_AS(nmf_factorize(Matrix{}), std::invalid_argument);
  }
}

TEST_CASE("nmf tolerates all-zero columns") {
  Matrix x = random_matrix(30, 10, 5);
  for (std::size_t r = 0; r < x.rows(); ++r) x(r, 4) = 0.0;
  const NmfModel model = nmf_factorize(x);
  for (double v : model.w.data()) CHECK(std::isfinite(v));
  for (double v : model.h.data()) CHECK(std::isfinite(v));
}
