#include "comob/nmf.hpp"

#include <cstdint>
#include <random>
#include <stdexcept>

#include "comob/core.hpp"
#include "comob/rng.hpp"

namespace comob {

namespace {

void fill_random(Matrix& m, std::mt19937_64& rng, double scale) {
  // Small floor keeps entries off exact zero, which multiplicative updates
  // could never leave.
  for (double& v : m.data()) v = (uniform01(rng) + 1e-4) * scale;
}

}  // namespace

NmfModel nmf_factorize(const Matrix& x, const NmfOptions& opts) {
  require(opts.k >= 1, "nmf_factorize: k must be >= 1");
  require(opts.max_iter >= 1, "nmf_factorize: max_iter must be >= 1");
  const std::size_t n = x.rows(), m = x.cols();
  require(n > 0 && m > 0, "nmf_factorize: empty matrix");
  require(n >= static_cast<std::size_t>(opts.k), "nmf_factorize: fewer rows than k");

  double mean = 0.0;
  for (double v : x.data()) {
    if (v < 0.0) throw std::invalid_argument("nmf_factorize: negative entry in input");
    mean += v;
  }
  mean /= static_cast<double>(n * m);

  NmfModel model;
  model.seed = opts.seed;
  const double scale = std::sqrt(std::max(mean, 1e-12) / opts.k);
  std::mt19937_64 rng(opts.seed);
  model.w = Matrix(n, opts.k);
  model.h = Matrix(opts.k, m);
  fill_random(model.w, rng, scale);
  fill_random(model.h, rng, scale);

  Matrix wt_x, wt_w, denom_h, x_ht, h_ht, denom_w;
  model.error_history.reserve(opts.max_iter + 1);
  model.error_history.push_back(frobenius_residual(x, model.w, model.h, opts.threads));

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    // H update
    matmul_at_b(model.w, x, wt_x, opts.threads);
    matmul_at_b(model.w, model.w, wt_w);
    matmul(wt_w, model.h, denom_h);
    for (std::size_t i = 0; i < model.h.data().size(); ++i)
      model.h.data()[i] *= wt_x.data()[i] / (denom_h.data()[i] + opts.eps);

    // W update
    matmul_a_bt(x, model.h, x_ht, opts.threads);
    matmul_a_bt(model.h, model.h, h_ht);
    matmul(model.w, h_ht, denom_w, opts.threads);
    for (std::size_t i = 0; i < model.w.data().size(); ++i)
      model.w.data()[i] *= x_ht.data()[i] / (denom_w.data()[i] + opts.eps);

    const double err = frobenius_residual(x, model.w, model.h, opts.threads);
    const double prev = model.error_history.back();
    model.error_history.push_back(err);
    model.iterations = iter + 1;
    if (prev <= 0.0) break;
    if ((prev - err) / prev < opts.tol) break;
  }

  model.frobenius_error = model.error_history.back();
  return model;
}

}  // namespace comob
