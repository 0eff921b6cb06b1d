// Non-negative matrix factorization X ~ W H by Frobenius-norm
// multiplicative updates, with seeded initialization and a recorded error
// history. The classic update pair:
//
//   H <- H .* (W'X) ./ (W'W H + eps)
//   W <- W .* (X H') ./ (W H H' + eps)
//
// never increases ||X - W H||_F and keeps both factors non-negative.
#pragma once

#include <cstdint>
#include <vector>

#include "comob/matrix.hpp"

namespace comob {

struct NmfOptions {
  int k = 3;
  int max_iter = 500;
  double tol = 1e-5;       // stop when relative error improvement drops below
  double eps = 1e-12;      // denominator guard
  std::uint64_t seed = 1;
  int threads = 1;
};

struct NmfModel {
  Matrix w;  // n_rows x k, row weights
  Matrix h;  // k x n_cols, component profiles
  std::vector<double> error_history;  // ||X - WH||_F, index 0 = after init
  double frobenius_error = 0;
  int iterations = 0;
  std::uint64_t seed = 0;
};

// Throws if the input has a negative entry. Deterministic for a given
// seed at any thread count.
NmfModel nmf_factorize(const Matrix& x, const NmfOptions& opts = {});

}  // namespace comob
