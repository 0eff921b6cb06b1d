#include "comob/matrix.hpp"

#include <cassert>
#include <cmath>
#include <cstdint>

namespace comob {

namespace serial {

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
  assert(a.cols() == b.rows());
  out = Matrix(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) s += arow[p] * b(p, j);
      orow[j] = s;
    }
  }
}

void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& out) {
  assert(a.rows() == b.rows());
  out = Matrix(a.cols(), b.cols());
  for (std::size_t p = 0; p < a.cols(); ++p)
    for (std::size_t q = 0; q < b.cols(); ++q) {
      double s = 0.0;
      for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, p) * b(i, q);
      out(p, q) = s;
    }
}

void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& out) {
  assert(a.cols() == b.cols());
  out = Matrix(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* brow = b.row(j);
      double s = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) s += arow[p] * brow[p];
      orow[j] = s;
    }
  }
}

double frobenius_residual(const Matrix& x, const Matrix& w, const Matrix& h) {
  // Row partial sums reduced in row order; the parallel version does the
  // same, so the two agree bit for bit.
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* xrow = x.row(i);
    const double* wrow = w.row(i);
    double row_sum = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
      double pred = 0.0;
      for (std::size_t p = 0; p < w.cols(); ++p) pred += wrow[p] * h(p, j);
      const double r = xrow[j] - pred;
      row_sum += r * r;
    }
    total += row_sum;
  }
  return std::sqrt(total);
}

}  // namespace serial

void matmul(const Matrix& a, const Matrix& b, Matrix& out, int threads) {
  if (threads <= 1) {
    serial::matmul(a, b, out);
    return;
  }
  out = Matrix(a.rows(), b.cols());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(a.rows()); ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) s += arow[p] * b(p, j);
      orow[j] = s;
    }
  }
}

void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& out, int threads) {
  if (threads <= 1) {
    serial::matmul_at_b(a, b, out);
    return;
  }
  out = Matrix(a.cols(), b.cols());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t q = 0; q < static_cast<std::int64_t>(b.cols()); ++q)
    for (std::size_t p = 0; p < a.cols(); ++p) {
      double s = 0.0;
      for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, p) * b(i, q);
      out(p, q) = s;
    }
}

void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& out, int threads) {
  if (threads <= 1) {
    serial::matmul_a_bt(a, b, out);
    return;
  }
  out = Matrix(a.rows(), b.rows());
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(a.rows()); ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* brow = b.row(j);
      double s = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) s += arow[p] * brow[p];
      orow[j] = s;
    }
  }
}

double frobenius_residual(const Matrix& x, const Matrix& w, const Matrix& h,
                          int threads) {
  if (threads <= 1) return serial::frobenius_residual(x, w, h);
  std::vector<double> row_sums(x.rows(), 0.0);
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(x.rows()); ++i) {
    const double* xrow = x.row(i);
    const double* wrow = w.row(i);
    double row_sum = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
      double pred = 0.0;
      for (std::size_t p = 0; p < w.cols(); ++p) pred += wrow[p] * h(p, j);
      const double r = xrow[j] - pred;
      row_sum += r * r;
    }
    row_sums[i] = row_sum;
  }
  double total = 0.0;
  for (double s : row_sums) total += s;
  return std::sqrt(total);
}

double frobenius_norm(const Matrix& m) {
  double total = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* row = m.row(i);
    double row_sum = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) row_sum += row[j] * row[j];
    total += row_sum;
  }
  return std::sqrt(total);
}

}  // namespace comob
