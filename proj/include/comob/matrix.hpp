// Dense row-major matrix and the small multiply kernels the factorization
// needs. Each kernel has a serial reference and an OpenMP row-parallel
// version; both compute every output element with the same inner-loop
// order, so results are bit-identical for any thread count.
#pragma once

#include <cstddef>
#include <vector>

namespace comob {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* row(std::size_t r) { return data_.data() + r * cols_; }
  const double* row(std::size_t r) const { return data_.data() + r * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

namespace serial {
void matmul(const Matrix& a, const Matrix& b, Matrix& out);        // out = a b
void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& out);   // out = a' b
void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& out);   // out = a b'
double frobenius_residual(const Matrix& x, const Matrix& w, const Matrix& h);
}  // namespace serial

void matmul(const Matrix& a, const Matrix& b, Matrix& out, int threads = 1);
void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& out, int threads = 1);
void matmul_a_bt(const Matrix& a, const Matrix& b, Matrix& out, int threads = 1);

// ||x - w h||_F computed row by row without materializing w h.
double frobenius_residual(const Matrix& x, const Matrix& w, const Matrix& h,
                          int threads = 1);

double frobenius_norm(const Matrix& m);

}  // namespace comob
