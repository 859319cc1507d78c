#ifndef SEMFUNC_MATRIX_HPP
#define SEMFUNC_MATRIX_HPP

#include <cstddef>
#include <vector>

namespace semfunc {

// Dense row-major matrix. Everything in this library is small (link
// matrices are D x D with D in the low hundreds) and iterated in fixed
// order, so plain loops keep results bit-reproducible.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// x^T M y with x, y arbitrary real vectors (binary pixies or mean-field
// activations alike).
inline double bilinear(const std::vector<double>& x, const Matrix& m,
                       const std::vector<double>& y) {
  double total = 0.0;
  for (std::size_t j = 0; j < m.rows(); ++j) {
    if (x[j] == 0.0) {
      continue;
    }
    double row = 0.0;
    for (std::size_t k = 0; k < m.cols(); ++k) {
      row += m(j, k) * y[k];
    }
    total += x[j] * row;
  }
  return total;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    total += a[i] * b[i];
  }
  return total;
}

}  // namespace semfunc

#endif
