#pragma once

#include <cstddef>
#include <vector>

namespace eisenhart {

using Vec = std::vector<double>;

// Small dense row-major matrix.  Dimensions in this library are tiny (at most
// n+2 for lifted systems), so everything below is plain loops.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

  static Mat identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  Mat transpose() const;
  Vec mul(const Vec& x) const;   // rows() results from cols()-length x
  Mat mul(const Mat& b) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);      // Euclidean norm
double norm_inf(const Vec& a);
Vec vadd(const Vec& a, const Vec& b);
Vec vsub(const Vec& a, const Vec& b);
Vec vscale(double c, const Vec& a);

// LU factorization with partial pivoting.  singular is set instead of
// throwing so callers can decide (Newton wants to bail out gracefully).
struct Lu {
  Mat lu;
  std::vector<int> piv;
  int sign = 1;
  bool singular = false;
};

Lu lu_factor(Mat a);
Vec lu_solve(const Lu& f, Vec b);         // throws std::runtime_error if singular
double det(const Mat& a);

// One-sided Jacobi SVD.  Returns singular values in descending order; small
// values come out with high relative accuracy, which the conjugate-point rank
// tests rely on.  If right_vectors is non-null it receives V (columns are
// right singular vectors, same order as the values).
Vec singular_values(const Mat& a, Mat* right_vectors = nullptr);

}  // namespace eisenhart
