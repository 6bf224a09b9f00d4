#include "eisenhart/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eisenhart {

Mat Mat::identity(int n) {
  Mat m(n, n, 0.0);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::transpose() const {
  Mat t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Vec Mat::mul(const Vec& x) const {
  if (static_cast<int>(x.size()) != cols_) throw std::invalid_argument("Mat::mul: size mismatch");
  Vec y(rows_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Mat Mat::mul(const Mat& b) const {
  if (cols_ != b.rows()) throw std::invalid_argument("Mat::mul: size mismatch");
  Mat c(rows_, b.cols(), 0.0);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const double aik = (*this)(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const Vec& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

Vec vadd(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vadd: size mismatch");
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec vsub(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vsub: size mismatch");
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec vscale(double c, const Vec& a) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

Lu lu_factor(Mat a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("lu_factor: square matrix required");
  const int n = a.rows();
  Lu f;
  f.piv.resize(n);
  for (int i = 0; i < n; ++i) f.piv[i] = i;
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(a(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double v = std::abs(a(i, k));
      if (v > best) { best = v; p = i; }
    }
    if (best == 0.0) { f.singular = true; f.lu = a; return f; }
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(f.piv[k], f.piv[p]);
      f.sign = -f.sign;
    }
    const double inv = 1.0 / a(k, k);
    for (int i = k + 1; i < n; ++i) {
      a(i, k) *= inv;
      const double lik = a(i, k);
      for (int j = k + 1; j < n; ++j) a(i, j) -= lik * a(k, j);
    }
  }
  f.lu = a;
  return f;
}

Vec lu_solve(const Lu& f, Vec b) {
  if (f.singular) throw std::runtime_error("lu_solve: singular matrix");
  const int n = f.lu.rows();
  if (static_cast<int>(b.size()) != n) throw std::invalid_argument("lu_solve: size mismatch");
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = b[f.piv[i]];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) x[i] -= f.lu(i, j) * x[j];
    x[i] /= f.lu(i, i);
  }
  return x;
}

double det(const Mat& a) {
  Lu f = lu_factor(a);
  if (f.singular) return 0.0;
  double d = f.sign;
  for (int i = 0; i < a.rows(); ++i) d *= f.lu(i, i);
  return d;
}

Vec singular_values(const Mat& a, Mat* right_vectors) {
  // One-sided Jacobi: orthogonalize the columns of a working copy by plane
  // rotations; singular values are the final column norms.
  const int m = a.rows(), n = a.cols();
  Mat u = a;
  Mat v = Mat::identity(n);
  const double eps = 1e-15;
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (int i = 0; i < m; ++i) {
          app += u(i, p) * u(i, p);
          aqq += u(i, q) * u(i, q);
          apq += u(i, p) * u(i, q);
        }
        if (std::abs(apq) <= eps * std::sqrt(app * aqq) || apq == 0.0) continue;
        rotated = true;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (int i = 0; i < m; ++i) {
          const double up = u(i, p), uq = u(i, q);
          u(i, p) = c * up - s * uq;
          u(i, q) = s * up + c * uq;
        }
        for (int i = 0; i < n; ++i) {
          const double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<std::pair<double, int>> sv(n);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += u(i, j) * u(i, j);
    sv[j] = {std::sqrt(s), j};
  }
  std::sort(sv.begin(), sv.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  Vec out(n);
  for (int j = 0; j < n; ++j) out[j] = sv[j].first;
  if (right_vectors) {
    Mat vr(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) vr(i, j) = v(i, sv[j].second);
    *right_vectors = vr;
  }
  return out;
}

}  // namespace eisenhart
