#include "eisenhart/genmetric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eisenhart {

namespace {

double step_for(double base, const Vec& p) {
  double m = 1.0;
  for (double v : p) m = std::max(m, std::abs(v));
  return base * m;
}

Mat inverse(const Mat& a) {
  const int n = a.rows();
  const Lu f = lu_factor(a);
  if (f.singular) throw std::runtime_error("generic metric: singular metric matrix");
  Mat inv(n, n);
  Vec e(n, 0.0);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    const Vec col = lu_solve(f, e);
    for (int i = 0; i < n; ++i) inv(i, j) = col[i];
    e[j] = 0.0;
  }
  return inv;
}

}  // namespace

Tensor3 christoffels_fd(const GenericMetric& m, const Vec& p) {
  if (static_cast<int>(p.size()) != m.dim)
    throw std::invalid_argument("christoffels_fd: point dimension mismatch");
  const int d = m.dim;
  const double h = step_for(m.fd_step, p);

  // dg[c] = partial_c of the metric matrix.
  std::vector<Mat> dg(d);
  Vec q = p;
  for (int c = 0; c < d; ++c) {
    q[c] = p[c] + h;
    const Mat gp = m.value(q);
    q[c] = p[c] - h;
    const Mat gm = m.value(q);
    q[c] = p[c];
    Mat der(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) der(i, j) = (gp(i, j) - gm(i, j)) / (2.0 * h);
    dg[c] = der;
  }

  const Mat ginv = inverse(m.value(p));
  Tensor3 gamma(d);
  for (int b = 0; b < d; ++b) {
    for (int c = b; c < d; ++c) {
      // First-kind symbol Gamma_{e,bc}.
      Vec first(d);
      for (int e = 0; e < d; ++e)
        first[e] = 0.5 * (dg[b](e, c) + dg[c](e, b) - dg[e](b, c));
      for (int a = 0; a < d; ++a) {
        double s = 0.0;
        for (int e = 0; e < d; ++e) s += ginv(a, e) * first[e];
        gamma.at(a, b, c) = s;
        gamma.at(a, c, b) = s;
      }
    }
  }
  return gamma;
}

Vec geodesic_accel(const GenericMetric& m, const Vec& p, const Vec& v) {
  const Tensor3 gamma = christoffels_fd(m, p);
  const int d = m.dim;
  Vec acc(d, 0.0);
  for (int a = 0; a < d; ++a) {
    double s = 0.0;
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) s += gamma.at(a, b, c) * v[b] * v[c];
    acc[a] = -s;
  }
  return acc;
}

OdeSystem geodesic_system(const GenericMetric& m) {
  const int d = m.dim;
  OdeSystem sys;
  sys.dim = 2 * d;
  sys.rhs = [m, d](double, const Vec& y, Vec& dy) {
    const Vec q(y.begin(), y.begin() + d);
    const Vec v(y.begin() + d, y.end());
    const Vec acc = geodesic_accel(m, q, v);
    for (int i = 0; i < d; ++i) {
      dy[i] = v[i];
      dy[d + i] = acc[i];
    }
  };
  return sys;
}

OdeSystem jacobi_system(const GenericMetric& m) {
  const int d = m.dim;
  OdeSystem sys;
  sys.dim = 2 * d + 2 * d * d;
  sys.rhs = [m, d](double, const Vec& y, Vec& dy) {
    const Vec q(y.begin(), y.begin() + d);
    const Vec v(y.begin() + d, y.begin() + 2 * d);
    const double* xi = y.data() + 2 * d;          // d x d, row-major
    const double* xidot = xi + d * d;

    const Vec acc = geodesic_accel(m, q, v);

    // dA/dq by central differences of the acceleration.
    const double h2 = step_for(m.fd_step_jacobi, q);
    Mat aq(d, d);
    Vec qq = q;
    for (int mu = 0; mu < d; ++mu) {
      qq[mu] = q[mu] + h2;
      const Vec ap = geodesic_accel(m, qq, v);
      qq[mu] = q[mu] - h2;
      const Vec am = geodesic_accel(m, qq, v);
      qq[mu] = q[mu];
      for (int i = 0; i < d; ++i) aq(i, mu) = (ap[i] - am[i]) / (2.0 * h2);
    }
    // dA/dqdot = -2 Gamma^i_{b,c} v^c (exact in the symbols at q).
    const Tensor3 gamma = christoffels_fd(m, q);
    Mat av(d, d, 0.0);
    for (int i = 0; i < d; ++i)
      for (int b = 0; b < d; ++b) {
        double s = 0.0;
        for (int c = 0; c < d; ++c) s += gamma.at(i, b, c) * v[c];
        av(i, b) = -2.0 * s;
      }

    for (int i = 0; i < d; ++i) {
      dy[i] = v[i];
      dy[d + i] = acc[i];
    }
    double* dxi = dy.data() + 2 * d;
    double* dxidot = dxi + d * d;
    for (int i = 0; i < d; ++i) {
      for (int col = 0; col < d; ++col) {
        dxi[i * d + col] = xidot[i * d + col];
        double s = 0.0;
        for (int mu = 0; mu < d; ++mu)
          s += aq(i, mu) * xi[mu * d + col] + av(i, mu) * xidot[mu * d + col];
        dxidot[i * d + col] = s;
      }
    }
  };
  return sys;
}

GenericMetric generic_brinkmann(const BrinkmannMetric& m) {
  GenericMetric g;
  g.dim = m.dim();
  const BrinkmannMetric metric = m;
  g.value = [metric](const Vec& p) {
    const int n = metric.n();
    const Vec x(p.begin() + 2, p.begin() + 2 + n);
    Mat out(n + 2, n + 2, 0.0);
    out(0, 1) = out(1, 0) = 1.0;
    out(1, 1) = -2.0 * metric.V.eval(p[1], x);
    for (int i = 0; i < n; ++i) out(2 + i, 2 + i) = metric.weight(i);
    return out;
  };
  return g;
}

}  // namespace eisenhart
