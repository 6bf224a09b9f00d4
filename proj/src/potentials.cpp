#include "eisenhart/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace eisenhart {

namespace {

double sqnorm(const Vec& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Fetches params[key] with a default, tracking which keys were consumed so
// unknown keys can be rejected afterwards.
struct ParamReader {
  const std::map<std::string, double>& params;
  std::set<std::string> used;

  double get(const std::string& key, double fallback) {
    used.insert(key);
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }

  bool has(const std::string& key) { return params.count(key) > 0; }

  // Per-dimension coefficients: key1..keyn, defaulting to a shared `key`.
  Vec get_per_dim(const std::string& key, int n, double fallback) {
    const double shared = get(key, fallback);
    Vec out(n, shared);
    for (int i = 0; i < n; ++i) {
      const std::string ki = key + std::to_string(i + 1);
      used.insert(ki);
      auto it = params.find(ki);
      if (it != params.end()) out[i] = it->second;
    }
    return out;
  }

  void finish(const std::string& name) {
    for (const auto& [k, v] : params) {
      (void)v;
      if (!used.count(k))
        throw std::invalid_argument("catalog_get(" + name + "): unknown parameter '" + k + "'");
    }
  }
};

}  // namespace

PotentialSpec make_user_potential(const std::string& name, int n,
                                  std::function<double(double, const Vec&)> eval,
                                  bool time_independent, double fd_step_scale) {
  require(n >= 1, "make_user_potential: dimension must be positive");
  require(static_cast<bool>(eval), "make_user_potential: eval required");
  PotentialSpec p;
  p.name = name;
  p.n = n;
  p.time_independent = time_independent;
  p.eval = eval;
  auto step = [fd_step_scale](const Vec& x) {
    double m = 1.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return fd_step_scale * m;
  };
  p.grad = [eval, n, step](double t, const Vec& x) {
    const double h = step(x);
    Vec g(n);
    Vec xp = x, xm = x;
    for (int i = 0; i < n; ++i) {
      xp[i] = x[i] + h;
      xm[i] = x[i] - h;
      g[i] = (eval(t, xp) - eval(t, xm)) / (2.0 * h);
      xp[i] = x[i];
      xm[i] = x[i];
    }
    return g;
  };
  p.dt = [eval, time_independent, step](double t, const Vec& x) {
    if (time_independent) return 0.0;
    const double h = step(x);
    return (eval(t + h, x) - eval(t - h, x)) / (2.0 * h);
  };
  p.hess = [eval, n, step](double t, const Vec& x) {
    const double h = step(x);
    Mat hm(n, n);
    const double f0 = eval(t, x);
    Vec y = x;
    for (int i = 0; i < n; ++i) {
      y[i] = x[i] + h;
      const double fp = eval(t, y);
      y[i] = x[i] - h;
      const double fm = eval(t, y);
      y[i] = x[i];
      hm(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
      for (int j = i + 1; j < n; ++j) {
        y[i] = x[i] + h; y[j] = x[j] + h;
        const double fpp = eval(t, y);
        y[j] = x[j] - h;
        const double fpm = eval(t, y);
        y[i] = x[i] - h; y[j] = x[j] + h;
        const double fmp = eval(t, y);
        y[j] = x[j] - h;
        const double fmm = eval(t, y);
        y[i] = x[i]; y[j] = x[j];
        const double v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
        hm(i, j) = v;
        hm(j, i) = v;
      }
    }
    return hm;
  };
  auto hess_fn = p.hess;
  p.laplacian = [hess_fn, n](double t, const Vec& x) {
    const Mat hm = hess_fn(t, x);
    double tr = 0.0;
    for (int i = 0; i < n; ++i) tr += hm(i, i);
    return tr;
  };
  return p;
}

PotentialSpec catalog_get(const std::string& name,
                          const std::map<std::string, double>& params, int n) {
  PotentialSpec p;
  p.name = name;
  p.n = n;
  p.time_independent = true;
  ParamReader r{params, {}};

  auto zero_dt = [](double, const Vec&) { return 0.0; };
  auto const_mat = [](int dim, std::function<void(Mat&)> fill) {
    Mat m(dim, dim);
    fill(m);
    return m;
  };
  (void)const_mat;

  if (name == "free") {
    require(n >= 1, "catalog_get(free): dimension must be positive");
    p.eval = [](double, const Vec&) { return 0.0; };
    p.grad = [n](double, const Vec&) { return Vec(n, 0.0); };
    p.dt = zero_dt;
    p.hess = [n](double, const Vec&) { return Mat(n, n, 0.0); };
    p.laplacian = [](double, const Vec&) { return 0.0; };
  } else if (name == "linear") {
    require(n >= 1, "catalog_get(linear): dimension must be positive");
    const Vec b = r.get_per_dim("b", n, 1.0);
    p.eval = [b](double, const Vec& x) {
      double s = 0.0;
      for (size_t i = 0; i < b.size(); ++i) s += b[i] * x[i];
      return s;
    };
    p.grad = [b](double, const Vec&) { return b; };
    p.dt = zero_dt;
    p.hess = [n](double, const Vec&) { return Mat(n, n, 0.0); };
    p.laplacian = [](double, const Vec&) { return 0.0; };
  } else if (name == "harmonic") {
    require(n >= 1, "catalog_get(harmonic): dimension must be positive");
    const double k = r.get("k", 1.0);
    p.eval = [k](double, const Vec& x) { return 0.5 * k * sqnorm(x); };
    p.grad = [k](double, const Vec& x) { return vscale(k, x); };
    p.dt = zero_dt;
    p.hess = [k, n](double, const Vec&) {
      Mat m(n, n);
      for (int i = 0; i < n; ++i) m(i, i) = k;
      return m;
    };
    p.laplacian = [k, n](double, const Vec&) { return k * n; };
  } else if (name == "anisotropic_harmonic") {
    require(n >= 1, "catalog_get(anisotropic_harmonic): dimension must be positive");
    const Vec k = r.get_per_dim("k", n, 1.0);
    p.eval = [k](double, const Vec& x) {
      double s = 0.0;
      for (size_t i = 0; i < k.size(); ++i) s += k[i] * x[i] * x[i];
      return 0.5 * s;
    };
    p.grad = [k](double, const Vec& x) {
      Vec g(k.size());
      for (size_t i = 0; i < k.size(); ++i) g[i] = k[i] * x[i];
      return g;
    };
    p.dt = zero_dt;
    p.hess = [k, n](double, const Vec&) {
      Mat m(n, n);
      for (int i = 0; i < n; ++i) m(i, i) = k[i];
      return m;
    };
    p.laplacian = [k](double, const Vec&) {
      double s = 0.0;
      for (double v : k) s += v;
      return s;
    };
  } else if (name == "quartic_of_harmonic") {
    require(n >= 1, "catalog_get(quartic_of_harmonic): dimension must be positive");
    const double c0 = r.get("c0", 1.0);
    const double c1 = r.get("c1", 0.0);
    auto u = [c0, c1](const Vec& x) { return c0 * 0.5 * sqnorm(x) + c1; };
    p.eval = [u](double, const Vec& x) { const double w = u(x); return w * w; };
    p.grad = [u, c0](double, const Vec& x) { return vscale(2.0 * u(x) * c0, x); };
    p.dt = zero_dt;
    p.hess = [u, c0, n](double, const Vec& x) {
      const double w = u(x);
      Mat m(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = 2.0 * c0 * c0 * x[i] * x[j];
        m(i, i) += 2.0 * w * c0;
      }
      return m;
    };
    p.laplacian = [u, c0, n](double, const Vec& x) {
      return 2.0 * c0 * c0 * sqnorm(x) + 2.0 * u(x) * c0 * n;
    };
  } else if (name == "time_harmonic") {
    require(n >= 1, "catalog_get(time_harmonic): dimension must be positive");
    const double eps = r.get("epsilon", 0.5);
    const double omega = r.get("omega", 1.0);
    p.time_independent = false;
    auto amp = [eps, omega](double t) { return 1.0 + eps * std::sin(omega * t); };
    p.eval = [amp](double t, const Vec& x) { return 0.5 * amp(t) * sqnorm(x); };
    p.grad = [amp](double t, const Vec& x) { return vscale(amp(t), x); };
    p.dt = [eps, omega](double t, const Vec& x) {
      return 0.5 * eps * omega * std::cos(omega * t) * sqnorm(x);
    };
    p.hess = [amp, n](double t, const Vec&) {
      Mat m(n, n);
      for (int i = 0; i < n; ++i) m(i, i) = amp(t);
      return m;
    };
    p.laplacian = [amp, n](double t, const Vec&) { return amp(t) * n; };
  } else if (name == "saddle_harmonic" || name == "neg_saddle") {
    require(n == 2, "catalog_get(" + name + "): requires n = 2");
    const double sgn = (name == "saddle_harmonic") ? 1.0 : -1.0;
    p.eval = [sgn](double, const Vec& x) { return 0.5 * sgn * (x[0] * x[0] - x[1] * x[1]); };
    p.grad = [sgn](double, const Vec& x) { return Vec{sgn * x[0], -sgn * x[1]}; };
    p.dt = zero_dt;
    p.hess = [sgn](double, const Vec&) {
      Mat m(2, 2);
      m(0, 0) = sgn;
      m(1, 1) = -sgn;
      return m;
    };
    p.laplacian = [](double, const Vec&) { return 0.0; };
  } else if (name == "cubic_harmonic_2d") {
    require(n == 2, "catalog_get(cubic_harmonic_2d): requires n = 2");
    p.eval = [](double, const Vec& x) { return x[0] * x[0] * x[0] / 3.0 - x[0] * x[1] * x[1]; };
    p.grad = [](double, const Vec& x) {
      return Vec{x[0] * x[0] - x[1] * x[1], -2.0 * x[0] * x[1]};
    };
    p.dt = zero_dt;
    p.hess = [](double, const Vec& x) {
      Mat m(2, 2);
      m(0, 0) = 2.0 * x[0];
      m(0, 1) = m(1, 0) = -2.0 * x[1];
      m(1, 1) = -2.0 * x[0];
      return m;
    };
    p.laplacian = [](double, const Vec&) { return 0.0; };
  } else {
    throw std::invalid_argument("catalog_get: unknown potential '" + name + "'");
  }

  r.finish(name);
  return p;
}

std::vector<std::string> catalog_names() {
  return {"free", "linear", "harmonic", "anisotropic_harmonic", "quartic_of_harmonic",
          "time_harmonic", "saddle_harmonic", "neg_saddle", "cubic_harmonic_2d"};
}

DerivativeCheck check_derivatives(const PotentialSpec& spec,
                                  const std::vector<std::pair<double, Vec>>& samples,
                                  double h, double tol) {
  require(h > 0.0 && tol > 0.0, "check_derivatives: h and tol must be positive");
  DerivativeCheck out;
  for (const auto& [t, x] : samples) {
    if (static_cast<int>(x.size()) != spec.n)
      throw std::invalid_argument("check_derivatives: sample dimension mismatch");
    try {
      const Vec g = spec.grad(t, x);
      const Mat hm = spec.hess(t, x);
      const double vt = spec.dt(t, x);

      Vec xp = x, xm = x;
      for (int i = 0; i < spec.n; ++i) {
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        const double fd = (spec.eval(t, xp) - spec.eval(t, xm)) / (2.0 * h);
        out.max_grad_err = std::max(out.max_grad_err, std::abs(g[i] - fd));
        // Hessian column i from the analytic gradient.
        const Vec gp = spec.grad(t, xp);
        const Vec gm = spec.grad(t, xm);
        for (int j = 0; j < spec.n; ++j) {
          const double fd2 = (gp[j] - gm[j]) / (2.0 * h);
          out.max_hess_err = std::max(out.max_hess_err, std::abs(hm(j, i) - fd2));
        }
        xp[i] = x[i];
        xm[i] = x[i];
      }
      const double fdt = (spec.eval(t + h, x) - spec.eval(t - h, x)) / (2.0 * h);
      out.max_dt_err = std::max(out.max_dt_err, std::abs(vt - fdt));
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "check_derivatives: evaluation failure at sample t=" << t << ", x=(";
      for (size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
      os << "): " << e.what();
      throw std::runtime_error(os.str());
    }
  }
  out.pass = out.max_grad_err <= tol && out.max_hess_err <= tol && out.max_dt_err <= tol;
  return out;
}

}  // namespace eisenhart
