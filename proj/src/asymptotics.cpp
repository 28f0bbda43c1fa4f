#include "hqlab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hqlab {

namespace {

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// omega-volume of the divisor classes generating NS.
std::vector<double> generator_weights(const ModelManifold& model) {
  const int n = model.dim();
  switch (model.kind()) {
    case ModelKind::ProjProduct: {
      // H_i . (sum_j H_j)^{n-1} = (n-1)! n_i / prod_j n_j!
      double denom = 1;
      for (int d : model.factors()) denom *= factorial(d);
      std::vector<double> w;
      for (int d : model.factors()) w.push_back(factorial(n - 1) * d / denom);
      return w;
    }
    case ModelKind::HirzebruchF1: {
      const double d = ModelManifold::kF1Delta;
      return {1 + d, d};  // H . omega, E . omega
    }
    case ModelKind::FlatTorus: {
      // int u ^ omega^{n-1} = tr(H) vol / (n s) for a diagonal unit generator.
      const double w = model.volume() / (n * model.metric_scale());
      return std::vector<double>(static_cast<std::size_t>(n * n), w);
    }
  }
  return {};
}

std::vector<double> ns_coordinates(const ModelManifold& model, const NSClass& cls) {
  if (model.kind() != ModelKind::FlatTorus) return cls.coeffs;
  const Eigen::Index n = cls.hermitian.rows();
  std::vector<double> c;
  for (Eigen::Index j = 0; j < n; ++j) c.push_back(cls.hermitian(j, j).real());
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k) {
      c.push_back(cls.hermitian(j, k).real());
      c.push_back(cls.hermitian(j, k).imag());
    }
  }
  return c;
}

// Least-squares fit of v = a + b/k; returns a.
double fit_limit(const std::vector<std::pair<int, double>>& tail) {
  double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
  for (const auto& [k, v] : tail) {
    const double x = 1.0 / k;
    s1 += 1;
    sx += x;
    sxx += x * x;
    sy += v;
    sxy += x * v;
  }
  const double den = s1 * sxx - sx * sx;
  if (den == 0) return sy / s1;
  return (sxx * sy - sx * sxy) / den;
}

std::vector<double> tail_of(const std::vector<double>& v) {
  return std::vector<double>(v.begin() + static_cast<long>(v.size() / 2), v.end());
}

}  // namespace

double ns_norm(const ModelManifold& model, const NSClass& cls) {
  check_class(model, cls);
  const auto w = generator_weights(model);
  const auto c = ns_coordinates(model, cls);
  double s = 0;
  for (std::size_t i = 0; i < c.size(); ++i) s += std::abs(c[i]) * w[i];
  return s;
}

DivisorLattice divisor_lattice(const ModelManifold& model) {
  DivisorLattice lat;
  const int r = model.ns_rank();
  switch (model.kind()) {
    case ModelKind::ProjProduct:
      for (int i = 0; i < r; ++i) {
        std::vector<double> e(r, 0.0);
        e[i] = 1;
        lat.generators.push_back(NSClass::product(e));
      }
      break;
    case ModelKind::HirzebruchF1:
      lat.generators = {NSClass::f1(1, 0), NSClass::f1(0, -1)};
      break;
    case ModelKind::FlatTorus: {
      const int n = model.dim();
      for (int j = 0; j < n; ++j) {
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
        h(j, j) = 1;
        lat.generators.push_back(NSClass::torus(h));
      }
      for (int j = 0; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
          Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
          h(j, k) = h(k, j) = 1;
          lat.generators.push_back(NSClass::torus(h));
          h(j, k) = cd(0, 1);
          h(k, j) = cd(0, -1);
          lat.generators.push_back(NSClass::torus(h));
        }
      }
      break;
    }
  }
  for (const auto& g : lat.generators) lat.norms.push_back(ns_norm(model, g));
  return lat;
}

AsymEstimate asym_hq(const ModelManifold& model, const NSClass& cls, int q, int kmax) {
  if (kmax < 10) throw std::invalid_argument("asymptotic estimates need kmax >= 10");
  const int n = model.dim();
  if (q < 0 || q > n) throw std::invalid_argument("cohomology degree out of range");
  AsymEstimate est;
  est.q = q;
  std::vector<double> vals(kmax);
  parallel_for(static_cast<std::size_t>(kmax), [&](std::size_t i) {
    const int k = static_cast<int>(i) + 1;
    vals[i] = factorial(n) * static_cast<double>(hq(model, cls.scaled(k), q)) / std::pow(k, n);
  });
  for (int k = 1; k <= kmax; ++k) est.values.emplace_back(k, vals[k - 1]);
  const int start = kmax - kmax / 3;
  std::vector<std::pair<int, double>> tail(est.values.begin() + (start - 1), est.values.end());
  est.limit = fit_limit(tail);
  double lo = tail.front().second, hi = lo;
  for (const auto& [k, v] : tail) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  est.diagnostic = hi - lo;
  return est;
}

HomogeneityReport homogeneity_check(const ModelManifold& model, const NSClass& cls, int q,
                                    long long num, long long den, int kmax) {
  if (num <= 0 || den <= 0) throw std::invalid_argument("scaling factor must be positive");
  HomogeneityReport r;
  r.num = num;
  r.den = den;
  const NSClass scaled = cls.scaled(static_cast<double>(num) / static_cast<double>(den));
  if (!is_integral(model, scaled)) throw std::invalid_argument("scaled class is not integral");
  for (int k = 1; k <= kmax; ++k) {
    const long long a = hq(model, scaled.scaled(static_cast<double>(k * den)), q);
    const long long b = hq(model, cls.scaled(static_cast<double>(k * num)), q);
    if (a != b) r.table_identity = false;
  }
  r.expected = std::pow(static_cast<double>(num) / static_cast<double>(den), model.dim());
  r.limit_base = asym_hq(model, cls, q, kmax).limit;
  r.limit_scaled = asym_hq(model, scaled, q, kmax).limit;
  r.ratio = r.limit_base != 0 ? r.limit_scaled / r.limit_base : 0.0;
  return r;
}

TwistReport twist_bound_check(const ModelManifold& model, const NSClass& line, const NSClass& divisor,
                              int q, int kmax) {
  if (kmax < 4) throw std::invalid_argument("twist sweep needs kmax >= 4");
  const int n = model.dim();
  TwistReport r;
  const double nd = ns_norm(model, divisor);
  for (int k = 1; k <= kmax; ++k) {
    const NSClass kl = line.scaled(k);
    const double diff = std::abs(static_cast<double>(hq(model, kl.plus(divisor), q) - hq(model, kl, q)));
    const double bound = std::pow(ns_norm(model, kl) + nd, n - 1) * nd;
    r.k.push_back(k);
    r.difference.push_back(diff);
    r.bound.push_back(bound);
    r.ratio.push_back(bound > 0 ? diff / bound : 0.0);
  }
  r.constant = *std::max_element(r.ratio.begin(), r.ratio.end());
  std::vector<double> kd(r.k.begin(), r.k.end());
  r.diff_slope = loglog_slope(tail_of(kd), tail_of(r.difference));
  r.ratio_slope = loglog_slope(tail_of(kd), tail_of(r.ratio));
  r.bounded = std::isfinite(r.constant) && r.diff_slope <= n - 1 + 0.1 && r.ratio_slope <= 0.1;
  return r;
}

LipschitzReport lipschitz_check(const ModelManifold& model,
                                const std::vector<std::pair<NSClass, NSClass>>& pairs, int q, int kmax,
                                int max_scale) {
  const int n = model.dim();
  LipschitzReport r;
  auto hhat = [&](const NSClass& c) { return c.is_zero() ? 0.0 : asym_hq(model, c, q, kmax).limit; };
  for (const auto& [a, b] : pairs) {
    LipschitzPair p{a, b, hhat(a), hhat(b), 0, 0};
    p.lhs = std::abs(p.h_beta - p.h_alpha);
    p.scale = std::pow(ns_norm(model, a) + ns_norm(model, b), n - 1) *
              ns_norm(model, b.plus(a.scaled(-1)));
    if (p.scale > 0) {
      r.constant = std::max(r.constant, p.lhs / p.scale);
    } else if (p.lhs > 1e-9) {
      r.bounded = false;
    }
    r.pairs.push_back(std::move(p));
  }
  const auto it = std::find_if(r.pairs.begin(), r.pairs.end(),
                               [](const LipschitzPair& p) { return p.lhs > 1e-9 && p.scale > 0; });
  if (it != r.pairs.end()) {
    for (int m = 1; m <= max_scale; ++m) {
      const NSClass a = it->alpha.scaled(m), b = it->beta.scaled(m);
      const double lhs = std::abs(hhat(b) - hhat(a));
      const double scale = std::pow(ns_norm(model, a) + ns_norm(model, b), n - 1) *
                           ns_norm(model, b.plus(a.scaled(-1)));
      r.scaling_m.push_back(m);
      r.scaling_ratio.push_back(lhs / scale);
      r.constant = std::max(r.constant, lhs / scale);
    }
    r.scaling_slope = loglog_slope(r.scaling_m, r.scaling_ratio);
    if (std::abs(r.scaling_slope) > 0.1) r.bounded = false;
  }
  if (!std::isfinite(r.constant)) r.bounded = false;
  return r;
}

}  // namespace hqlab
