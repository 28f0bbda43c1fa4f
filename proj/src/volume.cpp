#include "hqlab/volume.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace hqlab {

namespace {

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

bool is_surface(const ModelManifold& m) { return m.dim() == 2 && m.kind() != ModelKind::FlatTorus; }

long long to_integer(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-9) throw std::invalid_argument("toric envelope needs an integral class");
  return static_cast<long long>(r);
}

// Counter-clockwise vertices of a bounded planar polygon {a . m <= b}.
std::vector<std::pair<Q, Q>> polygon_vertices(const std::vector<std::vector<long long>>& a,
                                              const std::vector<long long>& b) {
  std::vector<std::pair<Q, Q>> v;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const long long det = a[i][0] * a[j][1] - a[j][0] * a[i][1];
      if (det == 0) continue;
      const Q x(b[i] * a[j][1] - b[j] * a[i][1], det);
      const Q y(a[i][0] * b[j] - a[j][0] * b[i], det);
      bool ok = true;
      for (std::size_t r = 0; r < a.size() && ok; ++r) ok = a[r][0] * x + a[r][1] * y <= Q(b[r]);
      if (ok && std::find(v.begin(), v.end(), std::make_pair(x, y)) == v.end()) v.emplace_back(x, y);
    }
  }
  if (v.size() < 3) return v;
  double cx = 0, cy = 0;
  for (const auto& [x, y] : v) {
    cx += boost::rational_cast<double>(x);
    cy += boost::rational_cast<double>(y);
  }
  cx /= v.size();
  cy /= v.size();
  std::sort(v.begin(), v.end(), [&](const auto& p, const auto& q) {
    return std::atan2(boost::rational_cast<double>(p.second) - cy, boost::rational_cast<double>(p.first) - cx) <
           std::atan2(boost::rational_cast<double>(q.second) - cy, boost::rational_cast<double>(q.first) - cx);
  });
  return v;
}

Q shoelace(const std::vector<std::pair<Q, Q>>& v) {
  if (v.size() < 3) return Q(0);
  Q s(0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % v.size()];
    s += p.first * q.second - q.first * p.second;
  }
  return s / 2;
}

}  // namespace

NSClass ZariskiDecomposition::negative() const {
  NSClass n = cls.scaled(0.0);
  for (std::size_t j = 0; j < curves.size(); ++j) n = n.plus(curves[j].scaled(coefficients[j]));
  return n;
}

std::vector<NSClass> negative_curves(const ModelManifold& model) {
  if (model.kind() == ModelKind::HirzebruchF1) return {NSClass::f1(0, -1)};
  return {};
}

std::vector<NSClass> test_curves(const ModelManifold& model) {
  switch (model.kind()) {
    case ModelKind::HirzebruchF1: return {NSClass::f1(0, -1), NSClass::f1(1, 1)};
    case ModelKind::ProjProduct: {
      if (model.factors().size() == 1) return {NSClass::product({1})};
      return {NSClass::product({1, 0}), NSClass::product({0, 1})};
    }
    case ModelKind::FlatTorus: break;
  }
  return {};
}

bool is_pseudoeffective(const ModelManifold& model, const NSClass& cls, double tol) {
  check_class(model, cls);
  switch (model.kind()) {
    case ModelKind::ProjProduct:
      return std::all_of(cls.coeffs.begin(), cls.coeffs.end(), [tol](double x) { return x >= -tol; });
    case ModelKind::HirzebruchF1:
      return cls.coeffs[0] >= -tol && cls.coeffs[1] <= cls.coeffs[0] + tol;
    case ModelKind::FlatTorus: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_part(cls.hermitian));
      return es.eigenvalues().minCoeff() >= -tol;
    }
  }
  return false;
}

bool is_nef(const ModelManifold& model, const NSClass& cls, double tol) {
  if (model.kind() == ModelKind::HirzebruchF1) {
    return cls.coeffs[1] >= -tol && cls.coeffs[1] <= cls.coeffs[0] + tol;
  }
  return is_pseudoeffective(model, cls, tol);
}

ZariskiDecomposition zariski(const ModelManifold& model, const NSClass& cls) {
  if (!is_surface(model)) throw std::invalid_argument("Zariski decomposition needs a surface model");
  if (!is_pseudoeffective(model, cls)) throw std::invalid_argument("class is not pseudoeffective");
  ZariskiDecomposition z;
  z.cls = cls;
  z.positive = cls;
  const auto catalog = negative_curves(model);
  std::vector<int> support;
  while (true) {
    int add = -1;
    for (int c = 0; c < static_cast<int>(catalog.size()); ++c) {
      if (std::find(support.begin(), support.end(), c) != support.end()) continue;
      if (intersection(model, z.positive, catalog[c]) < -1e-12) {
        add = c;
        break;
      }
    }
    if (add < 0) break;
    support.push_back(add);
    const auto m = support.size();
    Eigen::MatrixXd g(m, m);
    Eigen::VectorXd rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) g(i, j) = intersection(model, catalog[support[i]], catalog[support[j]]);
      rhs(i) = intersection(model, cls, catalog[support[i]]);
    }
    const Eigen::VectorXd t = g.ldlt().solve(rhs);
    z.curves.clear();
    z.coefficients.clear();
    z.positive = cls;
    for (std::size_t i = 0; i < m; ++i) {
      z.curves.push_back(catalog[support[i]]);
      z.coefficients.push_back(t(i));
      z.positive = z.positive.plus(catalog[support[i]].scaled(-t(i)));
    }
    z.gram = g;
  }
  if (z.gram.size() == 0) z.gram = Eigen::MatrixXd(0, 0);
  z.volume = intersection(model, z.positive, z.positive);
  return z;
}

double volume_class(const ModelManifold& model, const NSClass& cls) {
  check_class(model, cls);
  if (!is_pseudoeffective(model, cls)) return 0.0;
  if (is_surface(model)) return std::max(0.0, zariski(model, cls).volume);
  if (model.kind() == ModelKind::FlatTorus) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_part(cls.hermitian));
    if (es.eigenvalues().minCoeff() <= 0) return 0.0;
    return intersection_power(model, cls);
  }
  // Products: the pseudoeffective cone is the nef cone.
  return intersection_power(model, cls);
}

double hhat_closed_form(const ModelManifold& model, const NSClass& cls, int q) {
  check_class(model, cls);
  const int n = model.dim();
  if (q < 0 || q > n) throw std::invalid_argument("form degree out of range");
  switch (model.kind()) {
    case ModelKind::ProjProduct: {
      // h^0 of O(ka) on P^m grows like (ka)^m/m!, h^m of O(-ka) likewise
      int index = 0;
      double v = 1;
      for (int i = 2; i <= n; ++i) v *= i;
      for (std::size_t i = 0; i < cls.coeffs.size(); ++i) {
        const int m = model.factors()[i];
        const double a = cls.coeffs[i];
        if (a == 0) return 0.0;
        if (a < 0) index += m;
        double f = 1;
        for (int j = 2; j <= m; ++j) f *= j;
        v *= std::pow(std::abs(a), m) / f;
      }
      return q == index ? v : 0.0;
    }
    case ModelKind::HirzebruchF1: {
      const double h0 = volume_class(model, cls);
      const double h2 = volume_class(model, cls.scaled(-1));
      if (q == 0) return h0;
      if (q == 2) return h2;
      return std::max(0.0, h0 + h2 - intersection_power(model, cls));
    }
    case ModelKind::FlatTorus: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_part(cls.hermitian));
      const auto& ev = es.eigenvalues();
      const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
      if (ev.cwiseAbs().minCoeff() <= 1e-12 * scale) return 0.0;
      const int index = static_cast<int>((ev.array() < 0).count());
      return q == index ? std::abs(intersection_power(model, cls)) : 0.0;
    }
  }
  return 0.0;
}

ToricEnvelope toric_envelope(const ModelManifold& model, const NSClass& cls) {
  check_class(model, cls);
  ToricEnvelope env;
  env.cls = cls;
  env.dim = model.dim();
  auto row = [&](std::vector<long long> a, long long b) {
    env.normals.push_back(std::move(a));
    env.offsets.push_back(b);
  };
  const int n = model.dim();
  switch (model.kind()) {
    case ModelKind::ProjProduct: {
      int off = 0;
      Q vol(1);
      for (std::size_t i = 0; i < model.factors().size(); ++i) {
        const int d = model.factors()[i];
        const long long a = to_integer(cls.coeffs[i]);
        if (a < 0) env.empty = true;
        std::vector<long long> sum(n, 0);
        for (int j = 0; j < d; ++j) {
          std::vector<long long> neg(n, 0);
          neg[off + j] = -1;
          row(neg, 0);
          sum[off + j] = 1;
          env.box_upper.push_back(std::max(a, 0LL));
        }
        row(sum, a);
        Q f(1);
        for (int j = 1; j <= d; ++j) f *= Q(std::max(a, 0LL), j);
        vol *= f;
        off += d;
      }
      env.euclidean_volume = env.empty ? Q(0) : vol;
      break;
    }
    case ModelKind::HirzebruchF1: {
      const long long a = to_integer(cls.coeffs[0]);
      const long long b = std::max(0LL, to_integer(cls.coeffs[1]));  // drop the fixed part
      if (a < 0 || b > a) env.empty = true;
      row({-1, 0}, 0);
      row({0, -1}, 0);
      row({-1, -1}, -b);
      row({1, 1}, a);
      env.box_upper = {std::max(a, 0LL), std::max(a, 0LL)};
      break;
    }
    case ModelKind::FlatTorus:
      throw std::invalid_argument("toric envelope needs a toric model");
  }
  if (n == 2 && !env.empty) {
    env.vertices = polygon_vertices(env.normals, env.offsets);
    env.euclidean_volume = shoelace(env.vertices);
  }
  env.volume = env.euclidean_volume * Q(static_cast<long long>(factorial(n)));
  return env;
}

long long ToricEnvelope::lattice_count(long long k) const {
  if (empty || k < 0) return 0;
  std::vector<long long> m(dim, 0);
  long long count = 0;
  std::function<void(int)> rec = [&](int pos) {
    if (pos == dim) {
      for (std::size_t r = 0; r < normals.size(); ++r) {
        long long s = 0;
        for (int j = 0; j < dim; ++j) s += normals[r][j] * m[j];
        if (s > k * offsets[r]) return;
      }
      ++count;
      return;
    }
    for (long long x = 0; x <= k * box_upper[pos]; ++x) {
      m[pos] = x;
      rec(pos + 1);
    }
  };
  rec(0);
  return count;
}

OrthogonalityReport orthogonality_check(const ModelManifold& model, const NSClass& cls,
                                        const std::vector<double>& deltas) {
  const auto z = zariski(model, cls);
  OrthogonalityReport r;
  r.volume = z.volume;
  const NSClass n = z.negative();
  r.exact_e_dot_p = intersection(model, n, z.positive);
  NSClass reduced = cls.scaled(0.0);
  for (const auto& c : z.curves) reduced = reduced.plus(c);
  std::vector<double> ds, lhs, rhs;
  for (double d : deltas) {
    OrthogonalityRow row;
    row.delta = d;
    if (z.curves.empty()) {
      row.beta_sq = z.volume;
    } else {
      const NSClass beta = z.positive.plus(reduced.scaled(-d));
      row.e_dot_beta = intersection(model, reduced, beta);
      row.beta_sq = intersection(model, beta, beta);
    }
    row.deficit_root = std::sqrt(std::max(0.0, r.volume - row.beta_sq));
    row.ratio = row.deficit_root > 0 ? row.e_dot_beta / row.deficit_root : 0.0;
    r.constant = std::max(r.constant, row.ratio);
    ds.push_back(d);
    lhs.push_back(row.e_dot_beta);
    rhs.push_back(row.deficit_root);
    r.rows.push_back(row);
  }
  r.lhs_slope = loglog_slope(ds, lhs);
  r.rhs_slope = loglog_slope(ds, rhs);
  return r;
}

}  // namespace hqlab
