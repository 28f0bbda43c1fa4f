#include "hqlab/cohomology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace hqlab {

namespace {

long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

long long ceil_div(long long a, long long b) { return -floor_div(-a, b); }

long long round_to_integer(double x, const char* what) {
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-6 * std::max(1.0, std::abs(x))) throw std::invalid_argument(what);
  return static_cast<long long>(r);
}

}  // namespace

long long hq_projspace(int n, long long d, int q) {
  if (n < 1 || q < 0 || q > n) return 0;
  if (q == 0 && d >= 0) return binomial(n + d, n);
  if (q == n && d <= -n - 1) return binomial(-d - 1, n);
  return 0;
}

long long hq_product(const std::vector<int>& factors, const std::vector<long long>& degrees, int q) {
  if (factors.size() != degrees.size()) throw std::invalid_argument("degree vector length mismatch");
  // Convolution over the splittings q = q_1 + ... + q_m.
  std::vector<long long> acc{1};
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const int n = factors[i];
    std::vector<long long> next(acc.size() + n, 0);
    for (std::size_t a = 0; a < acc.size(); ++a) {
      if (acc[a] == 0) continue;
      for (int b = 0; b <= n; ++b) next[a + b] += acc[a] * hq_projspace(n, degrees[i], b);
    }
    acc = std::move(next);
  }
  return (q >= 0 && q < static_cast<int>(acc.size())) ? acc[q] : 0;
}

long long hq_torus_constant(const Eigen::MatrixXcd& h, const Eigen::MatrixXd& lattice, int q) {
  const Eigen::Index n = h.rows();
  if (h.cols() != n || lattice.rows() != 2 * n || lattice.cols() != 2 * n) {
    throw std::invalid_argument("torus class and lattice shapes disagree");
  }
  if (q < 0 || q > n) return 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian_part(h), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  int negative = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::abs(ev(j)) <= 1e-10 * scale) throw std::invalid_argument("degenerate torus class is not supported");
    if (ev(j) < 0) ++negative;
  }
  const Eigen::MatrixXd a = lattice.transpose() * torus_form_matrix(h) * lattice;
  if ((a.array() - a.array().round()).abs().maxCoeff() > 1e-8) {
    throw std::invalid_argument("torus class does not pair integrally on the lattice");
  }
  if (q != negative) return 0;
  return std::llabs(round_to_integer(pfaffian(a.array().round().matrix()), "non-integral Pfaffian"));
}

long long count_lattice_points_2d(const std::vector<std::array<long long, 3>>& hp) {
  // x-range from the feasible vertices.
  std::optional<Rational> xmin, xmax;
  for (std::size_t i = 0; i < hp.size(); ++i) {
    for (std::size_t j = i + 1; j < hp.size(); ++j) {
      const long long det = hp[i][0] * hp[j][1] - hp[j][0] * hp[i][1];
      if (det == 0) continue;
      const Rational x(Rational(hp[i][2] * hp[j][1] - hp[j][2] * hp[i][1]) / det);
      const Rational y(Rational(hp[i][0] * hp[j][2] - hp[j][0] * hp[i][2]) / det);
      bool ok = true;
      for (const auto& r : hp) {
        if (r[0] * x + r[1] * y > r[2]) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      if (!xmin || x < *xmin) xmin = x;
      if (!xmax || x > *xmax) xmax = x;
    }
  }
  if (!xmin) return 0;
  using boost::multiprecision::cpp_int;
  auto floor_q = [](const Rational& r) {
    cpp_int num = boost::multiprecision::numerator(r), den = boost::multiprecision::denominator(r);
    cpp_int q = num / den;
    if (num % den != 0 && num < 0) --q;
    return static_cast<long long>(q);
  };
  const long long x0 = -floor_q(-*xmin);
  const long long x1 = floor_q(*xmax);
  long long count = 0;
  for (long long x = x0; x <= x1; ++x) {
    long long lo = std::numeric_limits<long long>::min(), hi = std::numeric_limits<long long>::max();
    bool ok = true;
    for (const auto& r : hp) {
      const long long rhs = r[2] - r[0] * x;
      if (r[1] > 0) {
        hi = std::min(hi, floor_div(rhs, r[1]));
      } else if (r[1] < 0) {
        lo = std::max(lo, ceil_div(rhs, r[1]));
      } else if (rhs < 0) {
        ok = false;
      }
    }
    if (ok && hi >= lo) count += hi - lo + 1;
  }
  return count;
}

std::vector<std::array<long long, 3>> f1_section_polygon(long long a, long long b) {
  // <m, v_rho> >= -d_rho with D = a D_H - b D_E.
  return {
      {-1, 0, 0},   // m1 >= 0
      {0, -1, 0},   // m2 >= 0
      {-1, -1, -b}, // m1 + m2 >= b
      {1, 1, a},    // m1 + m2 <= a
  };
}

long long hq_f1(long long a, long long b, int q) {
  if (q < 0 || q > 2) return 0;
  auto h0 = [](long long x, long long y) { return count_lattice_points_2d(f1_section_polygon(x, y)); };
  if (q == 0) return h0(a, b);
  // K = -3H + E, i.e. (a, b) = (-3, -1).
  const long long h2 = h0(-3 - a, -1 - b);
  if (q == 2) return h2;
  const long long chi = 1 + (a * a + 3 * a - b * b - b) / 2;
  const long long h1 = h0(a, b) + h2 - chi;
  if (h1 < 0) throw std::logic_error("negative h^1 from the F1 oracle");
  return h1;
}

long long hq(const ModelManifold& model, const NSClass& cls, int q) {
  if (!is_integral(model, cls)) throw std::invalid_argument("cohomology oracles need an integral class");
  switch (model.kind()) {
    case ModelKind::ProjProduct: {
      std::vector<long long> d;
      for (double x : cls.coeffs) d.push_back(std::llround(x));
      return hq_product(model.factors(), d, q);
    }
    case ModelKind::HirzebruchF1:
      return hq_f1(std::llround(cls.coeffs[0]), std::llround(cls.coeffs[1]), q);
    case ModelKind::FlatTorus:
      return hq_torus_constant(cls.hermitian, model.lattice(), q);
  }
  return 0;
}

long long euler_char(const ModelManifold& model, const NSClass& cls, long long k) {
  const NSClass kl = cls.scaled(static_cast<double>(k));
  long long chi = 0;
  for (int q = 0; q <= model.dim(); ++q) chi += (q % 2 ? -1 : 1) * hq(model, kl, q);
  return chi;
}

long long CohomologyTable::euler(int k) const {
  long long chi = 0;
  for (int q = 0; q <= model.dim(); ++q) chi += (q % 2 ? -1 : 1) * at(q, k);
  return chi;
}

CohomologyTable cohomology_table(const ModelManifold& model, const NSClass& cls, int kmax) {
  if (kmax < 1) throw std::invalid_argument("kmax must be positive");
  CohomologyTable t{model, cls, kmax, {}};
  const int n = model.dim();
  std::vector<long long> vals(static_cast<std::size_t>(kmax) * (n + 1));
  parallel_for(static_cast<std::size_t>(kmax), [&](std::size_t i) {
    const NSClass kl = cls.scaled(static_cast<double>(i + 1));
    for (int q = 0; q <= n; ++q) vals[i * (n + 1) + q] = hq(model, kl, q);
  });
  for (int k = 1; k <= kmax; ++k)
    for (int q = 0; q <= n; ++q) t.entries[{q, k}] = vals[(k - 1) * (n + 1) + q];
  return t;
}

Rational HilbertPolynomial::operator()(long long k) const {
  Rational v = 0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * k + *it;
  return v;
}

HilbertPolynomial hilbert_fit(const CohomologyTable& table) {
  const int n = table.model.dim();
  if (table.kmax < n + 1) throw std::invalid_argument("need kmax >= n + 1 for a Hilbert fit");
  // Vandermonde system at k = 1..n+1, solved exactly.
  const int m = n + 1;
  std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m + 1));
  for (int i = 0; i < m; ++i) {
    Rational p = 1;
    for (int j = 0; j < m; ++j) {
      a[i][j] = p;
      p *= (i + 1);
    }
    a[i][m] = table.euler(i + 1);
  }
  for (int c = 0; c < m; ++c) {
    int piv = c;
    while (a[piv][c] == 0) ++piv;
    std::swap(a[c], a[piv]);
    for (int r = 0; r < m; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Rational f = a[r][c] / a[c][c];
      for (int j = c; j <= m; ++j) a[r][j] -= f * a[c][j];
    }
  }
  HilbertPolynomial poly;
  for (int j = 0; j < m; ++j) poly.coeffs.push_back(a[j][m] / a[j][j]);
  for (int k = 1; k <= table.kmax; ++k) {
    if (poly(k) != table.euler(k)) {
      throw std::runtime_error("Euler characteristics are not polynomial of degree n in k");
    }
  }
  return poly;
}

}  // namespace hqlab
