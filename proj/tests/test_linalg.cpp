#include "doctest.h"

#include "hqlab/jet.hpp"
#include "hqlab/linalg.hpp"

#include <cmath>
#include <random>

using namespace hqlab;

namespace {

// Complex Levi matrix by central differences in real coordinates.
template <class F>
CMat numeric_levi(F f, const CVec& z, double h = 1e-4) {
  const int n = static_cast<int>(z.size());
  auto shifted = [&](int j, double dx, double dy, int k, double ex, double ey) {
    CVec w = z;
    w(j) += cd(dx, dy);
    w(k) += cd(ex, ey);
    return f(w);
  };
  // second derivative along real directions a (index j, unit ua) and b.
  auto d2 = [&](int j, cd ua, int k, cd ub) {
    const double pp = shifted(j, h * ua.real(), h * ua.imag(), k, h * ub.real(), h * ub.imag());
    const double pm = shifted(j, h * ua.real(), h * ua.imag(), k, -h * ub.real(), -h * ub.imag());
    const double mp = shifted(j, -h * ua.real(), -h * ua.imag(), k, h * ub.real(), h * ub.imag());
    const double mm = shifted(j, -h * ua.real(), -h * ua.imag(), k, -h * ub.real(), -h * ub.imag());
    return (pp - pm - mp + mm) / (4 * h * h);
  };
  CMat l(n, n);
  const cd one(1, 0), I(0, 1);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const double xx = d2(j, one, k, one), yy = d2(j, I, k, I);
      const double xy = d2(j, one, k, I), yx = d2(j, I, k, one);
      // d_j dbar_k = 1/4 (dx_j - i dy_j)(dx_k + i dy_k)
      l(j, k) = 0.25 * cd(xx + yy, xy - yx);
    }
  }
  return l;
}

}  // namespace

TEST_CASE("pfaffian matches the 4x4 closed form and det = pf^2") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
  const double a12 = 1.5, a13 = -2.0, a14 = 0.7, a23 = 3.1, a24 = -0.4, a34 = 2.2;
  a(0, 1) = a12; a(0, 2) = a13; a(0, 3) = a14; a(1, 2) = a23; a(1, 3) = a24; a(2, 3) = a34;
  a = a - Eigen::MatrixXd(a.transpose());
  CHECK(pfaffian(a) == doctest::Approx(a12 * a34 - a13 * a24 + a14 * a23));

  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int m : {2, 4, 6, 8}) {
    Eigen::MatrixXd r(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) r(i, j) = g(rng);
    const Eigen::MatrixXd s = r - r.transpose();
    const double pf = pfaffian(s);
    CHECK(pf * pf == doctest::Approx(s.determinant()).epsilon(1e-9));
  }
  Eigen::MatrixXd j2(2, 2);
  j2 << 0, 1, -1, 0;
  CHECK(pfaffian(j2) == 1.0);
}

TEST_CASE("binomial coefficients") {
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(52, 0) == 1);
  CHECK(binomial(3, 5) == 0);
  CHECK(binomial(3, -1) == 0);
  CHECK(binomial(60, 30) == 118264581564861424LL);
}

TEST_CASE("relative eigenvalues are invariant under a change of frame") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 4;
    CMat a(n, n), b(n, n), p(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        a(i, j) = cd(g(rng), g(rng));
        b(i, j) = cd(g(rng), g(rng));
        p(i, j) = cd(g(rng), g(rng));
      }
    const CMat metric = a * a.adjoint() + CMat::Identity(n, n);
    const CMat form = hermitian_part(b);
    const RVec ev = relative_eigenvalues(metric, form);
    const RVec ev2 = relative_eigenvalues(p.adjoint() * metric * p, p.adjoint() * form * p);
    for (int i = 0; i < n; ++i) CHECK(ev(i) == doctest::Approx(ev2(i)).epsilon(1e-8));
    // product of eigenvalues equals det(metric^{-1} form)
    const double det = (metric.inverse() * form).determinant().real();
    CHECK(ev.prod() == doctest::Approx(det).epsilon(1e-8));
  }
  CMat bad = CMat::Identity(2, 2);
  bad(1, 1) = -1;
  CHECK_THROWS_AS(relative_eigenvalues(bad, bad), std::domain_error);
}

TEST_CASE("jet levi matrices agree with finite differences") {
  CVec z(3);
  z << cd(0.3, -0.2), cd(-0.5, 0.4), cd(0.1, 0.7);
  auto build = [](const CVec& w) {
    const int n = static_cast<int>(w.size());
    Jet a = Jet::abs_sq(n, 0, w(0));
    Jet b = Jet::abs_sq(n, 1, w(1));
    Jet x = Jet::real_part(n, 2, w(2).real());
    Jet y = Jet::imag_part(n, 1, w(1).imag());
    Jet xr = Jet::real_part(n, 0, w(0).real());
    return log(1.0 + a + b) * sin(x * y) + exp(xr) / (2.0 + cos(y)) + sqrt(1.0 + a * b) +
           pow(x + 2.0, 3);
  };
  const Jet j = build(z);
  const CMat ref = numeric_levi([&](const CVec& w) { return build(w).value(); }, z);
  CHECK((j.levi() - ref).norm() < 1e-6);
  CHECK((j.levi() - j.levi().adjoint()).norm() < 1e-14);
}

TEST_CASE("pairwise sum and log-log slope") {
  std::vector<double> v(1000, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(100.0).epsilon(1e-14));
  std::vector<double> x, y;
  for (int k = 1; k <= 20; ++k) {
    x.push_back(k);
    y.push_back(3.0 * k * k);
  }
  CHECK(loglog_slope(x, y) == doctest::Approx(2.0));
}

TEST_CASE("parallel_for covers every index once") {
  std::vector<int> hits(5000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 4);
  for (int h : hits) CHECK(h == 1);
}
