#include "doctest.h"

#include "hqlab/cohomology.hpp"
#include "hqlab/spectral.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace hqlab;

namespace {

Eigen::MatrixXd alt2(double g) {
  Eigen::MatrixXd a(2, 2);
  a << 0, g, -g, 0;
  return a;
}

Eigen::MatrixXcd diag(std::initializer_list<double> v) {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<long>(v.size()), static_cast<long>(v.size()));
  int i = 0;
  for (double x : v) h(i, i) = x, ++i;
  return h;
}

ModelManifold unit_torus(int n) { return build_model(ModelSpec::flat_torus(Eigen::MatrixXd::Identity(2 * n, 2 * n))); }

Eigen::MatrixXcd random_hermitian(std::mt19937& rng, int n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h(i, j) = cd(g(rng), g(rng));
  return 0.5 * (h + h.adjoint());
}

}  // namespace

TEST_CASE("continued fraction of sqrt 2") {
  const auto m = unit_torus(1);
  const auto seq = dioph_approx(m, alt2(std::sqrt(2.0)), 1000);
  CHECK(seq.b2 == 1);
  // convergent denominators q_{j+1} = 2 q_j + q_{j-1}
  std::vector<int> denoms{1, 2};
  while (2 * denoms.back() + denoms[denoms.size() - 2] <= 1000) denoms.push_back(2 * denoms.back() + denoms[denoms.size() - 2]);
  CHECK(seq.subsequence == denoms);
  for (int k : denoms) CHECK(seq.at(k).error <= 1.0 / k);
  CHECK(seq.dirichlet_holds);
  CHECK(std::isfinite(seq.constant));

  const auto exact = dioph_approx(m, alt2(3), 20);
  for (const auto& e : exact.entries) CHECK(e.error == 0.0);
  CHECK(exact.subsequence == std::vector<int>{1});
  CHECK_THROWS_AS(dioph_approx(m, Eigen::MatrixXd::Identity(2, 2), 5), std::invalid_argument);
}

TEST_CASE("simultaneous approximation in dimension two") {
  std::mt19937 rng(7);
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(4, 4);
  b(0, 2) = 0.3;
  b(3, 3) = 1.7;
  const auto m = build_model(ModelSpec::flat_torus(b));
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd a = torus_pairing(m, random_hermitian(rng, 2));
    const auto seq = dioph_approx(m, a, 500);
    CHECK(seq.b2 == 6);
    CHECK(seq.dirichlet_holds);
    CHECK(std::isfinite(seq.constant));
    for (int k : seq.subsequence) CHECK(seq.at(k).error <= seq.constant * std::pow(k, -1.0 / 6) * (1 + 1e-12));
    for (const auto& e : seq.entries) {
      CHECK((e.m + e.m.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK((e.m.array() - e.m.array().round()).abs().maxCoeff() == 0.0);
      CHECK(e.norm02 <= e.error + 1e-12);
      CHECK(e.norm20 == doctest::Approx(e.norm02));
    }
  }
}

TEST_CASE("curvature split") {
  std::mt19937 rng(3);
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(4, 4);
  b(1, 2) = 0.4;
  b(2, 3) = -0.2;
  const auto m = build_model(ModelSpec::flat_torus(b));
  const auto pure = curvature_split(m, torus_pairing(m, random_hermitian(rng, 2)));
  CHECK(pure.norm02 < 1e-12);
  CHECK(pure.norm20 < 1e-12);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(4, 4);
  std::normal_distribution<double> g;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) r(i, j) = g(rng), r(j, i) = -r(i, j);
  const auto c = curvature_split(m, r);
  CHECK(c.reconstruction_error < 1e-12);
  CHECK(c.norm20 == doctest::Approx(c.norm02));
  // the (2,0) + (0,2) part squared splits evenly
  const Eigen::MatrixXd rest = c.form - c.p11;
  double rn = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) rn += rest(i, j) * rest(i, j);
  CHECK(2 * c.norm02 * c.norm02 == doctest::Approx(rn));
}

TEST_CASE("Landau levels on an elliptic curve") {
  const auto m = unit_torus(1);
  const double gap = 2 * std::numbers::pi * 3;
  const auto sp = laplacian_spectrum(m, NSClass::torus(diag({3})), 1, 0, 4 * gap);
  REQUIRE(!sp.levels.empty());
  CHECK(sp.levels[0].eigenvalue == 0.0);
  CHECK(sp.levels[0].multiplicity == 3);
  CHECK(sp.levels[0].multiplicity == hq_torus_constant(diag({3}), Eigen::MatrixXd::Identity(2, 2), 0));
  CHECK(sp.levels[1].eigenvalue == doctest::Approx(gap));
  for (double e : {1e-3, 0.1 * gap, 0.5 * gap, 0.99 * gap}) CHECK(sp.count(e) == 3);
  const auto q1 = laplacian_spectrum(m, NSClass::torus(diag({3})), 1, 1, 4 * gap);
  CHECK(q1.levels[0].eigenvalue == doctest::Approx(gap));
  CHECK(q1.count(0.99 * gap) == 0);

  const auto d = laplacian_spectrum(m, NSClass::torus(diag({3})), 1, 0, 2.5 * gap, SpectralMethod::Discretized);
  CHECK(d.count(0.5 * gap) == 3);
  CHECK(d.clamped > -0.05 * gap);
  // N is nondecreasing
  long long prev = 0;
  for (double lam = 0; lam < 4 * gap; lam += 0.37) {
    CHECK(sp.count(lam) >= prev);
    prev = sp.count(lam);
  }
  for (const auto& l : sp.levels) CHECK(l.eigenvalue >= 0);
}

TEST_CASE("zero level multiplicity equals the index") {
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(4, 4);
  b(2, 2) = 2;
  const auto m = build_model(ModelSpec::flat_torus(b));
  const auto h = diag({1, -1});
  const double pf = std::abs(pfaffian(torus_pairing(m, h)));
  CHECK(pf == doctest::Approx(2.0));
  for (int k = 1; k <= 6; ++k) {
    const auto sp = laplacian_spectrum(m, NSClass::torus(h), k, 1, 1.0);
    REQUIRE(sp.levels.size() == 1);
    CHECK(sp.levels[0].eigenvalue == 0.0);
    CHECK(sp.levels[0].multiplicity == static_cast<long long>(k * k * pf));
    Eigen::MatrixXcd kh = h * static_cast<double>(k);
    CHECK(sp.levels[0].multiplicity == hq_torus_constant(kh, b, 1));
    CHECK(laplacian_spectrum(m, NSClass::torus(h), k, 0, 1.0).levels.empty());
  }
}

TEST_CASE("spectra of M and -M swap q and n - q") {
  std::mt19937 rng(11);
  const auto m = unit_torus(2);
  for (int t = 0; t < 3; ++t) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(4, 4);
    std::uniform_int_distribution<int> u(-3, 3);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) p(i, j) = u(rng), p(j, i) = -p(i, j);
    for (int q = 0; q <= 2; ++q) {
      SpectralProblem a, b;
      try {
        a = laplacian_spectrum(m, p, 1, q, 80.0);
        b = laplacian_spectrum(m, Eigen::MatrixXd(-p), 1, 2 - q, 80.0);
      } catch (const std::invalid_argument&) {
        continue;
      }
      REQUIRE(a.levels.size() == b.levels.size());
      for (std::size_t i = 0; i < a.levels.size(); ++i) {
        CHECK(a.levels[i].eigenvalue == doctest::Approx(b.levels[i].eigenvalue));
        CHECK(a.levels[i].multiplicity == b.levels[i].multiplicity);
      }
    }
  }
}

TEST_CASE("analytic levels against the discretized operator") {
  const auto m1 = unit_torus(1);
  for (double d : {1.0, -2.0, 3.0})
    for (int q = 0; q <= 1; ++q) {
      const double gap = 2 * std::numbers::pi * std::abs(d);
      const auto v = cross_validate(m1, alt2(d), q, 2.5 * gap);
      CHECK(v.agree);
      CHECK(v.compared > 0);
    }
  // rectangular cell with a metric scale
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(2, 2);
  b(1, 1) = 1.5;
  const auto m2 = build_model(ModelSpec::flat_torus(b, 2.0));
  CHECK(cross_validate(m2, alt2(2), 0, 2.5 * 2 * std::numbers::pi * (2 / 1.5) / 2.0).agree);

  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(4, 4);
  p(0, 2) = 1, p(2, 0) = -1, p(1, 3) = -2, p(3, 1) = 2;
  const auto m4 = unit_torus(2);
  for (int q = 0; q <= 2; ++q) CHECK(cross_validate(m4, p, q, 2.5 * 2 * std::numbers::pi).agree);
  CHECK_NOTHROW(require_landau_agreement(m1, alt2(3), 0, 2.5 * 6 * std::numbers::pi));
  // an absurd tolerance exposes the failure path
  CHECK_THROWS_AS(require_landau_agreement(m1, alt2(3), 0, 2.5 * 6 * std::numbers::pi, 1e-9), std::runtime_error);
  Eigen::MatrixXd skew = Eigen::MatrixXd::Identity(2, 2);
  skew(0, 1) = 0.5;
  CHECK_THROWS_AS(laplacian_spectrum(build_model(ModelSpec::flat_torus(skew)), alt2(1), 1, 0, 10.0,
                                     SpectralMethod::Discretized),
                  std::invalid_argument);
}

TEST_CASE("counting function convergence") {
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(4, 4);
  b(2, 2) = std::sqrt(2.0);
  b(3, 3) = 2 / (1 + std::sqrt(5.0));
  const auto m = build_model(ModelSpec::flat_torus(b));
  const auto h = diag({1, -1});
  const double covol = std::abs(b.determinant());
  const auto r1 = counting_convergence(m, h, 1, 20);
  CHECK(r1.expected == doctest::Approx(2 * covol));
  CHECK(r1.converges);
  CHECK(r1.plateau);
  CHECK(r1.max_scaled < 3 * r1.expected);
  const auto r0 = counting_convergence(m, h, 0, 20);
  CHECK(r0.expected == 0.0);
  CHECK(r0.estimate == 0.0);
  CHECK(r0.converges);

  // doubling the metric leaves the limit alone
  const auto m2 = build_model(ModelSpec::flat_torus(b, 2.0));
  const auto r2 = counting_convergence(m2, h, 1, 20);
  CHECK(r2.gap == doctest::Approx(r1.gap / 2));
  CHECK(r2.estimate == r1.estimate);

  // integral target: n! |Pf| at every k
  const auto mi = unit_torus(2);
  const auto ri = counting_convergence(mi, diag({2, -1}), 1, 8);
  for (const auto& row : ri.rows) CHECK(row.scaled == doctest::Approx(4.0));
  CHECK(ri.error == doctest::Approx(0.0));
}

TEST_CASE("transcendental asymptotic cohomology") {
  const auto m = unit_torus(1);
  const double v = transcendental_hq(m, diag({std::sqrt(2.0)}), 0, 1000);
  CHECK(std::abs(v - std::sqrt(2.0)) <= 0.05 * std::sqrt(2.0));
  CHECK(transcendental_hq(m, diag({-std::sqrt(2.0)}), 1, 1000) == v);
  CHECK(transcendental_hq(m, diag({-std::sqrt(2.0)}), 0, 1000) == 0.0);
  CHECK(transcendental_hq(m, diag({3}), 0, 10) == 3.0);
}
