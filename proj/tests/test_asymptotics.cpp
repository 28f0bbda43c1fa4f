#include "doctest.h"

#include "hqlab/asymptotics.hpp"

#include <cmath>

using namespace hqlab;

TEST_CASE("norm on NS coordinates") {
  const auto p11 = build_model(ModelSpec::proj_product({1, 1}));
  CHECK(ns_norm(p11, NSClass::product({0, 0})) == 0.0);
  CHECK(ns_norm(p11, NSClass::product({1, 0})) == 1.0);
  CHECK(ns_norm(p11, NSClass::product({2, -3})) == 5.0);
  const auto f1m = build_model(ModelSpec::hirzebruch_f1());
  CHECK(ns_norm(f1m, NSClass::f1(0, -1)) == ModelManifold::kF1Delta);
  CHECK(ns_norm(f1m, NSClass::f1(1, 0)) == 1 + ModelManifold::kF1Delta);
  const auto p2 = build_model(ModelSpec::proj_product({2}));
  CHECK(ns_norm(p2, NSClass::product({1})) == 1.0);

  const auto lat = divisor_lattice(f1m);
  CHECK(lat.generators.size() == 2);
  for (double x : lat.norms) CHECK(x > 0);
  // triangle inequality on a few sums
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b) {
      const NSClass x = NSClass::f1(a, b), y = NSClass::f1(b, -a);
      CHECK(ns_norm(f1m, x.plus(y)) <= ns_norm(f1m, x) + ns_norm(f1m, y) + 1e-12);
    }
  const auto t2 = build_model(ModelSpec::flat_torus(Eigen::MatrixXd::Identity(4, 4)));
  CHECK(divisor_lattice(t2).generators.size() == 4);
}

TEST_CASE("asymptotic cohomology limits") {
  const auto p11 = build_model(ModelSpec::proj_product({1, 1}));
  const auto e0 = asym_hq(p11, NSClass::product({2, 3}), 0, 100);
  CHECK(std::abs(e0.limit - 12.0) < 0.12);
  for (const auto& [k, v] : e0.values) {
    CHECK(v == doctest::Approx(2.0 * (2 * k + 1) * (3 * k + 1) / (double(k) * k)));
  }
  const auto e1 = asym_hq(p11, NSClass::product({2, -3}), 1, 100);
  CHECK(std::abs(e1.limit - 12.0) < 0.12);
  // the tail oscillation shrinks as the sweep lengthens
  CHECK(asym_hq(p11, NSClass::product({2, 3}), 0, 60).diagnostic > e0.diagnostic);

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2, 2);
  h(0, 0) = 1;
  h(1, 1) = -1;
  const auto t2 = build_model(ModelSpec::flat_torus(Eigen::MatrixXd::Identity(4, 4)));
  const auto et = asym_hq(t2, NSClass::torus(h), 1, 20);
  for (const auto& [k, v] : et.values) CHECK(v == doctest::Approx(2.0));
  CHECK(et.limit == doctest::Approx(2.0));
  CHECK(et.diagnostic == 0.0);

  CHECK_THROWS_AS(asym_hq(p11, NSClass::product({2, 3}), 0, 9), std::invalid_argument);
}

TEST_CASE("homogeneity") {
  const auto p11 = build_model(ModelSpec::proj_product({1, 1}));
  const auto r = homogeneity_check(p11, NSClass::product({2, 3}), 0, 2, 1, 60);
  CHECK(r.table_identity);
  CHECK(r.expected == 4.0);
  CHECK(r.ratio == doctest::Approx(4.0).epsilon(1e-2));
  const auto id = homogeneity_check(p11, NSClass::product({2, 3}), 0, 1, 1, 30);
  CHECK(id.limit_base == id.limit_scaled);

  const auto a = asym_hq(p11, NSClass::product({1, 1}), 0, 100);
  const auto b = asym_hq(p11, NSClass::product({3, 3}), 0, 100);
  CHECK(a.limit == doctest::Approx(2.0).epsilon(1e-2));
  CHECK(b.limit == doctest::Approx(18.0).epsilon(1e-2));

  const auto half = homogeneity_check(p11, NSClass::product({2, 4}), 0, 1, 2, 40);
  CHECK(half.table_identity);
  CHECK(half.expected == 0.25);

  const auto f1m = build_model(ModelSpec::hirzebruch_f1());
  const auto f = homogeneity_check(f1m, NSClass::f1(3, 1), 0, 3, 1, 30);
  CHECK(f.table_identity);
  CHECK(f.ratio == doctest::Approx(9.0).epsilon(2e-2));
}

TEST_CASE("twist bound") {
  const auto p11 = build_model(ModelSpec::proj_product({1, 1}));
  const auto r = twist_bound_check(p11, NSClass::product({2, 3}), NSClass::product({1, 0}), 0, 60);
  for (std::size_t i = 0; i < r.k.size(); ++i) CHECK(r.difference[i] == 3.0 * r.k[i] + 1);
  CHECK(r.bounded);
  CHECK(std::abs(r.diff_slope - 1.0) < 0.1);
  CHECK(std::abs(r.ratio_slope) < 0.1);

  const auto zero = twist_bound_check(p11, NSClass::product({2, 3}), NSClass::product({0, 0}), 0, 20);
  for (double d : zero.difference) CHECK(d == 0.0);
  CHECK(zero.bounded);

  const auto f1m = build_model(ModelSpec::hirzebruch_f1());
  const auto f = twist_bound_check(f1m, NSClass::f1(3, 1), NSClass::f1(0, -1), 0, 60);
  for (std::size_t i = 0; i < f.k.size(); ++i) CHECK(f.difference[i] == double(f.k[i]));
  CHECK(f.bounded);
  CHECK(std::isfinite(f.constant));
}

TEST_CASE("Lipschitz estimate") {
  const auto p11 = build_model(ModelSpec::proj_product({1, 1}));
  const NSClass a = NSClass::product({2, 3}), b = NSClass::product({2, 4});
  const auto r = lipschitz_check(p11, {{a, a}, {a, b}}, 0, 60);
  CHECK(r.pairs[0].lhs == 0.0);
  CHECK(r.pairs[1].lhs == doctest::Approx(4.0).epsilon(1e-2));
  CHECK(r.bounded);
  CHECK(std::abs(r.scaling_slope) < 0.1);

  // path (2, t), q = 1: hhat^1 = 4 max(-t, 0)
  std::vector<std::pair<NSClass, NSClass>> path;
  for (int t = -3; t < 3; ++t) path.push_back({NSClass::product({2, double(t)}), NSClass::product({2, double(t + 1)})});
  const auto rp = lipschitz_check(p11, path, 1, 80);
  for (const auto& p : rp.pairs) {
    const double t = p.alpha.coeffs[1];
    CHECK(p.h_alpha == doctest::Approx(4 * std::max(-t, 0.0)).epsilon(2e-2));
  }
  CHECK(rp.bounded);
}
