#include "doctest.h"

#include "hqlab/io.hpp"
#include "hqlab/optimizer.hpp"

#include <algorithm>
#include <cmath>

using namespace hqlab;

namespace {

QuadratureGrid grid_for(const ModelManifold& m, int res) {
  GridOptions o;
  o.resolution = res;
  return build_grid(m, o);
}

}  // namespace

TEST_CASE("product form is optimal for (2,-3) in degree one") {
  const auto m = build_model(ModelSpec::proj_product({1, 1}));
  const auto g = grid_for(m, 32);
  const PotentialBasis basis(m, {});
  OptimizerOptions opt;
  opt.budget = 150;
  const auto r = minimize_morse(m, NSClass::product({2, -3}), 1, basis, g, opt);
  CHECK(r.hhat == 12.0);
  CHECK(r.value >= 12.0 - r.tolerance);
  CHECK(r.value == doctest::Approx(12.0).epsilon(0.01));
  CHECK(r.guard_violations == 0);
  CHECK(r.trace.front().value == doctest::Approx(12.0).epsilon(1e-9));
  for (const auto& t : r.trace) {
    CHECK(t.guard_ok);
    CHECK(t.hash.size() == 16);
  }
  CHECK(r.trace.size() <= 150);
  const auto gap = gap_report(m, NSClass::product({2, -3}), 1, r);
  CHECK(std::abs(gap.gap) <= 0.02);
  CHECK(!gap.exhibit);
  CHECK_THROWS_AS(minimize_morse(m, NSClass::product({2, -3}), 1, basis, g, OptimizerOptions{.budget = 50}),
                  std::invalid_argument);
}

TEST_CASE("ample and torus classes stay at the intersection number") {
  const auto f1m = build_model(ModelSpec::hirzebruch_f1());
  const auto g = grid_for(f1m, 32);
  const auto r = minimize_morse(f1m, NSClass::f1(3, 1), 0, PotentialBasis(f1m, {}), g, OptimizerOptions{.budget = 120});
  CHECK(r.value == doctest::Approx(8.0).epsilon(0.01));
  CHECK(r.guard_violations == 0);
  CHECK(gap_report(f1m, NSClass::f1(3, 1), 0, r).gap == doctest::Approx(0.0).epsilon(0.01));

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(2, 2);
  h(0, 0) = 1;
  h(1, 1) = -1;
  const auto t2 = build_model(ModelSpec::flat_torus(Eigen::MatrixXd::Identity(4, 4)));
  const auto gt = grid_for(t2, 6);
  BasisOptions bo;
  bo.degree = 1;
  const auto rt = minimize_morse(t2, NSClass::torus(h), 1, PotentialBasis(t2, bo), gt, OptimizerOptions{.budget = 100});
  CHECK(rt.value >= 2.0 - rt.tolerance);
  CHECK(rt.trace.front().value == doctest::Approx(2.0));
  CHECK(rt.guard_violations == 0);
}

TEST_CASE("restart invariance and basis monotonicity") {
  const auto f1m = build_model(ModelSpec::hirzebruch_f1());
  const auto g = grid_for(f1m, 32);
  const NSClass alpha = NSClass::f1(2, -1);
  OptimizerOptions opt;
  opt.budget = 120;
  opt.restarts = 5;
  opt.seed = 42;
  const auto r = minimize_morse(f1m, alpha, 0, PotentialBasis(f1m, {}), g, opt);
  REQUIRE(r.restart_values.size() == 5);
  const auto [lo, hi] = std::minmax_element(r.restart_values.begin(), r.restart_values.end());
  CHECK(*hi - *lo <= 0.01 * *lo);
  CHECK(r.guard_violations == 0);

  double prev = std::numeric_limits<double>::infinity();
  for (int degree = 1; degree <= 3; ++degree) {
    BasisOptions bo;
    bo.degree = degree;
    const auto rd = minimize_morse(f1m, alpha, 0, PotentialBasis(f1m, bo), g, OptimizerOptions{.budget = 120});
    CHECK(rd.value <= prev + morse_tolerance(rd.hhat));
    prev = rd.value;
  }
}

TEST_CASE("soft search reports sharp values") {
  const auto m = build_model(ModelSpec::proj_product({1, 1}));
  const auto g = grid_for(m, 24);
  OptimizerOptions opt;
  opt.budget = 100;
  opt.soft_width = 0.05;
  const auto r = minimize_morse(m, NSClass::product({2, 3}), 0, PotentialBasis(m, {}), g, opt);
  const auto u = hessian_form(reference_form(m, g, NSClass::product({2, 3})), tabulate(PotentialBasis(m, {}), g),
                              r.coeffs);
  CHECK(morse_integral(u, 0).value == doctest::Approx(r.value));
  CHECK(r.guard_violations == 0);
}

TEST_CASE("random potential sweeps respect the Morse bound") {
  const auto m = build_model(ModelSpec::proj_product({1, 1}));
  const auto g = grid_for(m, 32);
  const PotentialBasis basis(m, {});
  for (int q = 0; q <= 2; ++q) {
    const auto s = morse_sample_sweep(m, NSClass::product({2, -3}), q, basis, g, 100, 9);
    CHECK(s.samples == 100);
    CHECK(s.violations == 0);
    CHECK(s.values[0] == doctest::Approx(q == 1 ? 12.0 : 0.0));
  }
  // same seed, same values
  const auto a = morse_sample_sweep(m, NSClass::product({2, 3}), 0, basis, g, 20, 3);
  const auto b = morse_sample_sweep(m, NSClass::product({2, 3}), 0, basis, g, 20, 3);
  CHECK(a.values == b.values);
}

TEST_CASE("io helpers") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(fixed(-0.0, 3) == "0.000");
  CHECK(fixed(-1e-9, 3) == "0.000");
  CHECK(fixed(2.5, 2) == "2.50");
  CsvTable t({"k", "v"});
  t.add({"1", fixed(0.5, 3)});
  CHECK(t.str() == "k,v\n1,0.500\n");
  CHECK_THROWS_AS(t.add({"1"}), std::invalid_argument);
  CHECK(coeffs_hash({0.1, 0.2}) == coeffs_hash({0.1, 0.2}));
  CHECK(coeffs_hash({0.1, 0.2}) != coeffs_hash({0.2, 0.1}));
}
