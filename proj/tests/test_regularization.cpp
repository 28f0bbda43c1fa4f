#include "doctest.h"

#include "hqlab/regularization.hpp"
#include "hqlab/volume.hpp"

#include <cmath>
#include <cstdio>

using namespace hqlab;

TEST_CASE("metric on O(E)") {
  const auto m = build_model(ModelSpec::hirzebruch_f1());
  const auto r = metric_on_E(m, 128);
  CHECK(std::abs(r.theta_on_e + 1.0) < 1e-3);
  CHECK(std::abs(r.theta_wedge_fs) < 1e-3);
  CHECK(r.max_sigma_on_e == 0.0);
  CHECK(r.max_theta_on_e < 0);
  CHECK(r.transition_error < 1e-12);
}

TEST_CASE("u_eps far from E approaches beta") {
  const auto m = build_model(ModelSpec::hirzebruch_f1());
  const auto g = build_grid(m, 16);
  const NSClass beta = NSClass::f1(2, 0);
  const auto u = u_epsilon(m, g, beta, 1.0, 1e-3);
  const auto b = reference_form(m, g, beta);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (g.nodes[i].sigma_sq < 0.1) continue;
    CHECK((u.matrices[i] - b.matrices[i]).norm() < 1e-4);
  }
  CHECK_THROWS_AS(u_epsilon(m, g, beta, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("mass split of u_eps^2") {
  const auto m = build_model(ModelSpec::hirzebruch_f1());
  const auto r = limit_measure_check(m, 2.0, 1.0, {1e-1, 1e-2, 1e-3}, 64);
  for (const auto& row : r.rows) {
    std::printf("eps %.0e nodes %zu tube %.5f comp %.5f total %.5f m0 %.5f m1 %.5f m2 %.5f neg %.3e\n", row.eps,
                row.nodes, row.tube_mass, row.complement_mass, row.total, row.morse0, row.morse1, row.morse2,
                row.negative_weight);
  }
  CHECK(r.expected_total == 3.0);
  CHECK(r.expected_tube == -1.0);
  CHECK(r.expected_complement == 4.0);
  CHECK(r.total_constant);
  CHECK(r.split_converges);

  const auto zero = limit_measure_check(m, 2.0, 0.0, {1e-1, 1e-2, 1e-3}, 32);
  for (const auto& row : zero.rows) CHECK(std::abs(row.tube_mass) < 0.05);
}

TEST_CASE("Morse integral against the volume") {
  const auto m = build_model(ModelSpec::hirzebruch_f1());
  const auto r = morse_vs_volume(m, NSClass::f1(2, -1), {1e-1, 1e-2, 1e-3}, {32, 48, 64});
  CHECK(r.volume == 4.0);
  CHECK(r.lower_bound_holds);
  CHECK(r.converges);
  for (std::size_t i = 1; i < r.rows.size(); ++i) CHECK(r.rows[i].value <= r.rows[i - 1].value + r.tolerance);

  const auto nef = morse_vs_volume(m, NSClass::f1(3, 1), {1e-2}, {64});
  CHECK(std::abs(nef.rows[0].value - 8.0) < 0.04);

  const auto p11 = build_model(ModelSpec::proj_product({1, 1}));
  const auto p = morse_vs_volume(p11, NSClass::product({2, 3}), {1e-2}, {128});
  CHECK(std::abs(p.rows[0].value - 12.0) < 0.06);
  CHECK(p.converges);
}

TEST_CASE("sampled volume inequality") {
  const auto m = build_model(ModelSpec::hirzebruch_f1());
  std::vector<QuadratureGrid> grids;
  for (double eps : {1e-1, 1e-2, 1e-3}) grids.push_back(build_grid(m, regularization_grid(eps, 32)));
  std::vector<HermitianFormField> samples;
  const double eps[] = {1e-1, 1e-2, 1e-3};
  for (std::size_t i = 0; i < grids.size(); ++i)
    samples.push_back(u_epsilon(m, grids[i], NSClass::f1(2, 0), 1.0, eps[i]));
  const auto r = conjecture_check(m, NSClass::f1(2, -1), samples, 0.04);
  CHECK(r.violations == 0);
  CHECK(r.max_rhs <= 4.04);

  // boundary class H - E has volume 0
  const auto g = build_grid(m, 32);
  const auto rb = conjecture_check(m, NSClass::f1(1, 1), {reference_form(m, g, NSClass::f1(1, 1))}, 0.02);
  CHECK(rb.volume == 0.0);
  CHECK(rb.violations == 0);
}
