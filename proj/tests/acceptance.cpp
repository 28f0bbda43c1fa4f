// Acceptance run: one PASS/FAIL line per criterion, with wall time against its budget.
#include "hqlab/asymptotics.hpp"
#include "hqlab/cohomology.hpp"
#include "hqlab/forms.hpp"
#include "hqlab/optimizer.hpp"
#include "hqlab/potentials.hpp"
#include "hqlab/regularization.hpp"
#include "hqlab/spectral.hpp"
#include "hqlab/volume.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

using namespace hqlab;

namespace {

struct Verdict {
  std::ostringstream notes;
  bool ok = true;
  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes << " [failed: " << what << "]";
    }
  }
};

bool rel_close(double v, double ref, double rel) { return std::abs(v - ref) <= rel * std::abs(ref); }

const double kPhi = (1 + std::sqrt(5.0)) / 2;

Eigen::MatrixXd irrational_lattice() {
  Eigen::MatrixXd b = Eigen::MatrixXd::Identity(4, 4);
  b(2, 2) = std::sqrt(2.0);
  b(3, 3) = 1 / kPhi;
  return b;
}

QuadratureGrid grid_at(const ModelManifold& m, int res) {
  GridOptions o;
  o.resolution = res;
  return build_grid(m, o);
}

// Pfaffian of a 4x4 alternating matrix
double pf4(const Eigen::MatrixXd& a) {
  return a(0, 1) * a(2, 3) - a(0, 2) * a(1, 3) + a(0, 3) * a(1, 2);
}

// lattice pairing B^T Omega B, coordinates (x1, x2, y1, y2), H = R + iS
Eigen::MatrixXd pairing_by_hand(const Eigen::MatrixXcd& h, const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd r = h.real(), s = h.imag();
  Eigen::MatrixXd om(4, 4);
  om << s, r, -r, s;
  return b.transpose() * om * b;
}

void criterion1(Verdict& v) {
  const auto m = build_model(ModelSpec::proj_product({1, 1}));
  const auto t = cohomology_table(m, NSClass::product({2, 3}), 50);
  bool table = true;
  for (int k = 1; k <= 50; ++k) {
    table = table && t.at(0, k) == static_cast<long long>(2 * k + 1) * (3 * k + 1);
    table = table && t.at(1, k) == 0 && t.at(2, k) == 0;
  }
  v.expect(table, "h^q(kL) table");
  const auto p = hilbert_fit(t);
  bool euler = true;
  for (int k = 1; k <= 50; ++k) euler = euler && p(k) == Rational(t.euler(k));
  v.expect(euler, "alternating sums vs Hilbert polynomial");
  v.expect(p.coeffs.size() == 3 && p.coeffs[0] == 1 && p.coeffs[1] == 5 && p.coeffs[2] == 6,
           "Hilbert polynomial 6k^2 + 5k + 1");
  v.notes << " h0(k)=(2k+1)(3k+1), chi = 6k^2+5k+1 for k<=50";
}

void criterion2(Verdict& v) {
  const auto m = build_model(ModelSpec::proj_product({1, 1}));
  const auto a = asym_hq(m, NSClass::product({2, 3}), 0, 100);
  const auto b = asym_hq(m, NSClass::product({2, -3}), 1, 100);
  v.expect(rel_close(a.limit, 12, 0.01), "(2,3) q=0 limit");
  v.expect(rel_close(b.limit, 12, 0.01), "(2,-3) q=1 limit");
  const auto h = homogeneity_check(m, NSClass::product({2, 3}), 0, 2, 1, 50);
  v.expect(h.table_identity, "table identity at lambda = 2");
  v.expect(h.expected == 4, "lambda^n = 4");
  v.expect(rel_close(h.ratio, 4, 0.01), "limit ratio");
  v.notes << " limits " << a.limit << ", " << b.limit << "; homogeneity ratio " << h.ratio;
}

void criterion3(Verdict& v) {
  const auto m = build_model(ModelSpec::proj_product({1, 1}));
  const auto g = grid_at(m, 256);
  const double q1 = morse_integral(reference_form(m, g, NSClass::product({2, -3})), 1).value;
  const double q0 = morse_integral(reference_form(m, g, NSClass::product({2, 3})), 0).value;
  v.expect(rel_close(q1, 12, 0.005), "(2,-3) q=1");
  v.expect(rel_close(q0, 12, 0.005), "(2,3) q=0");
  v.notes << " product " << q1 << ", " << q0;

  // constant tori: n! |Pf(B^T Omega B)| = |det H| n! |det B|
  struct Case {
    Eigen::MatrixXd b;
    Eigen::MatrixXcd h;
    int q;
  };
  Eigen::MatrixXcd h1(2, 2), h2(2, 2), h3(2, 2);
  h1 << 1, 0, 0, -1;
  h2 << 2, std::complex<double>(0, 0.5), std::complex<double>(0, -0.5), 1;
  h3 << -1, 0.3, 0.3, -2;
  const std::vector<Case> cases{{Eigen::MatrixXd::Identity(4, 4), h1, 1},
                                {irrational_lattice(), h1, 1},
                                {irrational_lattice(), h2, 0},
                                {irrational_lattice(), h3, 2}};
  double worst = 0;
  for (const auto& c : cases) {
    const auto tm = build_model(ModelSpec::flat_torus(c.b));
    const auto tg = grid_at(tm, 8);
    const double val = morse_integral(reference_form(tm, tg, NSClass::torus(c.h)), c.q).value;
    const double ref = 2 * std::abs(pf4(pairing_by_hand(c.h, c.b)));
    const double det = 2 * std::abs(c.h.determinant().real() * c.b.determinant());
    v.expect(std::abs(ref - det) <= 1e-9, "Pfaffian oracle vs |det| vol");
    worst = std::max(worst, std::abs(val - ref));
  }
  v.expect(worst <= 1e-6, "torus cases within 1e-6");
  v.notes << "; torus max error " << worst;
}

void criterion4(Verdict& v) {
  struct Case {
    ModelSpec spec;
    NSClass cls;
    std::vector<double> hhat;  // per q, from the cohomology oracles
    int res, degree;
  };
  Eigen::MatrixXcd h(2, 2);
  h << 1, 0, 0, -1;
  const std::vector<Case> cases{
      {ModelSpec::proj_product({1, 1}), NSClass::product({2, -3}), {0, 12, 0}, 48, 2},
      {ModelSpec::proj_product({1, 1}), NSClass::product({2, 3}), {12, 0, 0}, 48, 2},
      {ModelSpec::hirzebruch_f1(), NSClass::f1(3, 1), {8, 0, 0}, 48, 2},
      {ModelSpec::hirzebruch_f1(), NSClass::f1(2, -1), {4, 1, 0}, 48, 2},
      {ModelSpec::flat_torus(Eigen::MatrixXd::Identity(4, 4)), NSClass::torus(h), {0, 2, 0}, 8, 1},
  };
  std::size_t total = 0, violations = 0, sweeps = 0;
  std::uint64_t seed = 100;
  for (const auto& c : cases) {
    const auto m = build_model(c.spec);
    const auto g = grid_at(m, c.res);
    BasisOptions bo;
    bo.degree = c.degree;
    const PotentialBasis basis(m, bo);
    for (int q = 0; q <= 2; ++q) {
      // oracle cross-check of the reference value used by the sweep
      v.expect(std::abs(hhat_closed_form(m, c.cls, q) - c.hhat[q]) <= 1e-9, "hhat reference " + m.label());
      const auto s = morse_sample_sweep(m, c.cls, q, basis, g, 100, seed++, 0.1);
      const double tol = c.hhat[q] > 0 ? 0.02 * c.hhat[q] : 0.05;
      std::size_t bad = 0;
      for (double x : s.values) bad += x < c.hhat[q] - tol;
      total += s.values.size();
      violations += bad;
      ++sweeps;
      v.expect(s.values.size() >= 100, "at least 100 samples");
    }
  }
  v.expect(violations == 0, "zero violations");
  v.notes << " " << sweeps << " sweeps, " << total << " samples, " << violations << " violations";
}

void criterion5(Verdict& v) {
  const auto m = build_model(ModelSpec::hirzebruch_f1());
  const NSClass big = NSClass::f1(2, -1), nef = NSClass::f1(3, 1);
  v.expect(volume_class(m, big) == 4.0, "Vol(2H+E) = 4");
  v.expect(volume_class(m, nef) == 8.0, "Vol(3H-E) = 8");
  v.expect(toric_envelope(m, big).volume == Q(4), "toric 2H+E");
  v.expect(toric_envelope(m, nef).volume == Q(8), "toric 3H-E");
  const double a = asym_hq(m, big, 0, 100).limit;
  const double b = asym_hq(m, nef, 0, 100).limit;
  v.expect(rel_close(a, 4, 0.01), "hhat0(2H+E)");
  v.expect(rel_close(b, 8, 0.01), "hhat0(3H-E)");
  v.notes << " hhat0 " << a << ", " << b;
}

void criterion6(Verdict& v) {
  const auto m = build_model(ModelSpec::hirzebruch_f1());
  const std::vector<double> eps{1e-1, 1e-2, 1e-3};
  const auto mv = morse_vs_volume(m, NSClass::f1(2, -1), eps, {32, 48, 64});
  v.expect(rel_close(mv.rows.back().value, 4, 0.05), "finest Morse value");
  // Zariski: 2H+E = 2H + E, positive part 2H, coefficient 1 along E
  const auto lm = limit_measure_check(m, 2, 1, eps, 32);
  double worst = 0;
  for (const auto& r : lm.rows) worst = std::max(worst, std::abs(r.total - 3) / 3);
  v.expect(worst <= 0.005, "total mass 3 for every eps");
  const auto& fin = lm.rows.back();
  v.expect(std::abs(fin.tube_mass - (-1)) <= 0.1, "tube mass -1");
  v.expect(rel_close(fin.complement_mass, 4, 0.1), "complement mass 4");
  v.notes << " Morse " << mv.rows.back().value << ", total err " << worst << ", split (" << fin.tube_mass << ", "
          << fin.complement_mass << ")";
}

void criterion7(Verdict& v) {
  // elliptic curve, degree 3 bundle: zero level of multiplicity 3
  Eigen::MatrixXcd d3(1, 1);
  d3 << 3;
  const auto e = build_model(ModelSpec::flat_torus(Eigen::MatrixXd::Identity(2, 2)));
  const double egap = landau_gap(e, d3);
  const auto s = laplacian_spectrum(e, NSClass::torus(d3), 1, 0, 0.5 * egap);
  v.expect(s.count(0.5 * egap) == 3, "zero level multiplicity 3");
  const auto sd = laplacian_spectrum(e, NSClass::torus(d3), 1, 0, 0.5 * egap, SpectralMethod::Discretized);
  v.expect(sd.count(0.5 * egap) == 3, "discretized zero level 3");

  // n = 2, signature (1,1), transcendental lattice
  const auto t = build_model(ModelSpec::flat_torus(irrational_lattice()));
  Eigen::MatrixXcd h(2, 2);
  h << 1, 0, 0, -1;
  const double two_vol = 2 * std::sqrt(2.0) / kPhi;
  const auto c1 = counting_convergence(t, h, 1, 20);
  const auto c0 = counting_convergence(t, h, 0, 20);
  v.expect(c1.best_k <= 20 && rel_close(c1.estimate, two_vol, 0.05), "q=1 counts to 2 vol");
  v.expect(std::abs(c0.estimate) <= 0.05 && c0.max_scaled <= 0.05, "q=0 counts to 0");

  // analytic vs discretized on integral cases
  Eigen::MatrixXcd hv(2, 2);
  hv << 2, 0, 0, -1;
  const auto unit = build_model(ModelSpec::flat_torus(Eigen::MatrixXd::Identity(4, 4)));
  const Eigen::MatrixXd mv = torus_pairing(unit, hv);
  bool agree = true;
  double err = 0;
  for (int q = 0; q <= 2; ++q) {
    const auto r = cross_validate(unit, mv, q, 2.5 * landau_gap(unit, hv));
    agree = agree && r.agree && r.compared > 0;
    err = std::max(err, r.max_error / r.tolerance);
  }
  for (int q = 0; q <= 1; ++q) {
    const auto r = cross_validate(e, torus_pairing(e, d3), q, 2.5 * egap);
    agree = agree && r.agree && r.compared > 0;
    err = std::max(err, r.max_error / r.tolerance);
  }
  v.expect(agree, "analytic vs discretized");
  v.notes << " q1 estimate " << c1.estimate << " vs " << two_vol << " at k=" << c1.best_k << ", q0 " << c0.estimate
          << "; validation error/tol " << err;
}

void criterion8(Verdict& v) {
  const auto t = build_model(ModelSpec::flat_torus(irrational_lattice()));
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  double worst = 0;
  bool bound = true, type = true;
  for (int i = 0; i < 10; ++i) {
    Eigen::MatrixXcd h(2, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) h(a, b) = {g(rng), g(rng)};
    h = 0.5 * (h + h.adjoint()).eval();
    const auto s = dioph_approx(t, torus_pairing(t, h), 500);
    v.expect(s.b2 == 6, "b2 = 6");
    v.expect(std::isfinite(s.constant) && !s.subsequence.empty(), "finite C");
    for (int k : s.subsequence) bound = bound && s.at(k).error <= s.constant * std::pow(k, -1.0 / 6) * (1 + 1e-12);
    for (const auto& e : s.entries) type = type && e.norm02 <= e.error + 1e-12;
    worst = std::max(worst, s.constant);
  }
  v.expect(bound, "error <= C k^(-1/6)");
  v.expect(type, "|Theta^(0,2)| <= |M - kA|");
  v.notes << " 10 targets, largest C " << worst;
}

void criterion9(Verdict& v) {
  struct Case {
    ModelSpec spec;
    NSClass line, divisor, other;
    int q;
  };
  const std::vector<Case> cases{
      {ModelSpec::proj_product({1, 1}), NSClass::product({2, -3}), NSClass::product({1, -1}),
       NSClass::product({3, -2}), 1},
      {ModelSpec::proj_product({1, 1}), NSClass::product({2, 3}), NSClass::product({1, 0}), NSClass::product({1, 1}), 0},
      {ModelSpec::proj_product({1, 2}), NSClass::product({1, 2}), NSClass::product({1, 1}), NSClass::product({2, 1}), 0},
      {ModelSpec::hirzebruch_f1(), NSClass::f1(3, 1), NSClass::f1(0, -1), NSClass::f1(2, -1), 0},
  };
  double worst_ratio_slope = -1e9, worst_lip = 0;
  for (const auto& c : cases) {
    const auto m = build_model(c.spec);
    const int n = m.dim();
    const auto tw = twist_bound_check(m, c.line, c.divisor, c.q, n == 3 ? 40 : 60);
    v.expect(std::isfinite(tw.constant), "finite twist constant");
    v.expect(tw.diff_slope <= n - 1 + 0.1, "difference grows at most like k^(n-1)");
    v.expect(tw.ratio_slope <= 0.1, "ratio slope");
    const auto lp = lipschitz_check(m, {{c.line, c.other}}, c.q, n == 3 ? 40 : 60);
    v.expect(std::isfinite(lp.constant), "finite Lipschitz constant");
    v.expect(std::abs(lp.scaling_slope) <= 0.1, "Lipschitz scaling slope");
    worst_ratio_slope = std::max(worst_ratio_slope, tw.ratio_slope);
    worst_lip = std::max(worst_lip, std::abs(lp.scaling_slope));
  }
  v.notes << " max twist ratio slope " << worst_ratio_slope << ", max |Lipschitz slope| " << worst_lip;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<void(Verdict&)> run;
  };
  const std::vector<Criterion> all{
      {1, "oracle exactness", 1, criterion1},
      {2, "asymptotic limits and homogeneity", 5, criterion2},
      {3, "Morse quadrature on products and tori", 30, criterion3},
      {4, "Morse inequality over random potentials", 300, criterion4},
      {5, "volume and Zariski", 5, criterion5},
      {6, "regularization of 2H+E on F1", 600, criterion6},
      {7, "Landau spectra and counting", 600, criterion7},
      {8, "Diophantine approximation", 60, criterion8},
      {9, "twist and Lipschitz bounds", 60, criterion9},
  };
  int failed = 0;
  for (const auto& c : all) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.ok = false;
      v.notes << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) v.expect(false, "runtime budget");
    failed += !v.ok;
    std::cout << (v.ok ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << ") " << std::fixed
              << std::setprecision(2) << secs << "s / " << std::setprecision(0) << c.budget_s << "s"
              << std::defaultfloat << std::setprecision(6) << v.notes.str() << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
