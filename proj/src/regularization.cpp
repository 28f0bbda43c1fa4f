#include "hqlab/regularization.hpp"

#include "hqlab/volume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hqlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPeakGuard = 1e-14;

void require_f1(const ModelManifold& m) {
  if (m.kind() != ModelKind::HirzebruchF1) throw std::invalid_argument("regularization lives on the F1 model");
}

// Chart coordinates of the point with moment data (r, xi) and angles in a
// prescribed chart.
CVec chart_point(int chart, double r, double xi, double th1, double th2) {
  const double rho = r / (1.0 - r);
  CVec z(2);
  if (chart == 0) {
    z(f1::kNormalCoord) = std::polar(std::sqrt(rho * xi), th1);
    z(f1::kTangentCoord) = std::polar(std::sqrt((1.0 - xi) / xi), th2 - th1);
  } else {
    z(f1::kNormalCoord) = std::polar(std::sqrt(rho * (1.0 - xi)), th2);
    z(f1::kTangentCoord) = std::polar(std::sqrt(xi / (1.0 - xi)), th1 - th2);
  }
  return z;
}

// (df ^ dbar f) / f in chart coordinates, with the analytic limit on E.
CMat rank_one_part(const Jet& f, const CVec& z) {
  if (f.value() < kPeakGuard) {
    CMat k = CMat::Zero(2, 2);
    k(f1::kNormalCoord, f1::kNormalCoord) = 1.0 + std::norm(z(f1::kTangentCoord));
    return k;
  }
  return outer(f.grad(), f.grad()) / f.value();
}

}  // namespace

EMetricReport metric_on_E(const ModelManifold& model, int resolution) {
  require_f1(model);
  EMetricReport r;
  const auto eg = exceptional_curve_grid(model, resolution);
  r.max_theta_on_e = -std::numeric_limits<double>::infinity();
  std::vector<double> restricted(eg.nodes.size());
  for (std::size_t i = 0; i < eg.nodes.size(); ++i) {
    const auto& node = eg.nodes[i];
    const int t = f1::kTangentCoord;
    const double ratio = f1::theta_e(node.chart, node.z)(t, t).real() / node.metric(t, t).real();
    restricted[i] = ratio * node.weight;
    r.max_theta_on_e = std::max(r.max_theta_on_e, ratio);
    r.max_sigma_on_e = std::max(r.max_sigma_on_e, f1::sigma_norm_sq(node.chart, node.z).value());
  }
  r.theta_on_e = pairwise_sum(restricted);

  GridOptions opt;
  opt.resolution = resolution;
  const auto g = build_grid(model, opt);
  HermitianFormField theta{model, &g, NSClass::f1(0, 1), {}, {}};
  HermitianFormField fs{model, &g, NSClass::f1(1, 0), {}, {}};
  for (const auto& node : g.nodes) {
    theta.matrices.push_back(f1::theta_e(node.chart, node.z));
    fs.matrices.push_back(f1::pullback_fs(node.chart, node.z));
  }
  r.theta_wedge_fs = mixed_chern_number(theta, fs);

  // Same points seen from both charts.
  for (double rr : {0.0, 0.01, 0.3, 0.8})
    for (double xi : {0.3, 0.5, 0.7})
      for (double th : {0.0, 1.1, 2.5}) {
        const CVec z0 = chart_point(0, rr, xi, th, 0.4);
        const CVec z1 = chart_point(1, rr, xi, th, 0.4);
        const double f0 = f1::sigma_norm_sq(0, z0).value();
        const double f1v = f1::sigma_norm_sq(1, z1).value();
        r.transition_error = std::max(r.transition_error, std::abs(f0 - f1v));
        const RVec e0 = relative_eigenvalues(metric_matrix(model, 0, z0), f1::theta_e(0, z0));
        const RVec e1 = relative_eigenvalues(metric_matrix(model, 1, z1), f1::theta_e(1, z1));
        r.transition_error = std::max(r.transition_error, (e0 - e1).cwiseAbs().maxCoeff());
      }
  return r;
}

GridOptions regularization_grid(double eps, int resolution) {
  GridOptions o;
  o.resolution = resolution;
  // Dyadic levels from the first radial cell down to a few cells below eps^2.
  const double first = 1.0 / resolution;
  o.exceptional_levels = std::max(0, static_cast<int>(std::ceil(std::log2(first / (eps * eps)))) + 6);
  o.exceptional_subcells = 8;
  return o;
}

HermitianFormField u_epsilon(const ModelManifold& model, const QuadratureGrid& grid, const NSClass& positive,
                             double c, double eps) {
  require_f1(model);
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  HermitianFormField u = reference_form(model, grid, positive);
  u.cls = positive.plus(NSClass::f1(0, -c));
  const double e2 = eps * eps;
  parallel_for(grid.nodes.size(), [&](std::size_t i) {
    const auto& node = grid.nodes[i];
    const Jet f = f1::sigma_norm_sq(node.chart, node.z);
    const double den = e2 + f.value();
    u.matrices[i] += (c / kPi) * e2 / (den * den) * rank_one_part(f, node.z) +
                     (c * e2 / den) * f1::theta_e(node.chart, node.z);
  });
  return u;
}

EpsilonRow evaluate_epsilon(const ModelManifold& model, const NSClass& positive, double c, double eps,
                            int resolution) {
  const auto grid = build_grid(model, regularization_grid(eps, resolution));
  const auto u = u_epsilon(model, grid, positive, c, eps);
  const auto prof = signature_profile(u);
  EpsilonRow row;
  row.eps = eps;
  row.resolution = resolution;
  row.nodes = grid.nodes.size();
  std::vector<double> tube(grid.nodes.size()), comp(grid.nodes.size()), neg(grid.nodes.size());
  for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
    const double m = prof.nodes[i].density * grid.nodes[i].weight;
    const bool in_tube = grid.nodes[i].sigma_sq < eps;
    tube[i] = in_tube ? m : 0.0;
    comp[i] = in_tube ? 0.0 : m;
    neg[i] = prof.nodes[i].negative > 0 ? grid.nodes[i].weight : 0.0;
  }
  row.tube_mass = pairwise_sum(tube);
  row.complement_mass = pairwise_sum(comp);
  row.total = row.tube_mass + row.complement_mass;
  const auto ms = morse_integrals(prof, grid);
  row.morse0 = ms[0].value;
  row.morse1 = ms[1].value;
  row.morse2 = ms[2].value;
  row.degenerate_weight = prof.degenerate_weight;
  row.negative_weight = pairwise_sum(neg);
  return row;
}

LimitMeasureReport limit_measure_check(const ModelManifold& model, double a, double c,
                                       const std::vector<double>& eps, int resolution) {
  require_f1(model);
  if (eps.size() < 3) throw std::invalid_argument("need at least three eps values");
  const auto [lo, hi] = std::minmax_element(eps.begin(), eps.end());
  if (*hi / *lo < 100.0 * (1 - 1e-12)) throw std::invalid_argument("eps values must span two decades");
  LimitMeasureReport r;
  const NSClass beta = NSClass::f1(a, 0);
  const NSClass e = NSClass::f1(0, -1);
  r.expected_total = intersection_power(model, NSClass::f1(a, -c));
  r.expected_complement = intersection(model, beta, beta);
  r.expected_tube = 2 * c * intersection(model, e, beta) + c * c * intersection(model, e, e);
  for (double x : eps) r.rows.push_back(evaluate_epsilon(model, beta, c, x, resolution));
  auto rel = [](double v, double ref) { return ref != 0 ? std::abs(v - ref) / std::abs(ref) : std::abs(v); };
  for (const auto& row : r.rows) r.max_total_error = std::max(r.max_total_error, rel(row.total, r.expected_total));
  const auto& finest = *std::min_element(r.rows.begin(), r.rows.end(),
                                         [](const EpsilonRow& x, const EpsilonRow& y) { return x.eps < y.eps; });
  r.tube_error = rel(finest.tube_mass, r.expected_tube);
  r.complement_error = rel(finest.complement_mass, r.expected_complement);
  r.total_constant = r.max_total_error <= 0.005;
  r.split_converges = r.tube_error <= 0.10 && r.complement_error <= 0.10;
  return r;
}

MorseVolumeReport morse_vs_volume(const ModelManifold& model, const NSClass& cls,
                                  const std::vector<double>& eps, const std::vector<int>& resolutions) {
  if (model.dim() != 2 || model.kind() == ModelKind::FlatTorus) {
    throw std::invalid_argument("Morse versus volume is implemented on surface models");
  }
  if (eps.empty() || eps.size() != resolutions.size()) {
    throw std::invalid_argument("eps and grid schedules must have equal nonzero length");
  }
  MorseVolumeReport r;
  r.volume = volume_class(model, cls);
  if (!(r.volume > 0)) throw std::invalid_argument("class is not big");
  r.tolerance = 0.01 * r.volume;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    MorseVolumeRow row{eps[i], resolutions[i], 0};
    if (model.kind() == ModelKind::HirzebruchF1) {
      const auto z = zariski(model, cls);
      const double c = z.curves.empty() ? 0.0 : z.coefficients[0];
      row.value = evaluate_epsilon(model, z.positive, c, eps[i], resolutions[i]).morse0;
    } else {
      const auto g = build_grid(model, resolutions[i]);
      row.value = morse_integral(reference_form(model, g, cls), 0).value;
    }
    r.rows.push_back(row);
  }
  r.lower_bound_holds = std::all_of(r.rows.begin(), r.rows.end(),
                                    [&](const MorseVolumeRow& x) { return x.value >= r.volume - r.tolerance; });
  r.converges = std::abs(r.rows.back().value - r.volume) <= 0.05 * r.volume;
  return r;
}

ConjectureReport conjecture_check(const ModelManifold& model, const NSClass& cls,
                                  const std::vector<HermitianFormField>& samples, double tolerance) {
  if (model.dim() != 2) throw std::invalid_argument("the sampled inequality is implemented on surfaces");
  ConjectureReport r;
  r.volume = volume_class(model, cls);
  r.tolerance = tolerance;
  r.samples = samples.size();
  r.max_rhs = -std::numeric_limits<double>::infinity();
  for (const auto& u : samples) {
    const auto prof = signature_profile(u);
    // on X(u,1) the integrand u^2 is negative, so the union integral is M0 - M1
    const double rhs = morse_integral(prof, *u.grid, 0).value - morse_integral(prof, *u.grid, 1).value;
    r.rhs.push_back(rhs);
    r.max_rhs = std::max(r.max_rhs, rhs);
    if (rhs > r.volume + tolerance) ++r.violations;
  }
  return r;
}

}  // namespace hqlab
