#pragma once

#include "hqlab/forms.hpp"
#include "hqlab/models.hpp"

#include <vector>

namespace hqlab {

/// Checks on the metric h on O(E) over F1 (product of Fubini-Study metrics,
/// |sigma_E|_h^2 = |x_1|^2 + |x_2|^2 over |x|^2 in the blown-up plane).
struct EMetricReport {
  double theta_on_e = 0;        // int_E Theta_{E,h}, expected E^2 = -1
  double theta_wedge_fs = 0;    // int Theta ^ mu^* omega_FS, expected H.E = 0
  double max_sigma_on_e = 0;    // max |sigma_E|^2 over nodes on E
  double max_theta_on_e = 0;    // max over E of Theta|_E / omega|_E (< 0)
  double transition_error = 0;  // chart disagreement of |sigma|^2 and Theta
};

EMetricReport metric_on_E(const ModelManifold& model, int resolution = 256);

/// Grid options resolving the eps^2-wide peak of u_eps along E.
GridOptions regularization_grid(double eps, int resolution);

/// u_eps = c (i/2pi) ddbar log(|sigma_E|^2 + eps^2) + c Theta_{E,h} + beta in
/// the class beta + cE, using the closed form
/// c/pi eps^2 (df ^ dbar f)/f / (eps^2 + f)^2 + c eps^2 / (eps^2 + f) Theta + beta.
/// beta is the reference form of `positive`. Throws for eps <= 0.
HermitianFormField u_epsilon(const ModelManifold& model, const QuadratureGrid& grid,
                             const NSClass& positive, double c, double eps);

struct EpsilonRow {
  double eps = 0;
  int resolution = 0;
  std::size_t nodes = 0;
  double tube_mass = 0;        // int_{|sigma|^2 < eps} u_eps^2
  double complement_mass = 0;
  double total = 0;
  double morse0 = 0, morse1 = 0, morse2 = 0;
  double degenerate_weight = 0;
  double negative_weight = 0;  // weight of nodes with a negative eigenvalue
};

EpsilonRow evaluate_epsilon(const ModelManifold& model, const NSClass& positive, double c, double eps,
                            int resolution);

struct LimitMeasureReport {
  double expected_total = 0;       // (aH + cE)^2
  double expected_tube = 0;        // 2c E.beta + c^2 E^2
  double expected_complement = 0;  // beta^2
  std::vector<EpsilonRow> rows;
  double max_total_error = 0;      // relative
  double tube_error = 0;           // relative, finest eps
  double complement_error = 0;     // relative, finest eps
  bool total_constant = false;     // all totals within 0.5 %
  bool split_converges = false;    // finest split within 10 %
};

/// Mass split of u_eps^2 on F1 for aH + cE. Needs at least three eps values
/// spanning two decades.
LimitMeasureReport limit_measure_check(const ModelManifold& model, double a, double c,
                                       const std::vector<double>& eps, int resolution);

struct MorseVolumeRow {
  double eps = 0;
  int resolution = 0;
  double value = 0;  // int_{X(u,0)} u^2
};

struct MorseVolumeReport {
  double volume = 0;
  std::vector<MorseVolumeRow> rows;
  double tolerance = 0;
  bool lower_bound_holds = false;  // every value >= Vol - tol
  bool converges = false;          // finest value within 5 % of Vol
};

/// int_{X(u_eps,0)} u_eps^2 over paired (eps, resolution) schedules. On F1 the
/// current is c[E] + beta from the Zariski decomposition; on products the
/// reference form is used and eps is ignored.
MorseVolumeReport morse_vs_volume(const ModelManifold& model, const NSClass& cls,
                                  const std::vector<double>& eps, const std::vector<int>& resolutions);

struct ConjectureReport {
  double volume = 0;
  double tolerance = 0;
  std::size_t samples = 0;
  double max_rhs = 0;  // largest int_{X(u,0) u X(u,1)} u^2 over samples
  std::size_t violations = 0;
  std::vector<double> rhs;
};

/// Vol(alpha) >= int_{X(u,0) u X(u,1)} u^2 - tol for every sample (surfaces).
ConjectureReport conjecture_check(const ModelManifold& model, const NSClass& cls,
                                  const std::vector<HermitianFormField>& samples, double tolerance);

}  // namespace hqlab
