#pragma once

#include "hqlab/forms.hpp"
#include "hqlab/models.hpp"
#include "hqlab/potentials.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hqlab {

/// Slack for F_q >= hhat^q: 2 % of hhat^q, or 0.05 when hhat^q = 0.
double morse_tolerance(double hhat);

struct OptimizerOptions {
  int budget = 200;             // objective evaluations per restart
  int restarts = 1;
  std::uint64_t seed = 1;
  double simplex_scale = 0.05;  // initial step per coefficient, times ns_norm(class)
  double soft_width = 0;        // > 0 searches on the soft-clamped objective
  double ftol = 1e-10;
  double xtol = 1e-8;
};

struct TraceEntry {
  int index = 0;
  int restart = 0;
  std::string hash;   // coeffs_hash of the evaluated point
  double value = 0;   // sharp F_q
  bool guard_ok = true;
};

struct OptimizeResult {
  int q = 0;
  std::vector<double> coeffs;
  double value = 0;
  double hhat = 0;
  double tolerance = 0;
  std::vector<TraceEntry> trace;
  std::vector<double> restart_values;
  std::size_t guard_violations = 0;
  double min_evaluated = 0;
  bool converged = false;  // every restart met ftol/xtol inside its budget
};

/// Nelder-Mead with restarts on F_q(c) = int_{X(u_c,q)} (-1)^q u_c^n where
/// u_c is the reference form of the class plus i ddbar sum c_j phi_j on the
/// grid. Restart 0 starts at c = 0, later ones at a seeded random offset of
/// one simplex scale. Every sharp evaluation is checked against
/// hhat^q - morse_tolerance. Throws for budget < 100.
OptimizeResult minimize_morse(const ModelManifold& model, const NSClass& cls, int q, const PotentialBasis& basis,
                              const QuadratureGrid& grid, const OptimizerOptions& options = {});

struct GapReport {
  double hhat = 0;
  double minimized = 0;
  double gap = 0;         // relative to hhat, absolute when hhat = 0
  bool exhibit = false;   // gap above 5 %
  std::string note;
};

GapReport gap_report(const ModelManifold& model, const NSClass& cls, int q, const OptimizeResult& result);

struct SampleSweep {
  int q = 0;
  double hhat = 0;
  double tolerance = 0;
  std::size_t samples = 0;
  std::size_t violations = 0;
  double min_value = 0;
  double max_value = 0;
  std::vector<double> values;
};

/// F_q at seeded random coefficient vectors with entries uniform in
/// [-amplitude, amplitude] * ns_norm(class), plus c = 0 first.
SampleSweep morse_sample_sweep(const ModelManifold& model, const NSClass& cls, int q, const PotentialBasis& basis,
                               const QuadratureGrid& grid, std::size_t samples, std::uint64_t seed,
                               double amplitude = 0.1);

}  // namespace hqlab
