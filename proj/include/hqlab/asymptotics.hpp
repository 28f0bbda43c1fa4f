#pragma once

#include "hqlab/cohomology.hpp"
#include "hqlab/models.hpp"

#include <utility>
#include <vector>

namespace hqlab {

/// Weighted l1 norm on NS coordinates. Each generator is weighted by the
/// omega-volume int_D omega^{n-1} of a divisor representing it.
double ns_norm(const ModelManifold& model, const NSClass& cls);

struct DivisorLattice {
  std::vector<NSClass> generators;
  std::vector<double> norms;
};

/// Generators of the NS lattice with their norms.
DivisorLattice divisor_lattice(const ModelManifold& model);

struct AsymEstimate {
  int q = 0;
  std::vector<std::pair<int, double>> values;  // (k, n! h^q(kL) / k^n)
  double limit = 0;
  double diagnostic = 0;  // max - min of the values over the tail
};

/// Sequence n! h^q(kL)/k^n for k = 1..kmax and its limit, fitted as a + b/k
/// on the last third. Throws std::invalid_argument for kmax < 10.
AsymEstimate asym_hq(const ModelManifold& model, const NSClass& cls, int q, int kmax);

struct HomogeneityReport {
  long long num = 1, den = 1;  // lambda = num / den
  bool table_identity = true;  // h^q(k den (lambda L)) == h^q(k num L)
  double limit_base = 0;
  double limit_scaled = 0;
  double ratio = 0;     // limit_scaled / limit_base
  double expected = 0;  // lambda^n
};

/// Checks hhat^q(lambda alpha) = lambda^n hhat^q(alpha) through the exact
/// identity of tables along the shared multiples, and compares the fitted
/// limits.
HomogeneityReport homogeneity_check(const ModelManifold& model, const NSClass& cls, int q,
                                    long long num, long long den, int kmax);

struct TwistReport {
  std::vector<int> k;
  std::vector<double> difference;  // |h^q(kL + D) - h^q(kL)|
  std::vector<double> bound;       // (||kL|| + ||D||)^{n-1} ||D||
  std::vector<double> ratio;
  double constant = 0;    // max ratio
  double diff_slope = 0;  // log-log slope of the difference on the tail
  double ratio_slope = 0; // log-log slope of the ratio on the tail
  bool bounded = true;    // diff_slope <= n - 1 + 0.1 and ratio_slope <= 0.1
};

TwistReport twist_bound_check(const ModelManifold& model, const NSClass& line, const NSClass& divisor,
                              int q, int kmax);

struct LipschitzPair {
  NSClass alpha, beta;
  double h_alpha = 0, h_beta = 0;
  double lhs = 0;    // |hhat(beta) - hhat(alpha)|
  double scale = 0;  // (||alpha|| + ||beta||)^{n-1} ||beta - alpha||
};

struct LipschitzReport {
  std::vector<LipschitzPair> pairs;
  double constant = 0;  // max lhs / scale
  /// Ratio slope under the scaling (alpha, beta) -> (m alpha, m beta); both
  /// sides are homogeneous of degree n, so it should vanish.
  std::vector<double> scaling_m;
  std::vector<double> scaling_ratio;
  double scaling_slope = 0;
  bool bounded = true;
};

/// Empirical constant of |hhat(beta) - hhat(alpha)| <= C' (||a|| + ||b||)^{n-1} ||b - a||
/// over the given pairs, plus a scaling sweep of the first pair with a
/// nonzero difference.
LipschitzReport lipschitz_check(const ModelManifold& model,
                                const std::vector<std::pair<NSClass, NSClass>>& pairs, int q, int kmax,
                                int max_scale = 8);

}  // namespace hqlab
