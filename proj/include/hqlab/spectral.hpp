#pragma once

#include "hqlab/models.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace hqlab {

/// One rounding step M = round(kA) with the error of the curvature it
/// defines, split by bidegree. Norms are Euclidean 2-form norms
/// sqrt(sum_{a<b} |T_ab|^2) in the real coordinates x = B s.
struct ApproxEntry {
  int k = 0;
  Eigen::MatrixXd m;      // integral, alternating
  double error = 0;       // || B^-T (M - kA) B^-1 ||
  double sup_error = 0;   // max_ab |M_ab - k A_ab|
  double norm20 = 0, norm11 = 0, norm02 = 0;  // split of the curvature of M
};

struct ApproxSequence {
  Eigen::MatrixXd target;
  int b2 = 0;
  std::vector<ApproxEntry> entries;  // k = 1..kmax
  std::vector<int> subsequence;      // k with a new record sup error
  double constant = 0;               // max over the subsequence of error k^{1/b2}
  bool dirichlet_holds = false;      // min_{k<=N} sup_error < 1/floor(N^{1/b2}) for every N
  const ApproxEntry& at(int k) const { return entries.at(static_cast<std::size_t>(k - 1)); }
};

/// Nearest integral alternating matrices to kA for k = 1..kmax. Throws if A
/// is not alternating or kmax < 1.
ApproxSequence dioph_approx(const ModelManifold& model, const Eigen::MatrixXd& a, int kmax);

struct CurvatureSplit {
  Eigen::MatrixXd form;   // Omega = B^-T M B^-1
  Eigen::MatrixXd p11;    // real (1,1) part
  Eigen::MatrixXcd p20, p02;
  double norm20 = 0, norm11 = 0, norm02 = 0;
  double reconstruction_error = 0;
};

/// Bidegree projection of the constant 2-form with lattice pairing M under
/// the standard complex structure x_j + i y_j.
CurvatureSplit curvature_split(const ModelManifold& model, const Eigen::MatrixXd& pairing);

enum class SpectralMethod { AnalyticLandau, Discretized };

std::string method_name(SpectralMethod m);

struct Level {
  double eigenvalue = 0;
  long long multiplicity = 0;
};

struct SpectralProblem {
  std::string model;
  Eigen::MatrixXd pairing;
  int k = 0;
  int q = 0;
  SpectralMethod method = SpectralMethod::AnalyticLandau;
  double cutoff = 0;
  int grid = 0;              // points per direction, discretized only
  double clamped = 0;        // most negative raw discretized eigenvalue, reset to 0
  std::vector<Level> levels; // ascending, eigenvalue <= cutoff
  /// N(lambda): eigenvalues <= lambda counted with multiplicity.
  long long count(double lambda) const;
};

/// Spectrum of the Dolbeault Laplacian on (0,q)-forms with values in the
/// bundle whose curvature has lattice pairing M, for the flat metric
/// omega = s sum dx ^ dy.
///
/// Analytic: Landau ladders of the (1,1) part with eigenvalues h_j,
///   (2 pi / s) sum_j (|h_j| m_j + [j not in J] max(-h_j, 0) + [j in J] max(h_j, 0)),
/// each of multiplicity |Pf M| per multi-index m and index set |J| = q.
/// Discretized: (1/2)(nabla^* nabla -+ 2 pi h) per complex direction with the
/// covariant second difference in Landau gauge, densely diagonalized and
/// summed over directions. Needs a diagonal lattice and curvature along the
/// (x_j, y_j) planes. grid = 0 picks a size from the curvature scale.
SpectralProblem laplacian_spectrum(const ModelManifold& model, const Eigen::MatrixXd& pairing, int k, int q,
                                   double cutoff, SpectralMethod method = SpectralMethod::AnalyticLandau,
                                   int grid = 0);

/// Same with pairing k A for an integral torus class.
SpectralProblem laplacian_spectrum(const ModelManifold& model, const NSClass& cls, int k, int q, double cutoff,
                                   SpectralMethod method = SpectralMethod::AnalyticLandau, int grid = 0);

/// Smallest positive Landau spacing 2 pi min|h_j| / s per unit k.
double landau_gap(const ModelManifold& model, const Eigen::MatrixXcd& hermitian);

struct SpectralValidation {
  SpectralProblem analytic, discretized;
  std::size_t compared = 0;
  double max_error = 0;   // over the lowest eigenvalues, with multiplicity
  double tolerance = 0;   // absolute
  bool agree = false;
};

/// Compares both methods on the eigenvalues below cutoff. The tolerance is a
/// fraction of the first positive level.
SpectralValidation cross_validate(const ModelManifold& model, const Eigen::MatrixXd& pairing, int q, double cutoff,
                                  double rel_tolerance = 0.05, int grid = 0);

/// Runs cross_validate and throws std::runtime_error on disagreement.
void require_landau_agreement(const ModelManifold& model, const Eigen::MatrixXd& pairing, int q, double cutoff,
                              double rel_tolerance = 0.05, int grid = 0);

struct CountingRow {
  int k = 0;
  double eps = 0;
  long long count = 0;
  double scaled = 0;  // n! / k^n N(kε)
  bool record = false;
  bool skipped = false;  // degenerate (1,1) part at this k
};

struct CountingReport {
  int q = 0;
  double expected = 0;  // int_{X(u,q)} (-1)^q u^n
  double gap = 0;
  std::vector<double> eps;
  std::vector<CountingRow> rows;  // k-major, eps-minor
  int best_k = 0;                 // last record k
  double estimate = 0;            // scaled count at best_k, smallest eps
  bool plateau = false;           // all eps agree at best_k
  double max_scaled = 0;
  double error = 0;               // relative, or absolute when expected = 0
  bool converges = false;         // error <= 5 % (absolute 0.05 at expected 0)
};

/// n!/k^n N(kε) along k = 1..kmax for the rational approximants of the
/// constant (1,1) target, with ε = factor * landau_gap.
CountingReport counting_convergence(const ModelManifold& model, const Eigen::MatrixXcd& target, int q, int kmax,
                                    const std::vector<double>& eps_factors = {0.5, 0.25, 0.125, 0.0625});

/// Estimate of the transcendental asymptotic q-cohomology of the target.
double transcendental_hq(const ModelManifold& model, const Eigen::MatrixXcd& target, int q, int kmax);

}  // namespace hqlab
