#pragma once

#include "hqlab/cohomology.hpp"
#include "hqlab/models.hpp"

#include <boost/rational.hpp>

#include <string>
#include <vector>

namespace hqlab {

struct ZariskiDecomposition {
  NSClass cls;
  NSClass positive;
  std::vector<NSClass> curves;        // support of the negative part
  std::vector<double> coefficients;   // t_j >= 0
  Eigen::MatrixXd gram;               // (C_i . C_j)
  double volume = 0;                  // P^2

  NSClass negative() const;
};

/// True if the class lies in the closed pseudoeffective cone of the model.
bool is_pseudoeffective(const ModelManifold& model, const NSClass& cls, double tol = 1e-12);
/// True if the class is nef.
bool is_nef(const ModelManifold& model, const NSClass& cls, double tol = 1e-12);

/// Negative curves known on the model (F1: E; P1xP1: none).
std::vector<NSClass> negative_curves(const ModelManifold& model);
/// Curves spanning the dual of the nef cone (F1: E and a fibre; P1xP1: rulings).
std::vector<NSClass> test_curves(const ModelManifold& model);

/// Zariski decomposition on surface models (F1, P1xP1, P2). Throws
/// std::invalid_argument if the class is not pseudoeffective.
ZariskiDecomposition zariski(const ModelManifold& model, const NSClass& cls);

/// Volume of a class: P^2 on surfaces, alpha^n for nef classes on products,
/// n! det H |det B| for positive torus classes, 0 outside the big cone.
double volume_class(const ModelManifold& model, const NSClass& cls);

/// Limit of n! h^q(kL)/k^n in closed form, for real classes:
/// products by Kunneth leading terms, F1 through Vol(alpha), Vol(-alpha) and
/// alpha^2, tori by |det| of the curvature at the index degree.
double hhat_closed_form(const ModelManifold& model, const NSClass& cls, int q);

using Q = boost::rational<long long>;

struct ToricEnvelope {
  NSClass cls;
  int dim = 0;
  bool empty = false;
  /// Half-spaces a . m <= k b for the multiple k P_D.
  std::vector<std::vector<long long>> normals;
  std::vector<long long> offsets;
  /// 0 <= m_i <= k box_upper[i] contains P_D.
  std::vector<long long> box_upper;
  /// Vertices for planar polytopes (counter-clockwise); empty for n > 2.
  std::vector<std::pair<Q, Q>> vertices;
  Q euclidean_volume{0};
  Q volume{0};  // n! * euclidean volume

  /// Lattice points of k P_D.
  long long lattice_count(long long k) const;
};

/// Polytope of sections of an integral class on a toric model (products, F1).
/// Negative parts are discarded, so the polytope is that of the moving part.
ToricEnvelope toric_envelope(const ModelManifold& model, const NSClass& cls);

struct OrthogonalityRow {
  double delta = 0;
  double e_dot_beta = 0;   // E . beta
  double beta_sq = 0;      // beta^2
  double deficit_root = 0; // (Vol - beta^2)^{1/2}
  double ratio = 0;        // e_dot_beta / deficit_root
};

struct OrthogonalityReport {
  double exact_e_dot_p = 0;  // N . P for the exact decomposition
  double volume = 0;
  std::vector<OrthogonalityRow> rows;
  double constant = 0;       // max ratio
  double lhs_slope = 0;      // log-log slope of E . beta in delta
  double rhs_slope = 0;      // log-log slope of the deficit root in delta
};

/// Approximates the positive part by beta_delta = P - delta N_red, where N_red is
/// the reduced support of N (so that t[E] + beta_delta stays in the class),
/// and reports both sides of E . beta <= C (Vol - beta^2)^{1/2}.
OrthogonalityReport orthogonality_check(const ModelManifold& model, const NSClass& cls,
                                        const std::vector<double>& deltas);

}  // namespace hqlab
