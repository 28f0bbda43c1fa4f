#pragma once

#include "hqlab/models.hpp"

#include <span>
#include <string>
#include <vector>

namespace hqlab {

struct BasisOptions {
  /// Maximal polynomial (products, F1) or trigonometric (tori) degree.
  int degree = 2;
  /// Products: add Re/Im of Z_j conj(Z_k) / |Z|^2 per factor. These are not
  /// torus invariant, so use them with an angular grid.
  bool angular = false;
  /// F1: add log(|sigma_E|^2 + eps^2) for each listed eps.
  std::vector<double> log_eps;
};

/// Finite family of globally smooth real potentials phi_j with exact complex
/// Hessians. A coefficient vector c stands for u = u_0 + i ddbar(sum c_j phi_j).
///
/// Products: monomials of degree 1..m in the per-factor moment coordinates.
/// F1: monomials of degree 1..m in the two moment coordinates of omega.
/// Tori: cos and sin of 2 pi <kappa, s> for lattice frequencies with
/// 1 <= |kappa|_inf <= m, one representative of each pair +-kappa.
class PotentialBasis {
 public:
  PotentialBasis(const ModelManifold& model, BasisOptions options);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const BasisOptions& options() const { return options_; }

  /// Jets of all basis functions at a node.
  std::vector<Jet> evaluate(const GridNode& node) const;

 private:
  ModelManifold model_;
  BasisOptions options_;
  std::vector<std::string> names_;
  std::vector<std::vector<int>> exponents_;  // monomials or frequencies
  std::vector<int> trig_kind_;               // tori: 0 cos, 1 sin
};

/// Matrices of i ddbar phi_j at every node of a grid, stored node-major.
struct BasisTable {
  int dim = 0;
  std::size_t size = 0;
  std::vector<CMat> hessians;  // hessians[node * size + j]

  const CMat& at(std::size_t node, std::size_t j) const { return hessians[node * size + j]; }
};

BasisTable tabulate(const PotentialBasis& basis, const QuadratureGrid& grid);

/// Matrix of i ddbar phi in the (i/2) convention used for all forms.
inline CMat ddbar_matrix(const Jet& phi) { return 2.0 * phi.levi(); }

}  // namespace hqlab
