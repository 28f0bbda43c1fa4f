#pragma once

#include "hqlab/models.hpp"
#include "hqlab/potentials.hpp"

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

namespace hqlab {

inline constexpr double kDefaultDegeneracy = 1e-8;

/// A smooth closed (1,1)-form sampled on a grid: one hermitian matrix per node,
/// in the node's chart coordinates. Holds a non-owning pointer to the grid,
/// which must outlive the field.
struct HermitianFormField {
  ModelManifold model;
  const QuadratureGrid* grid = nullptr;
  NSClass cls;
  std::vector<double> potential;  // empty for reference forms
  std::vector<CMat> matrices;

  std::size_t size() const { return matrices.size(); }
};

HermitianFormField reference_form(const ModelManifold& model, const QuadratureGrid& grid,
                                  const NSClass& cls);

/// u = u_0 + i ddbar(sum c_j phi_j) using precomputed basis Hessians.
/// Throws std::invalid_argument on a coefficient count mismatch.
HermitianFormField hessian_form(const HermitianFormField& reference, const BasisTable& table,
                                std::span<const double> coeffs);
HermitianFormField hessian_form(const ModelManifold& model, const QuadratureGrid& grid,
                                const NSClass& cls, const PotentialBasis& basis,
                                std::span<const double> coeffs);

struct NodeSignature {
  int positive = 0;
  int negative = 0;
  int zero = 0;
  double density = 0;  // det(omega^{-1} u)
  RVec eigenvalues;    // relative to omega, ascending
};

struct SignatureProfile {
  double tau0 = kDefaultDegeneracy;
  std::vector<NodeSignature> nodes;
  /// Total weight of nodes with a zero eigenvalue.
  double degenerate_weight = 0;
};

/// Eigenvalues of u relative to omega at each node. An eigenvalue counts as
/// zero when |lambda| <= tau0 * max_j |lambda_j|. Throws std::domain_error if
/// omega fails to be positive definite somewhere.
SignatureProfile signature_profile(const HermitianFormField& u, double tau0 = kDefaultDegeneracy);

struct MorseValue {
  double value = 0;              // int_{X(u,q)} (-1)^q u^n
  double degenerate_weight = 0;  // weight excluded as degenerate
  double region_weight = 0;      // omega-volume of X(u,q)
};

MorseValue morse_integral(const HermitianFormField& u, int q, double tau0 = kDefaultDegeneracy);
MorseValue morse_integral(const SignatureProfile& profile, const QuadratureGrid& grid, int q);

/// Morse integrals for q = 0..n from one profile.
std::vector<MorseValue> morse_integrals(const SignatureProfile& profile, const QuadratureGrid& grid);

/// Variant with the sharp signature indicator replaced by a piecewise linear
/// ramp of relative width `width` in each eigenvalue. Tends to the sharp value
/// as width -> 0.
double morse_integral_soft(const HermitianFormField& u, int q, double width);

/// int_X u^n by quadrature.
double chern_number(const HermitianFormField& u);

/// int_X u ^ v on surfaces, by polarization of the determinant.
double mixed_chern_number(const HermitianFormField& u, const HermitianFormField& v);

/// Columnar text dump: node, chart, Re/Im of coordinates, weight, eigenvalues,
/// signature counts, density.
void dump_field(std::ostream& out, const HermitianFormField& u, const SignatureProfile& profile);

}  // namespace hqlab
