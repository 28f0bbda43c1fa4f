#pragma once

#include "hqlab/models.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <map>
#include <utility>
#include <vector>

namespace hqlab {

using Rational = boost::multiprecision::cpp_rational;

/// h^q(P^n, O(d)) by Bott's formula.
long long hq_projspace(int n, long long d, int q);

/// h^q of O(d_1, ..., d_m) on a product of projective spaces (Kunneth).
long long hq_product(const std::vector<int>& factors, const std::vector<long long>& degrees, int q);

/// h^q of the line bundle with constant curvature H on C^n / lattice. The
/// imaginary part must pair integrally on the lattice. Throws for degenerate H
/// or a non-integral pairing.
long long hq_torus_constant(const Eigen::MatrixXcd& hermitian, const Eigen::MatrixXd& lattice, int q);

/// Number of lattice points m in Z^2 with a_i m_1 + b_i m_2 <= c_i for all
/// rows (a_i, b_i, c_i). The polygon must be bounded.
long long count_lattice_points_2d(const std::vector<std::array<long long, 3>>& halfplanes);

/// Fan of F1 used by the oracles: rays (1,0), (1,1), (0,1), (-1,-1); the ray
/// (1,1) is the exceptional curve E and (-1,-1) is a line H.
/// Half-planes of the section polygon of aH - bE.
std::vector<std::array<long long, 3>> f1_section_polygon(long long a, long long b);

/// h^q(F1, O(aH - bE)) from lattice counts, Serre duality and Riemann-Roch.
/// Throws std::logic_error if the derived h^1 is negative.
long long hq_f1(long long a, long long b, int q);

/// Dispatch on the model for an integral class.
long long hq(const ModelManifold& model, const NSClass& cls, int q);

long long euler_char(const ModelManifold& model, const NSClass& cls, long long k);

struct CohomologyTable {
  ModelManifold model;
  NSClass cls;
  int kmax = 0;
  std::map<std::pair<int, int>, long long> entries;  // (q, k) -> h^q(kL), k = 1..kmax

  long long at(int q, int k) const { return entries.at({q, k}); }
  long long euler(int k) const;
};

/// Table of h^q(kL) for q = 0..n and k = 1..kmax.
CohomologyTable cohomology_table(const ModelManifold& model, const NSClass& cls, int kmax);

/// Exact Hilbert polynomial sum_j coeffs[j] k^j of degree n.
struct HilbertPolynomial {
  std::vector<Rational> coeffs;
  Rational operator()(long long k) const;
  const Rational& leading() const { return coeffs.back(); }
};

/// Interpolates chi(kL) through k = 1..n+1 and verifies the result at every
/// k <= kmax. Throws std::invalid_argument if kmax < n + 1 and
/// std::runtime_error if some value misses the polynomial.
HilbertPolynomial hilbert_fit(const CohomologyTable& table);

}  // namespace hqlab
