#pragma once

#include "hqlab/jet.hpp"
#include "hqlab/linalg.hpp"

#include <string>
#include <vector>

namespace hqlab {

enum class ModelKind { ProjProduct, FlatTorus, HirzebruchF1 };

/// Descriptor of one of the three model families.
struct ModelSpec {
  ModelKind kind = ModelKind::ProjProduct;
  std::vector<int> factors;  // ProjProduct: dimensions n_i of the P^{n_i}
  Eigen::MatrixXd lattice;   // FlatTorus: 2n x 2n, columns are lattice vectors
                             // in real coordinates (x_1..x_n, y_1..y_n)
  double metric_scale = 1.0; // FlatTorus: omega = s * sum dx_j ^ dy_j

  static ModelSpec proj_product(std::vector<int> factors);
  static ModelSpec flat_torus(Eigen::MatrixXd lattice, double metric_scale = 1.0);
  static ModelSpec hirzebruch_f1();
};

/// A compact complex manifold from one of the model families, together with
/// its fixed hermitian metric omega. Immutable after construction.
///
/// Volumes are computed against omega^n (not omega^n / n!), so that for every
/// smooth closed (1,1)-form u the top power integrates as
/// int_X u^n = sum over nodes of det_omega(u) * weight.
class ModelManifold {
 public:
  ModelKind kind() const { return spec_.kind; }
  const ModelSpec& spec() const { return spec_; }
  int dim() const { return dim_; }
  int ns_rank() const { return ns_rank_; }
  /// Closed-form int_X omega^n.
  double volume() const { return volume_; }
  std::string base_metric_tag() const;
  /// Short label such as "P1xP1", "T2", "F1".
  std::string label() const;

  const std::vector<int>& factors() const { return spec_.factors; }
  const Eigen::MatrixXd& lattice() const { return spec_.lattice; }
  double metric_scale() const { return spec_.metric_scale; }

  /// Weight of the ruling-pullback correction in the F1 metric
  /// omega = mu^* omega_FS + delta * pi^* omega_P1.
  static constexpr double kF1Delta = 0.25;

 private:
  friend ModelManifold build_model(const ModelSpec& spec);
  explicit ModelManifold(ModelSpec spec) : spec_(std::move(spec)) {}

  ModelSpec spec_;
  int dim_ = 0;
  int ns_rank_ = 0;
  double volume_ = 0.0;
};

/// Validates the descriptor and fixes n, ns_rank and the closed-form volume.
/// Throws std::invalid_argument for factor dimensions <= 0, singular or
/// misshaped lattices, or complex dimension above kMaxDim.
ModelManifold build_model(const ModelSpec& spec);

/// A (1,1)-class in the model's Neron-Severi coordinates.
///
/// ProjProduct: coefficients a_i of the hyperplane pullbacks H_i.
/// HirzebruchF1: (a, b) standing for aH - bE.
/// FlatTorus: a constant hermitian matrix H (u = (i/2) sum H_jk dz_j ^ dzbar_k).
struct NSClass {
  std::vector<double> coeffs;
  Eigen::MatrixXcd hermitian;

  static NSClass product(std::vector<double> coeffs);
  static NSClass f1(double a, double b);
  static NSClass torus(Eigen::MatrixXcd hermitian);

  NSClass scaled(double s) const;
  NSClass plus(const NSClass& other) const;
  bool is_zero() const;
  std::string label() const;
};

/// Throws std::invalid_argument if the class does not belong to the model.
void check_class(const ModelManifold& model, const NSClass& cls);

/// Integral classes: integer coefficients, or (tori) an integral lattice
/// pairing of Im H.
bool is_integral(const ModelManifold& model, const NSClass& cls, double tol = 1e-9);

/// Exact top self-intersection alpha^n = int_X u^n.
double intersection_power(const ModelManifold& model, const NSClass& cls);

/// Intersection pairing on surface models (n = 2, not tori).
double intersection(const ModelManifold& model, const NSClass& a, const NSClass& b);

/// Real 2n x 2n alternating matrix of the constant 2-form of a hermitian
/// matrix H in coordinates (x_1..x_n, y_1..y_n): u(v, w) = Im(v^* H w).
Eigen::MatrixXd torus_form_matrix(const Eigen::MatrixXcd& hermitian);
/// Hermitian matrix of the (1,1) part of a real alternating 2-form matrix.
Eigen::MatrixXcd torus_hermitian_part(const Eigen::MatrixXd& form);
/// Lattice pairing B^T Omega B of a hermitian class.
Eigen::MatrixXd torus_pairing(const ModelManifold& model, const Eigen::MatrixXcd& hermitian);

// ---------------------------------------------------------------------------
// Quadrature

struct GridNode {
  int chart = 0;
  CVec z;            // local complex coordinates in `chart`
  double weight = 0; // omega^n mass of the cell
  CMat metric;       // hermitian matrix of omega in chart coordinates
  double sigma_sq = 0; // F1 only: |sigma_E|_h^2 at the node
};

struct GridOptions {
  int resolution = 64;
  /// Angular nodes per torus-action angle (products, F1). 1 is exact for
  /// torus-invariant integrands.
  int angular = 1;
  /// F1 only: dyadic refinement levels of the first radial cell toward E.
  int exceptional_levels = 0;
  /// F1 only: uniform subcells per dyadic level.
  int exceptional_subcells = 4;
};

struct QuadratureGrid {
  GridOptions options;
  std::vector<GridNode> nodes;

  int resolution() const { return options.resolution; }
  double total_weight() const;
};

/// Midpoint/tensor rule in toric (action-angle) coordinates for products and
/// F1, uniform midpoint rule on the lattice fundamental domain for tori.
/// Throws std::invalid_argument for resolution < 4.
QuadratureGrid build_grid(const ModelManifold& model, const GridOptions& options);
QuadratureGrid build_grid(const ModelManifold& model, int resolution);

/// Nodes on the exceptional curve of F1 (sigma_sq = 0), weighted by the
/// omega|_E length element; weights sum to vol_omega(E) = delta.
QuadratureGrid exceptional_curve_grid(const ModelManifold& model, int resolution);

/// Quadrature of a scalar function against omega^n, pairwise summed.
double integrate(const QuadratureGrid& grid, const std::function<double(const GridNode&)>& f);

// ---------------------------------------------------------------------------
// Analytic geometry at nodes

/// Hermitian matrix of omega at chart coordinates z.
CMat metric_matrix(const ModelManifold& model, int chart, const CVec& z);

/// Matrix of the canonical smooth representative u_0 of the class.
CMat reference_matrix(const ModelManifold& model, const NSClass& cls, const GridNode& node);

/// Globally smooth real functions used to build potentials: per-factor moment
/// coordinates |Z_l|^2/|Z|^2 (products), the moment map of omega (F1), or
/// lattice coordinates s = B^{-1} x (tori).
std::vector<Jet> invariant_coordinates(const ModelManifold& model, const GridNode& node);

/// Products only: Re and Im of Z_j conj(Z_k) / |Z|^2 for j < k in each factor.
std::vector<Jet> angular_coordinates(const ModelManifold& model, const GridNode& node);

namespace f1 {
/// Matrix of mu^* omega_FS.
CMat pullback_fs(int chart, const CVec& z);
/// Matrix of pi^* omega_P1 (pullback along the ruling).
CMat pullback_ruling(int chart, const CVec& z);
/// Jet of |sigma_E|_h^2 for the product-of-Fubini-Study metric h on O(E).
Jet sigma_norm_sq(int chart, const CVec& z);
/// Matrix of the Chern curvature Theta_{E,h} = mu^* omega_FS - pi^* omega_P1.
CMat theta_e(int chart, const CVec& z);
/// Index of the chart coordinate tangent to E (the other one cuts out E).
inline constexpr int kNormalCoord = 0;
inline constexpr int kTangentCoord = 1;
}  // namespace f1

}  // namespace hqlab
