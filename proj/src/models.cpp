#include "hqlab/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace hqlab {

namespace {

constexpr double kPi = std::numbers::pi;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

std::vector<int> factor_offsets(const std::vector<int>& factors) {
  std::vector<int> off(factors.size(), 0);
  for (std::size_t i = 1; i < factors.size(); ++i) off[i] = off[i - 1] + factors[i - 1];
  return off;
}

// Decodes the mixed-radix chart id of a product into per-factor chart indices.
std::vector<int> product_charts(const std::vector<int>& factors, int chart) {
  std::vector<int> c(factors.size());
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const int radix = factors[i] + 1;
    c[i] = chart % radix;
    chart /= radix;
  }
  return c;
}

Jet squared_norm(int dim, const CVec& z, int offset, int count) {
  Jet s(dim, 0.0);
  for (int j = 0; j < count; ++j) s += Jet::abs_sq(dim, offset + j, z(offset + j));
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Model construction

ModelSpec ModelSpec::proj_product(std::vector<int> factors) {
  ModelSpec s;
  s.kind = ModelKind::ProjProduct;
  s.factors = std::move(factors);
  return s;
}

ModelSpec ModelSpec::flat_torus(Eigen::MatrixXd lattice, double metric_scale) {
  ModelSpec s;
  s.kind = ModelKind::FlatTorus;
  s.lattice = std::move(lattice);
  s.metric_scale = metric_scale;
  return s;
}

ModelSpec ModelSpec::hirzebruch_f1() {
  ModelSpec s;
  s.kind = ModelKind::HirzebruchF1;
  return s;
}

ModelManifold build_model(const ModelSpec& spec) {
  ModelManifold m(spec);
  switch (spec.kind) {
    case ModelKind::ProjProduct: {
      if (spec.factors.empty()) throw std::invalid_argument("product needs at least one factor");
      int n = 0;
      double denom = 1.0;
      for (int d : spec.factors) {
        if (d <= 0) throw std::invalid_argument("factor dimension must be positive");
        n += d;
        denom *= factorial(d);
      }
      m.dim_ = n;
      m.ns_rank_ = static_cast<int>(spec.factors.size());
      m.volume_ = factorial(n) / denom;
      break;
    }
    case ModelKind::FlatTorus: {
      const auto& b = spec.lattice;
      if (b.rows() != b.cols() || b.rows() == 0 || b.rows() % 2 != 0) {
        throw std::invalid_argument("torus lattice must be a 2n x 2n matrix");
      }
      const double det = b.determinant();
      if (!std::isfinite(det) || std::abs(det) < 1e-12) {
        throw std::invalid_argument("torus lattice basis is singular");
      }
      if (!(spec.metric_scale > 0.0)) throw std::invalid_argument("metric scale must be positive");
      const int n = static_cast<int>(b.rows() / 2);
      m.dim_ = n;
      m.ns_rank_ = n * n;
      m.volume_ = factorial(n) * std::abs(det) * std::pow(spec.metric_scale, n);
      break;
    }
    case ModelKind::HirzebruchF1: {
      m.dim_ = 2;
      m.ns_rank_ = 2;
      // omega in class (1 + delta) H - delta E.
      const double d = ModelManifold::kF1Delta;
      m.volume_ = (1 + d) * (1 + d) - d * d;
      break;
    }
  }
  if (m.dim_ > kMaxDim) throw std::invalid_argument("complex dimension exceeds the supported maximum");
  return m;
}

std::string ModelManifold::base_metric_tag() const {
  switch (kind()) {
    case ModelKind::ProjProduct: return "product-fubini-study";
    case ModelKind::FlatTorus: return "flat";
    case ModelKind::HirzebruchF1: return "pullback-fs-plus-ruling";
  }
  return "";
}

std::string ModelManifold::label() const {
  std::ostringstream os;
  switch (kind()) {
    case ModelKind::ProjProduct:
      for (std::size_t i = 0; i < factors().size(); ++i) {
        if (i) os << 'x';
        os << 'P' << factors()[i];
      }
      break;
    case ModelKind::FlatTorus: os << 'T' << dim(); break;
    case ModelKind::HirzebruchF1: os << "F1"; break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Classes

NSClass NSClass::product(std::vector<double> coeffs) {
  NSClass c;
  c.coeffs = std::move(coeffs);
  return c;
}

NSClass NSClass::f1(double a, double b) {
  NSClass c;
  c.coeffs = {a, b};
  return c;
}

NSClass NSClass::torus(Eigen::MatrixXcd hermitian) {
  NSClass c;
  c.hermitian = std::move(hermitian);
  return c;
}

NSClass NSClass::scaled(double s) const {
  NSClass c = *this;
  for (double& x : c.coeffs) x *= s;
  c.hermitian *= s;
  return c;
}

NSClass NSClass::plus(const NSClass& other) const {
  NSClass c = *this;
  if (c.coeffs.size() != other.coeffs.size() || c.hermitian.rows() != other.hermitian.rows()) {
    throw std::invalid_argument("adding classes of different shapes");
  }
  for (std::size_t i = 0; i < c.coeffs.size(); ++i) c.coeffs[i] += other.coeffs[i];
  if (c.hermitian.size() > 0) c.hermitian += other.hermitian;
  return c;
}

bool NSClass::is_zero() const {
  for (double x : coeffs)
    if (x != 0.0) return false;
  return hermitian.size() == 0 || hermitian.isZero(0.0);
}

std::string NSClass::label() const {
  std::ostringstream os;
  os.precision(12);
  if (hermitian.size() > 0) {
    os << "H[";
    for (Eigen::Index i = 0; i < hermitian.rows(); ++i) {
      if (i) os << ';';
      for (Eigen::Index j = 0; j < hermitian.cols(); ++j) {
        if (j) os << ',';
        os << hermitian(i, j).real();
        if (hermitian(i, j).imag() != 0.0) os << (hermitian(i, j).imag() > 0 ? "+" : "") << hermitian(i, j).imag() << 'i';
      }
    }
    os << ']';
    return os.str();
  }
  os << '(';
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (i) os << ',';
    os << coeffs[i];
  }
  os << ')';
  return os.str();
}

void check_class(const ModelManifold& model, const NSClass& cls) {
  switch (model.kind()) {
    case ModelKind::ProjProduct:
      if (cls.coeffs.size() != model.factors().size() || cls.hermitian.size() != 0) {
        throw std::invalid_argument("class does not match the product model");
      }
      break;
    case ModelKind::HirzebruchF1:
      if (cls.coeffs.size() != 2 || cls.hermitian.size() != 0) {
        throw std::invalid_argument("class does not match the F1 model");
      }
      break;
    case ModelKind::FlatTorus:
      if (!cls.coeffs.empty() || cls.hermitian.rows() != model.dim() ||
          cls.hermitian.cols() != model.dim()) {
        throw std::invalid_argument("class does not match the torus model");
      }
      if (!cls.hermitian.isApprox(cls.hermitian.adjoint(), 1e-12) &&
          !(cls.hermitian - cls.hermitian.adjoint()).isZero(1e-12)) {
        throw std::invalid_argument("torus class matrix is not hermitian");
      }
      break;
  }
  for (double x : cls.coeffs)
    if (!std::isfinite(x)) throw std::invalid_argument("class coefficient is not finite");
}

bool is_integral(const ModelManifold& model, const NSClass& cls, double tol) {
  check_class(model, cls);
  if (model.kind() == ModelKind::FlatTorus) {
    const Eigen::MatrixXd a = torus_pairing(model, cls.hermitian);
    return (a.array() - a.array().round()).abs().maxCoeff() <= tol;
  }
  return std::all_of(cls.coeffs.begin(), cls.coeffs.end(),
                     [tol](double x) { return std::abs(x - std::round(x)) <= tol; });
}

double intersection_power(const ModelManifold& model, const NSClass& cls) {
  check_class(model, cls);
  switch (model.kind()) {
    case ModelKind::ProjProduct: {
      // (sum a_i H_i)^n = n! / prod n_i! * prod a_i^{n_i}.
      double v = factorial(model.dim());
      for (std::size_t i = 0; i < cls.coeffs.size(); ++i) {
        const int d = model.factors()[i];
        v *= std::pow(cls.coeffs[i], d) / factorial(d);
      }
      return v;
    }
    case ModelKind::HirzebruchF1: {
      const double a = cls.coeffs[0], b = cls.coeffs[1];
      return a * a - b * b;
    }
    case ModelKind::FlatTorus: {
      const Eigen::MatrixXcd h = cls.hermitian;
      const double deth = h.determinant().real();
      return factorial(model.dim()) * deth * std::abs(model.lattice().determinant());
    }
  }
  return 0.0;
}

double intersection(const ModelManifold& model, const NSClass& a, const NSClass& b) {
  check_class(model, a);
  check_class(model, b);
  if (model.dim() != 2 || model.kind() == ModelKind::FlatTorus) {
    throw std::invalid_argument("intersection pairing is only provided on surface models");
  }
  if (model.kind() == ModelKind::HirzebruchF1) {
    return a.coeffs[0] * b.coeffs[0] - a.coeffs[1] * b.coeffs[1];
  }
  if (model.factors().size() == 1) return a.coeffs[0] * b.coeffs[0];  // P^2
  return a.coeffs[0] * b.coeffs[1] + a.coeffs[1] * b.coeffs[0];       // P1 x P1
}

Eigen::MatrixXd torus_form_matrix(const Eigen::MatrixXcd& h) {
  const Eigen::Index n = h.rows();
  const Eigen::MatrixXd r = h.real();
  const Eigen::MatrixXd s = h.imag();
  Eigen::MatrixXd om(2 * n, 2 * n);
  om << s, r, -r, s;
  return om;
}

Eigen::MatrixXcd torus_hermitian_part(const Eigen::MatrixXd& om) {
  const Eigen::Index n = om.rows() / 2;
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  j.block(0, n, n, n) = -Eigen::MatrixXd::Identity(n, n);
  j.block(n, 0, n, n) = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd p11 = 0.5 * (om + j.transpose() * om * j);
  Eigen::MatrixXcd h(n, n);
  h.real() = p11.block(0, n, n, n);
  h.imag() = p11.block(0, 0, n, n);
  return h;
}

Eigen::MatrixXd torus_pairing(const ModelManifold& model, const Eigen::MatrixXcd& h) {
  const Eigen::MatrixXd& b = model.lattice();
  return b.transpose() * torus_form_matrix(h) * b;
}

// ---------------------------------------------------------------------------
// Analytic geometry

namespace f1 {

namespace {
struct ChartJets {
  Jet s2;  // |s|^2
  Jet v2;  // |v|^2
};

ChartJets chart_jets(const CVec& z) {
  return {Jet::abs_sq(2, kNormalCoord, z(kNormalCoord)), Jet::abs_sq(2, kTangentCoord, z(kTangentCoord))};
}
}  // namespace

CMat pullback_fs(int /*chart*/, const CVec& z) {
  const auto [s2, v2] = chart_jets(z);
  // |w|^2 = |s|^2 (1 + |v|^2) in either blow-up chart.
  return log(1.0 + s2 * (1.0 + v2)).levi() / kPi;
}

CMat pullback_ruling(int /*chart*/, const CVec& z) {
  const auto [s2, v2] = chart_jets(z);
  return log(1.0 + v2).levi() / kPi;
}

Jet sigma_norm_sq(int /*chart*/, const CVec& z) {
  const auto [s2, v2] = chart_jets(z);
  const Jet rho = s2 * (1.0 + v2);
  return rho / (1.0 + rho);
}

CMat theta_e(int chart, const CVec& z) { return pullback_fs(chart, z) - pullback_ruling(chart, z); }

}  // namespace f1

CMat metric_matrix(const ModelManifold& model, int chart, const CVec& z) {
  const int n = model.dim();
  switch (model.kind()) {
    case ModelKind::ProjProduct: {
      CMat g = CMat::Zero(n, n);
      const auto off = factor_offsets(model.factors());
      for (std::size_t i = 0; i < model.factors().size(); ++i) {
        const int d = model.factors()[i];
        g += log(1.0 + squared_norm(n, z, off[i], d)).levi() / kPi;
      }
      (void)chart;
      return g;
    }
    case ModelKind::FlatTorus:
      return CMat::Identity(n, n) * model.metric_scale();
    case ModelKind::HirzebruchF1:
      return f1::pullback_fs(chart, z) + ModelManifold::kF1Delta * f1::pullback_ruling(chart, z);
  }
  return {};
}

CMat reference_matrix(const ModelManifold& model, const NSClass& cls, const GridNode& node) {
  check_class(model, cls);
  const int n = model.dim();
  switch (model.kind()) {
    case ModelKind::ProjProduct: {
      CMat u = CMat::Zero(n, n);
      const auto off = factor_offsets(model.factors());
      for (std::size_t i = 0; i < model.factors().size(); ++i) {
        const int d = model.factors()[i];
        u += cls.coeffs[i] * (log(1.0 + squared_norm(n, node.z, off[i], d)).levi() / kPi);
      }
      return u;
    }
    case ModelKind::FlatTorus:
      return CMat(cls.hermitian);
    case ModelKind::HirzebruchF1: {
      // aH - bE = a mu^* omega_FS + c Theta_{E,h} with c = -b.
      const double a = cls.coeffs[0], c = -cls.coeffs[1];
      return a * f1::pullback_fs(node.chart, node.z) + c * f1::theta_e(node.chart, node.z);
    }
  }
  return {};
}

std::vector<Jet> invariant_coordinates(const ModelManifold& model, const GridNode& node) {
  const int n = model.dim();
  std::vector<Jet> out;
  switch (model.kind()) {
    case ModelKind::ProjProduct: {
      const auto off = factor_offsets(model.factors());
      const auto charts = product_charts(model.factors(), node.chart);
      for (std::size_t i = 0; i < model.factors().size(); ++i) {
        const int d = model.factors()[i];
        const Jet inv_norm = inverse(1.0 + squared_norm(n, node.z, off[i], d));
        // Homogeneous labels l = 1..d; label c (the chart) has Z_c = 1.
        for (int l = 1; l <= d; ++l) {
          if (l == charts[i]) {
            out.push_back(inv_norm);
          } else {
            const int pos = l < charts[i] ? l : l - 1;
            out.push_back(Jet::abs_sq(n, off[i] + pos, node.z(off[i] + pos)) * inv_norm);
          }
        }
      }
      break;
    }
    case ModelKind::HirzebruchF1: {
      const double delta = ModelManifold::kF1Delta;
      const Jet s2 = Jet::abs_sq(2, f1::kNormalCoord, node.z(f1::kNormalCoord));
      const Jet v2 = Jet::abs_sq(2, f1::kTangentCoord, node.z(f1::kTangentCoord));
      const Jet inv_rho1 = inverse(1.0 + s2 * (1.0 + v2));
      const Jet inv_q = inverse(1.0 + v2);
      const Jet ma = s2 * inv_rho1 + delta * inv_q;           // along the chart's s-axis
      const Jet mb = s2 * v2 * inv_rho1 + delta * (v2 * inv_q);
      if (node.chart == 0) {
        out = {ma, mb};
      } else {
        out = {mb, ma};
      }
      break;
    }
    case ModelKind::FlatTorus: {
      const Eigen::MatrixXd binv = model.lattice().inverse();
      std::vector<Jet> x;
      for (int j = 0; j < n; ++j) x.push_back(Jet::real_part(n, j, node.z(j).real()));
      for (int j = 0; j < n; ++j) x.push_back(Jet::imag_part(n, j, node.z(j).imag()));
      for (int a = 0; a < 2 * n; ++a) {
        Jet s(n, 0.0);
        for (int b = 0; b < 2 * n; ++b) s += binv(a, b) * x[b];
        out.push_back(s);
      }
      break;
    }
  }
  return out;
}

std::vector<Jet> angular_coordinates(const ModelManifold& model, const GridNode& node) {
  std::vector<Jet> out;
  if (model.kind() != ModelKind::ProjProduct) return out;
  const int n = model.dim();
  const auto off = factor_offsets(model.factors());
  const auto charts = product_charts(model.factors(), node.chart);
  for (std::size_t i = 0; i < model.factors().size(); ++i) {
    const int d = model.factors()[i];
    const Jet inv_norm = inverse(1.0 + squared_norm(n, node.z, off[i], d));
    auto re_im = [&](int l) -> std::pair<Jet, Jet> {
      if (l == charts[i]) return {Jet(n, 1.0), Jet(n, 0.0)};
      const int pos = off[i] + (l < charts[i] ? l : l - 1);
      return {Jet::real_part(n, pos, node.z(pos).real()), Jet::imag_part(n, pos, node.z(pos).imag())};
    };
    for (int j = 0; j <= d; ++j) {
      for (int k = j + 1; k <= d; ++k) {
        const auto [xj, yj] = re_im(j);
        const auto [xk, yk] = re_im(k);
        out.push_back((xj * xk + yj * yk) * inv_norm);
        out.push_back((yj * xk - xj * yk) * inv_norm);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grids

double QuadratureGrid::total_weight() const {
  std::vector<double> w(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) w[i] = nodes[i].weight;
  return pairwise_sum(w);
}

double integrate(const QuadratureGrid& grid, const std::function<double(const GridNode&)>& f) {
  std::vector<double> terms(grid.nodes.size());
  parallel_for(grid.nodes.size(), [&](std::size_t i) {
    terms[i] = f(grid.nodes[i]) * grid.nodes[i].weight;
  });
  return pairwise_sum(terms);
}

namespace {

struct FactorNode {
  int chart;
  std::vector<cd> w;  // affine coordinates in the chart
  double mass;        // fraction of int_{P^d} omega^d / d! ... normalized below
};

// Midpoint nodes of one P^d factor in action-angle coordinates. Masses are the
// exact Lebesgue measure of the collapsed-coordinate cell on the simplex times
// the angular fraction; they sum to 1/d!.
std::vector<FactorNode> projective_factor_nodes(int d, int res, int ang) {
  std::vector<FactorNode> out;
  std::vector<int> ucell(d, 0), acell(d, 0);
  const double h = 1.0 / res;
  auto advance = [](std::vector<int>& idx, int base) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (++idx[i] < base) return true;
      idx[i] = 0;
    }
    return false;
  };
  do {
    // Collapsed coordinates u in [0,1]^d -> simplex point t_1..t_d.
    std::vector<double> t(d + 1, 0.0);
    double remaining = 1.0;
    double mass = 1.0;
    for (int i = 0; i < d; ++i) {
      const double lo = ucell[i] * h, hi = lo + h;
      const double um = 0.5 * (lo + hi);
      t[i + 1] = remaining * um;
      remaining *= (1.0 - um);
      const int p = d - 1 - i;  // Jacobian exponent of (1 - u_i)
      mass *= (std::pow(1.0 - lo, p + 1) - std::pow(1.0 - hi, p + 1)) / (p + 1);
    }
    t[0] = remaining;
    int c = 0;
    for (int l = 1; l <= d; ++l)
      if (t[l] > t[c]) c = l;
    std::fill(acell.begin(), acell.end(), 0);
    do {
      std::vector<double> theta(d + 1, 0.0);
      for (int i = 0; i < d; ++i) theta[i + 1] = 2.0 * kPi * (acell[i] + 0.5) / ang;
      FactorNode node;
      node.chart = c;
      for (int l = 0; l <= d; ++l) {
        if (l == c) continue;
        node.w.push_back(std::polar(std::sqrt(t[l] / t[c]), theta[l] - theta[c]));
      }
      node.mass = mass / std::pow(static_cast<double>(ang), d);
      out.push_back(std::move(node));
    } while (advance(acell, ang));
  } while (advance(ucell, res));
  return out;
}

QuadratureGrid product_grid(const ModelManifold& model, const GridOptions& opt) {
  QuadratureGrid grid;
  grid.options = opt;
  const auto& factors = model.factors();
  std::vector<std::vector<FactorNode>> per;
  for (int d : factors) per.push_back(projective_factor_nodes(d, opt.resolution, opt.angular));
  const double nfact = [&] {
    double f = 1.0;
    for (int i = 2; i <= model.dim(); ++i) f *= i;
    return f;
  }();
  std::vector<std::size_t> idx(factors.size(), 0);
  const int n = model.dim();
  while (true) {
    GridNode node;
    node.z = CVec(n);
    int chart = 0, radix = 1, pos = 0;
    double w = nfact;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      const FactorNode& fnode = per[i][idx[i]];
      chart += fnode.chart * radix;
      radix *= factors[i] + 1;
      for (cd c : fnode.w) node.z(pos++) = c;
      w *= fnode.mass;
    }
    node.chart = chart;
    node.weight = w;
    node.metric = metric_matrix(model, chart, node.z);
    grid.nodes.push_back(std::move(node));
    std::size_t k = 0;
    for (; k < factors.size(); ++k) {
      if (++idx[k] < per[k].size()) break;
      idx[k] = 0;
    }
    if (k == factors.size()) break;
  }
  return grid;
}

GridNode f1_node(double r, double xi, double th1, double th2) {
  GridNode node;
  node.z = CVec(2);
  const double rho = r / (1.0 - r);
  if (xi >= 0.5) {
    node.chart = 0;
    node.z(f1::kNormalCoord) = std::polar(std::sqrt(rho * xi), th1);
    node.z(f1::kTangentCoord) = std::polar(std::sqrt((1.0 - xi) / xi), th2 - th1);
  } else {
    node.chart = 1;
    node.z(f1::kNormalCoord) = std::polar(std::sqrt(rho * (1.0 - xi)), th2);
    node.z(f1::kTangentCoord) = std::polar(std::sqrt(xi / (1.0 - xi)), th1 - th2);
  }
  node.sigma_sq = r;
  return node;
}

// Radial cells of the F1 moment trapezoid in r = |sigma_E|^2 in [0, 1].
std::vector<std::pair<double, double>> f1_radial_cells(const GridOptions& opt) {
  std::vector<std::pair<double, double>> cells;
  const double h = 1.0 / opt.resolution;
  if (opt.exceptional_levels > 0) {
    const int sub = std::max(1, opt.exceptional_subcells);
    auto split = [&](double lo, double hi) {
      for (int s = 0; s < sub; ++s) {
        cells.emplace_back(lo + (hi - lo) * s / sub, lo + (hi - lo) * (s + 1) / sub);
      }
    };
    double hi = h;
    std::vector<std::pair<double, double>> rev;
    for (int j = 0; j < opt.exceptional_levels; ++j) {
      rev.emplace_back(0.5 * hi, hi);
      hi *= 0.5;
    }
    split(0.0, hi);
    for (auto it = rev.rbegin(); it != rev.rend(); ++it) split(it->first, it->second);
  } else {
    cells.emplace_back(0.0, h);
  }
  for (int i = 1; i < opt.resolution; ++i) cells.emplace_back(i * h, (i + 1) * h);
  return cells;
}

QuadratureGrid f1_grid(const ModelManifold& model, const GridOptions& opt) {
  QuadratureGrid grid;
  grid.options = opt;
  const double delta = ModelManifold::kF1Delta;
  const auto rcells = f1_radial_cells(opt);
  const int res = opt.resolution, ang = opt.angular;
  const double afrac = 1.0 / (static_cast<double>(ang) * ang);
  for (const auto& [r0, r1] : rcells) {
    // Area element of the trapezoid is (delta + r) dr dxi.
    const double rmass = delta * (r1 - r0) + 0.5 * (r1 * r1 - r0 * r0);
    const double rm = 0.5 * (r0 + r1);
    for (int i = 0; i < res; ++i) {
      const double xi = (i + 0.5) / res;
      for (int a1 = 0; a1 < ang; ++a1) {
        for (int a2 = 0; a2 < ang; ++a2) {
          GridNode node = f1_node(rm, xi, 2 * kPi * (a1 + 0.5) / ang, 2 * kPi * (a2 + 0.5) / ang);
          node.weight = 2.0 * rmass / res * afrac;
          node.metric = metric_matrix(model, node.chart, node.z);
          grid.nodes.push_back(std::move(node));
        }
      }
    }
  }
  return grid;
}

QuadratureGrid torus_grid(const ModelManifold& model, const GridOptions& opt) {
  QuadratureGrid grid;
  grid.options = opt;
  const int n = model.dim();
  const int m = 2 * n;
  const int res = opt.resolution;
  std::size_t total = 1;
  for (int i = 0; i < m; ++i) total *= static_cast<std::size_t>(res);
  const double w = model.volume() / static_cast<double>(total);
  const CMat metric = metric_matrix(model, 0, CVec::Zero(n));
  grid.nodes.resize(total);
  Eigen::VectorXd s(m);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (int a = 0; a < m; ++a) {
      s(a) = (static_cast<double>(rem % res) + 0.5) / res;
      rem /= res;
    }
    const Eigen::VectorXd x = model.lattice() * s;
    GridNode& node = grid.nodes[idx];
    node.chart = 0;
    node.z = CVec(n);
    for (int j = 0; j < n; ++j) node.z(j) = cd(x(j), x(n + j));
    node.weight = w;
    node.metric = metric;
  }
  return grid;
}

}  // namespace

QuadratureGrid build_grid(const ModelManifold& model, const GridOptions& options) {
  if (options.resolution < 4) throw std::invalid_argument("grid resolution must be at least 4");
  if (options.angular < 1) throw std::invalid_argument("angular resolution must be positive");
  switch (model.kind()) {
    case ModelKind::ProjProduct: return product_grid(model, options);
    case ModelKind::HirzebruchF1: return f1_grid(model, options);
    case ModelKind::FlatTorus: return torus_grid(model, options);
  }
  return {};
}

QuadratureGrid build_grid(const ModelManifold& model, int resolution) {
  GridOptions opt;
  opt.resolution = resolution;
  return build_grid(model, opt);
}

QuadratureGrid exceptional_curve_grid(const ModelManifold& model, int resolution) {
  if (model.kind() != ModelKind::HirzebruchF1) {
    throw std::invalid_argument("exceptional curve grid needs the F1 model");
  }
  if (resolution < 4) throw std::invalid_argument("grid resolution must be at least 4");
  QuadratureGrid grid;
  grid.options.resolution = resolution;
  for (int i = 0; i < resolution; ++i) {
    GridNode node = f1_node(0.0, (i + 0.5) / resolution, 0.0, 0.0);
    node.weight = ModelManifold::kF1Delta / resolution;
    node.metric = metric_matrix(model, node.chart, node.z);
    grid.nodes.push_back(std::move(node));
  }
  return grid;
}

}  // namespace hqlab
