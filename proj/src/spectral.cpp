#include "hqlab/spectral.hpp"

#include "hqlab/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <limits>
#include <stdexcept>
#include <string>

namespace hqlab {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

void require_torus(const ModelManifold& m) {
  if (m.kind() != ModelKind::FlatTorus) throw std::invalid_argument("spectral data lives on flat tori");
}

template <class Mat>
double form_norm(const Mat& x) {
  double s = 0;
  for (Eigen::Index a = 0; a < x.rows(); ++a)
    for (Eigen::Index b = a + 1; b < x.cols(); ++b) s += std::norm(x(a, b));
  return std::sqrt(s);
}

void require_alternating(const Eigen::MatrixXd& a, Eigen::Index size) {
  if (a.rows() != size || a.cols() != size) throw std::invalid_argument("pairing has the wrong shape");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a + a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("pairing is not alternating");
  }
}

Eigen::MatrixXd standard_j(Eigen::Index n) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  j.block(0, n, n, n) = -Eigen::MatrixXd::Identity(n, n);
  j.block(n, 0, n, n) = Eigen::MatrixXd::Identity(n, n);
  return j;
}

Eigen::MatrixXd curvature_form(const ModelManifold& model, const Eigen::MatrixXd& pairing) {
  const Eigen::MatrixXd binv = model.lattice().inverse();
  return binv.transpose() * pairing * binv;
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& h) {
  const Eigen::MatrixXcd sym = 0.5 * (h + h.adjoint());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(sym, Eigen::EigenvaluesOnly).eigenvalues();
}

std::vector<Level> merge_levels(std::vector<Level> v) {
  std::sort(v.begin(), v.end(), [](const Level& a, const Level& b) { return a.eigenvalue < b.eigenvalue; });
  std::vector<Level> out;
  for (const auto& l : v) {
    if (!out.empty() && std::abs(l.eigenvalue - out.back().eigenvalue) <= 1e-9 * std::max(1.0, std::abs(l.eigenvalue))) {
      out.back().multiplicity += l.multiplicity;
    } else {
      out.push_back(l);
    }
  }
  return out;
}

// Index sets J of size q in {0..n-1} as bitmasks.
std::vector<unsigned> subsets(int n, int q) {
  std::vector<unsigned> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask)
    if (std::popcount(mask) == q) out.push_back(mask);
  return out;
}

std::vector<Level> landau_levels(const Eigen::VectorXd& h, double s, int q, long long mult, double cutoff) {
  const int n = static_cast<int>(h.size());
  std::vector<Level> out;
  for (unsigned mask : subsets(n, q)) {
    std::vector<double> unit(n), shift(n);
    double base = 0;
    for (int j = 0; j < n; ++j) {
      unit[j] = kTwoPi * std::abs(h(j)) / s;
      const bool in = mask & (1u << j);
      shift[j] = kTwoPi / s * (in ? std::max(h(j), 0.0) : std::max(-h(j), 0.0));
      base += shift[j];
    }
    // walk all multi-indices m with base + sum unit_j m_j <= cutoff
    std::vector<int> m(n, 0);
    auto rec = [&](auto&& self, int j, double e) -> void {
      if (j == n) {
        out.push_back({e, mult});
        return;
      }
      for (int mj = 0; e + unit[j] * mj <= cutoff * (1 + 1e-12); ++mj) self(self, j + 1, e + unit[j] * mj);
    };
    if (base <= cutoff * (1 + 1e-12)) rec(rec, 0, base);
  }
  return merge_levels(std::move(out));
}

// Full spectrum of the one-direction Laplacian on (0,q)-forms through the
// Bochner-Kodaira identity (1/2)(nabla^* nabla -+ b), with nabla^* nabla the
// covariant second difference of the degree-d bundle on the lx x ly rectangle
// in Landau gauge.
std::vector<double> factor_spectrum(double lx, double ly, long long d, int q, int grid) {
  const int n = grid;
  const double hx = lx / n, hy = ly / n;
  const double b = kTwoPi * static_cast<double>(d) / (lx * ly);
  using Sp = Eigen::SparseMatrix<cd>;
  std::vector<Eigen::Triplet<cd>> tx, ty;
  auto idx = [n](int i, int j) { return i * n + j; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int r = idx(i, j);
      // x link, gauge jump across the x seam
      const cd ux = i == n - 1 ? std::polar(1.0, b * lx * j * hy) : cd(1.0);
      tx.emplace_back(r, idx((i + 1) % n, j), ux / hx);
      tx.emplace_back(r, r, -1.0 / hx);
      const cd uy = std::polar(1.0, -b * i * hx * hy);
      ty.emplace_back(r, idx(i, (j + 1) % n), uy / hy);
      ty.emplace_back(r, r, -1.0 / hy);
    }
  Sp dx(n * n, n * n), dy(n * n, n * n);
  dx.setFromTriplets(tx.begin(), tx.end());
  dy.setFromTriplets(ty.begin(), ty.end());
  const Sp lap = Sp(dx.adjoint()) * dx + Sp(dy.adjoint()) * dy;
  Eigen::MatrixXcd op = 0.5 * Eigen::MatrixXcd(lap);
  op.diagonal().array() += q == 0 ? -0.5 * b : 0.5 * b;
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(op, Eigen::EigenvaluesOnly).eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

int default_grid(double lx, double ly, double h) {
  // finest retained mode pi/spacing at least 24x the curvature scale sqrt(2 pi |h|)
  const double need = 24.0 * std::sqrt(kTwoPi * std::abs(h)) * std::max(lx, ly) / std::numbers::pi;
  int g = std::max(16, static_cast<int>(std::ceil(need)));
  return g + (g % 2);
}

SpectralProblem discretized_spectrum(const ModelManifold& model, const Eigen::MatrixXd& pairing, int q, double cutoff,
                                     int grid, int& used_grid) {
  const Eigen::Index n = model.dim();
  const Eigen::MatrixXd& b = model.lattice();
  Eigen::MatrixXd off = b;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() > 1e-12) throw std::invalid_argument("discretized spectrum needs a diagonal lattice");
  Eigen::MatrixXd rest = pairing;
  for (Eigen::Index j = 0; j < n; ++j) rest(j, n + j) = rest(n + j, j) = 0;
  if (rest.cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("discretized spectrum needs curvature split along coordinate directions");
  }
  const double s = model.metric_scale();
  std::vector<std::array<std::vector<double>, 2>> factors(n);
  used_grid = 0;
  double lowest = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lx = b(j, j), ly = b(n + j, n + j);
    const double dj = pairing(j, n + j);
    if (std::abs(dj - std::round(dj)) > 1e-9 || std::round(dj) == 0) {
      throw std::invalid_argument("discretized spectrum needs nonzero integral degrees");
    }
    const double area = std::abs(lx * ly);
    const int g = grid > 0 ? grid : default_grid(std::abs(lx), std::abs(ly), dj / area);
    used_grid = std::max(used_grid, g);
    // orientation of the lattice cell enters through the sign of the degree
    const long long d = std::llround(dj) * (lx * ly > 0 ? 1 : -1);
    for (int qj = 0; qj < 2; ++qj) {
      // only the form degrees some index set uses
      if ((qj == 0 && q == n) || (qj == 1 && q == 0)) continue;
      factors[j][qj] = factor_spectrum(std::abs(lx), std::abs(ly), d, qj, g);
      for (double& x : factors[j][qj]) {
        x /= s;
        lowest = std::min(lowest, x);
        x = std::max(x, 0.0);
      }
    }
  }
  std::vector<Level> raw;
  for (unsigned mask : subsets(static_cast<int>(n), q)) {
    // sums e_0 + ... + e_{n-1} <= cutoff over sorted factor spectra
    auto rec = [&](auto&& self, Eigen::Index j, double e) -> void {
      if (j == n) {
        raw.push_back({e, 1});
        return;
      }
      const auto& v = factors[j][(mask >> j) & 1u];
      for (double x : v) {
        if (e + x > cutoff) break;
        self(self, j + 1, e + x);
      }
    };
    rec(rec, 0, 0.0);
  }
  SpectralProblem p;
  p.levels = merge_levels(std::move(raw));
  p.clamped = std::min(lowest, 0.0);
  return p;
}

}  // namespace

ApproxSequence dioph_approx(const ModelManifold& model, const Eigen::MatrixXd& a, int kmax) {
  require_torus(model);
  const Eigen::Index size = 2 * model.dim();
  require_alternating(a, size);
  if (kmax < 1) throw std::invalid_argument("kmax must be positive");
  ApproxSequence seq;
  seq.target = a;
  seq.b2 = static_cast<int>(binomial(size, 2));
  const Eigen::MatrixXd binv = model.lattice().inverse();
  double best = std::numeric_limits<double>::infinity();
  seq.dirichlet_holds = true;
  for (int k = 1; k <= kmax; ++k) {
    ApproxEntry e;
    e.k = k;
    e.m = Eigen::MatrixXd::Zero(size, size);
    for (Eigen::Index i = 0; i < size; ++i)
      for (Eigen::Index j = i + 1; j < size; ++j) {
        e.m(i, j) = std::round(k * a(i, j));
        e.m(j, i) = -e.m(i, j);
      }
    const Eigen::MatrixXd diff = e.m - k * a;
    e.sup_error = diff.cwiseAbs().maxCoeff();
    e.error = form_norm(Eigen::MatrixXd(binv.transpose() * diff * binv));
    const auto split = curvature_split(model, e.m);
    e.norm20 = split.norm20;
    e.norm11 = split.norm11;
    e.norm02 = split.norm02;
    if (e.sup_error < best * (1 - 1e-12)) {
      best = e.sup_error;
      seq.subsequence.push_back(k);
    }
    // pigeonhole: some k' <= k has every entry within 1/floor(k^{1/b2})
    const double boxes = std::floor(std::pow(static_cast<double>(k), 1.0 / seq.b2) + 1e-12);
    if (best > 1.0 / boxes + 1e-12) seq.dirichlet_holds = false;
    seq.entries.push_back(std::move(e));
  }
  for (int k : seq.subsequence) {
    seq.constant = std::max(seq.constant, seq.at(k).error * std::pow(static_cast<double>(k), 1.0 / seq.b2));
  }
  return seq;
}

CurvatureSplit curvature_split(const ModelManifold& model, const Eigen::MatrixXd& pairing) {
  require_torus(model);
  const Eigen::Index n = model.dim();
  require_alternating(pairing, 2 * n);
  CurvatureSplit c;
  c.form = curvature_form(model, pairing);
  const Eigen::MatrixXd j = standard_j(n);
  c.p11 = 0.5 * (c.form + j.transpose() * c.form * j);
  const Eigen::MatrixXd rest = c.form - c.p11;
  // projector onto T^{1,0}: (1 - iJ)/2
  const Eigen::MatrixXcd pi = 0.5 * (Eigen::MatrixXcd::Identity(2 * n, 2 * n) - cd(0, 1) * j.cast<cd>());
  const Eigen::MatrixXcd pibar = pi.conjugate();
  c.p20 = pi.transpose() * rest.cast<cd>() * pi;
  c.p02 = pibar.transpose() * rest.cast<cd>() * pibar;
  c.norm20 = form_norm(c.p20);
  c.norm11 = form_norm(c.p11);
  c.norm02 = form_norm(c.p02);
  c.reconstruction_error = (c.form.cast<cd>() - c.p11.cast<cd>() - c.p20 - c.p02).cwiseAbs().maxCoeff();
  return c;
}

std::string method_name(SpectralMethod m) {
  return m == SpectralMethod::AnalyticLandau ? "analytic-landau" : "discretized";
}

long long SpectralProblem::count(double lambda) const {
  long long c = 0;
  for (const auto& l : levels) {
    if (l.eigenvalue > lambda) break;
    c += l.multiplicity;
  }
  return c;
}

double landau_gap(const ModelManifold& model, const Eigen::MatrixXcd& hermitian) {
  require_torus(model);
  return kTwoPi * hermitian_eigenvalues(hermitian).cwiseAbs().minCoeff() / model.metric_scale();
}

SpectralProblem laplacian_spectrum(const ModelManifold& model, const Eigen::MatrixXd& pairing, int k, int q,
                                   double cutoff, SpectralMethod method, int grid) {
  require_torus(model);
  const int n = model.dim();
  require_alternating(pairing, 2 * n);
  if (!(cutoff > 0)) throw std::invalid_argument("cutoff must be positive");
  if (q < 0 || q > n) throw std::invalid_argument("form degree out of range");
  SpectralProblem p;
  if (method == SpectralMethod::AnalyticLandau) {
    const Eigen::VectorXd h = hermitian_eigenvalues(torus_hermitian_part(curvature_form(model, pairing)));
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if (h.cwiseAbs().minCoeff() <= 1e-12 * scale) throw std::invalid_argument("(1,1) part is degenerate");
    const long long mult = std::llabs(std::llround(pfaffian(pairing)));
    p.levels = landau_levels(h, model.metric_scale(), q, mult, cutoff);
  } else {
    int used = 0;
    p = discretized_spectrum(model, pairing, q, cutoff, grid, used);
    p.grid = used;
  }
  p.model = model.label();
  p.pairing = pairing;
  p.k = k;
  p.q = q;
  p.method = method;
  p.cutoff = cutoff;
  return p;
}

SpectralProblem laplacian_spectrum(const ModelManifold& model, const NSClass& cls, int k, int q, double cutoff,
                                   SpectralMethod method, int grid) {
  require_torus(model);
  check_class(model, cls);
  return laplacian_spectrum(model, Eigen::MatrixXd(k * torus_pairing(model, cls.hermitian)), k, q, cutoff, method,
                            grid);
}

SpectralValidation cross_validate(const ModelManifold& model, const Eigen::MatrixXd& pairing, int q, double cutoff,
                                  double rel_tolerance, int grid) {
  SpectralValidation v;
  const Eigen::MatrixXcd h = torus_hermitian_part(curvature_form(model, pairing));
  const double gap = landau_gap(model, h);
  v.tolerance = rel_tolerance * gap;
  v.analytic = laplacian_spectrum(model, pairing, 1, q, cutoff, SpectralMethod::AnalyticLandau);
  v.discretized = laplacian_spectrum(model, pairing, 1, q, cutoff + gap, SpectralMethod::Discretized, grid);
  std::vector<double> a, d;
  for (const auto& l : v.analytic.levels) a.insert(a.end(), static_cast<std::size_t>(l.multiplicity), l.eigenvalue);
  for (const auto& l : v.discretized.levels)
    d.insert(d.end(), static_cast<std::size_t>(l.multiplicity), l.eigenvalue);
  v.compared = a.size();
  if (d.size() < a.size()) {
    v.max_error = std::numeric_limits<double>::infinity();
    return v;
  }
  for (std::size_t i = 0; i < a.size(); ++i) v.max_error = std::max(v.max_error, std::abs(a[i] - d[i]));
  v.agree = v.max_error <= v.tolerance;
  return v;
}

void require_landau_agreement(const ModelManifold& model, const Eigen::MatrixXd& pairing, int q, double cutoff,
                              double rel_tolerance, int grid) {
  const auto v = cross_validate(model, pairing, q, cutoff, rel_tolerance, grid);
  if (!v.agree) {
    throw std::runtime_error("Landau level formula disagrees with the discretized operator: error " +
                             std::to_string(v.max_error) + " > " + std::to_string(v.tolerance));
  }
}

CountingReport counting_convergence(const ModelManifold& model, const Eigen::MatrixXcd& target, int q, int kmax,
                                    const std::vector<double>& eps_factors) {
  require_torus(model);
  const int n = model.dim();
  if (eps_factors.empty()) throw std::invalid_argument("empty eps schedule");
  const Eigen::VectorXd h = hermitian_eigenvalues(target);
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (h.cwiseAbs().minCoeff() <= 1e-12 * scale) throw std::invalid_argument("target is degenerate");
  CountingReport r;
  r.q = q;
  r.gap = landau_gap(model, target);
  for (double f : eps_factors) r.eps.push_back(f * r.gap);
  const int index = static_cast<int>((h.array() < 0).count());
  double nfact = 1;
  for (int i = 2; i <= n; ++i) nfact *= i;
  r.expected = q == index ? nfact * std::abs(h.prod()) * std::abs(model.lattice().determinant()) : 0.0;

  const auto seq = dioph_approx(model, torus_pairing(model, target), kmax);
  const double top = *std::max_element(r.eps.begin(), r.eps.end());
  const std::size_t ne = r.eps.size();
  r.rows.resize(static_cast<std::size_t>(kmax) * ne);
  parallel_for(static_cast<std::size_t>(kmax), [&](std::size_t i) {
    const int k = static_cast<int>(i) + 1;
    const bool record = std::find(seq.subsequence.begin(), seq.subsequence.end(), k) != seq.subsequence.end();
    SpectralProblem sp;
    bool skipped = false;
    try {
      sp = laplacian_spectrum(model, seq.at(k).m, k, q, k * top * (1 + 1e-9));
    } catch (const std::invalid_argument&) {
      skipped = true;
    }
    for (std::size_t e = 0; e < ne; ++e) {
      CountingRow& row = r.rows[i * ne + e];
      row.k = k;
      row.eps = r.eps[e];
      row.record = record;
      row.skipped = skipped;
      if (!skipped) {
        row.count = sp.count(k * r.eps[e]);
        row.scaled = nfact * static_cast<double>(row.count) / std::pow(static_cast<double>(k), n);
      }
    }
  });
  for (const auto& row : r.rows) r.max_scaled = std::max(r.max_scaled, row.scaled);
  for (auto it = seq.subsequence.rbegin(); it != seq.subsequence.rend(); ++it) {
    if (!r.rows[static_cast<std::size_t>(*it - 1) * ne].skipped) {
      r.best_k = *it;
      break;
    }
  }
  if (r.best_k == 0) throw std::runtime_error("no usable approximant up to kmax");
  const std::size_t base = static_cast<std::size_t>(r.best_k - 1) * ne;
  const auto smallest = std::min_element(r.eps.begin(), r.eps.end()) - r.eps.begin();
  r.estimate = r.rows[base + static_cast<std::size_t>(smallest)].scaled;
  r.plateau = true;
  for (std::size_t e = 0; e < ne; ++e) r.plateau = r.plateau && r.rows[base + e].count == r.rows[base].count;
  r.error = r.expected > 0 ? std::abs(r.estimate - r.expected) / r.expected : std::abs(r.estimate);
  r.converges = r.error <= 0.05;
  return r;
}

double transcendental_hq(const ModelManifold& model, const Eigen::MatrixXcd& target, int q, int kmax) {
  return counting_convergence(model, target, q, kmax).estimate;
}

}  // namespace hqlab
