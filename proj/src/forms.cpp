#include "hqlab/forms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace hqlab {

namespace {

void require_grid(const HermitianFormField& u) {
  if (u.grid == nullptr || u.grid->nodes.size() != u.matrices.size()) {
    throw std::logic_error("form field is not attached to its grid");
  }
}

double weighted_sum(const QuadratureGrid& grid, const std::vector<double>& per_node) {
  std::vector<double> terms(per_node.size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = per_node[i] * grid.nodes[i].weight;
  return pairwise_sum(terms);
}

double ramp(double x) { return std::clamp(0.5 + 0.5 * x, 0.0, 1.0); }

}  // namespace

HermitianFormField reference_form(const ModelManifold& model, const QuadratureGrid& grid,
                                  const NSClass& cls) {
  check_class(model, cls);
  HermitianFormField u{model, &grid, cls, {}, {}};
  u.matrices.resize(grid.nodes.size());
  parallel_for(grid.nodes.size(), [&](std::size_t i) {
    u.matrices[i] = reference_matrix(model, cls, grid.nodes[i]);
  });
  return u;
}

HermitianFormField hessian_form(const HermitianFormField& reference, const BasisTable& table,
                                std::span<const double> coeffs) {
  require_grid(reference);
  if (coeffs.size() != table.size) {
    throw std::invalid_argument("potential coefficient count does not match the basis");
  }
  if (table.hessians.size() != reference.matrices.size() * table.size) {
    throw std::invalid_argument("basis table was built on a different grid");
  }
  for (double c : coeffs)
    if (!std::isfinite(c)) throw std::invalid_argument("potential coefficient is not finite");
  HermitianFormField u = reference;
  u.potential.assign(coeffs.begin(), coeffs.end());
  parallel_for(u.matrices.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < table.size; ++j) {
      if (coeffs[j] != 0.0) u.matrices[i] += coeffs[j] * table.at(i, j);
    }
  });
  return u;
}

HermitianFormField hessian_form(const ModelManifold& model, const QuadratureGrid& grid,
                                const NSClass& cls, const PotentialBasis& basis,
                                std::span<const double> coeffs) {
  if (coeffs.size() != basis.size()) {
    throw std::invalid_argument("potential coefficient count does not match the basis");
  }
  return hessian_form(reference_form(model, grid, cls), tabulate(basis, grid), coeffs);
}

SignatureProfile signature_profile(const HermitianFormField& u, double tau0) {
  require_grid(u);
  if (!(tau0 > 0)) throw std::invalid_argument("degeneracy threshold must be positive");
  SignatureProfile p;
  p.tau0 = tau0;
  p.nodes.resize(u.size());
  const auto& nodes = u.grid->nodes;
  parallel_for(u.size(), [&](std::size_t i) {
    NodeSignature s;
    s.eigenvalues = relative_eigenvalues(nodes[i].metric, u.matrices[i]);
    const double scale = s.eigenvalues.cwiseAbs().maxCoeff();
    s.density = s.eigenvalues.prod();
    for (Eigen::Index j = 0; j < s.eigenvalues.size(); ++j) {
      const double l = s.eigenvalues(j);
      if (std::abs(l) <= tau0 * scale || scale == 0.0) {
        ++s.zero;
      } else if (l > 0) {
        ++s.positive;
      } else {
        ++s.negative;
      }
    }
    p.nodes[i] = std::move(s);
  });
  std::vector<double> deg(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) deg[i] = p.nodes[i].zero > 0 ? 1.0 : 0.0;
  p.degenerate_weight = weighted_sum(*u.grid, deg);
  return p;
}

MorseValue morse_integral(const SignatureProfile& profile, const QuadratureGrid& grid, int q) {
  if (profile.nodes.size() != grid.nodes.size()) {
    throw std::invalid_argument("signature profile does not match the grid");
  }
  const int n = profile.nodes.empty() ? 0 : static_cast<int>(profile.nodes.front().eigenvalues.size());
  if (q < 0 || q > n) throw std::invalid_argument("Morse index out of range");
  const double sign = (q % 2 == 0) ? 1.0 : -1.0;
  std::vector<double> val(grid.nodes.size()), ind(grid.nodes.size());
  for (std::size_t i = 0; i < val.size(); ++i) {
    const auto& s = profile.nodes[i];
    const bool in = s.zero == 0 && s.negative == q;
    val[i] = in ? sign * s.density : 0.0;
    ind[i] = in ? 1.0 : 0.0;
  }
  MorseValue m;
  m.value = weighted_sum(grid, val);
  m.region_weight = weighted_sum(grid, ind);
  m.degenerate_weight = profile.degenerate_weight;
  return m;
}

std::vector<MorseValue> morse_integrals(const SignatureProfile& profile, const QuadratureGrid& grid) {
  const int n = profile.nodes.empty() ? 0 : static_cast<int>(profile.nodes.front().eigenvalues.size());
  std::vector<MorseValue> out;
  for (int q = 0; q <= n; ++q) out.push_back(morse_integral(profile, grid, q));
  return out;
}

MorseValue morse_integral(const HermitianFormField& u, int q, double tau0) {
  if (q < 0 || q > u.model.dim()) throw std::invalid_argument("Morse index out of range");
  return morse_integral(signature_profile(u, tau0), *u.grid, q);
}

double morse_integral_soft(const HermitianFormField& u, int q, double width) {
  require_grid(u);
  const int n = u.model.dim();
  if (q < 0 || q > n) throw std::invalid_argument("Morse index out of range");
  if (!(width > 0)) throw std::invalid_argument("smoothing width must be positive");
  const double sign = (q % 2 == 0) ? 1.0 : -1.0;
  std::vector<double> val(u.size());
  parallel_for(u.size(), [&](std::size_t i) {
    const RVec ev = relative_eigenvalues(u.grid->nodes[i].metric, u.matrices[i]);
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300) * width;
    // ascending: the q smallest should be negative, the rest positive
    double ind = 1.0;
    for (int j = 0; j < n; ++j) ind *= j < q ? ramp(-ev(j) / scale) : ramp(ev(j) / scale);
    val[i] = sign * ev.prod() * ind;
  });
  return weighted_sum(*u.grid, val);
}

double chern_number(const HermitianFormField& u) {
  require_grid(u);
  std::vector<double> det(u.size());
  parallel_for(u.size(), [&](std::size_t i) {
    det[i] = relative_eigenvalues(u.grid->nodes[i].metric, u.matrices[i]).prod();
  });
  return weighted_sum(*u.grid, det);
}

double mixed_chern_number(const HermitianFormField& u, const HermitianFormField& v) {
  require_grid(u);
  require_grid(v);
  if (u.grid != v.grid) throw std::invalid_argument("forms live on different grids");
  if (u.model.dim() != 2) throw std::invalid_argument("mixed Chern number is implemented for surfaces");
  std::vector<double> mix(u.size());
  parallel_for(u.size(), [&](std::size_t i) {
    const CMat& g = u.grid->nodes[i].metric;
    const double a = relative_eigenvalues(g, u.matrices[i] + v.matrices[i]).prod();
    const double b = relative_eigenvalues(g, u.matrices[i]).prod();
    const double c = relative_eigenvalues(g, v.matrices[i]).prod();
    mix[i] = 0.5 * (a - b - c);
  });
  return weighted_sum(*u.grid, mix);
}

void dump_field(std::ostream& out, const HermitianFormField& u, const SignatureProfile& profile) {
  require_grid(u);
  const int n = u.model.dim();
  out << "node,chart";
  for (int j = 0; j < n; ++j) out << ",re_z" << j << ",im_z" << j;
  out << ",weight";
  for (int j = 0; j < n; ++j) out << ",lambda" << j;
  out << ",n_plus,n_minus,n_zero,density\n";
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.12e", x);
    out << ',' << buf;
  };
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto& node = u.grid->nodes[i];
    const auto& s = profile.nodes[i];
    out << i << ',' << node.chart;
    for (int j = 0; j < n; ++j) {
      num(node.z(j).real());
      num(node.z(j).imag());
    }
    num(node.weight);
    for (int j = 0; j < n; ++j) num(s.eigenvalues(j));
    out << ',' << s.positive << ',' << s.negative << ',' << s.zero;
    num(s.density);
    out << '\n';
  }
}

}  // namespace hqlab
