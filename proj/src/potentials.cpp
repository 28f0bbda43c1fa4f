#include "hqlab/potentials.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace hqlab {

namespace {

// All exponent vectors of length v with total degree in [1, m], graded
// lexicographic.
std::vector<std::vector<int>> monomial_exponents(int v, int m) {
  std::vector<std::vector<int>> out;
  for (int deg = 1; deg <= m; ++deg) {
    std::vector<int> e(v, 0);
    // enumerate compositions of deg into v parts
    std::function<void(int, int)> rec = [&](int pos, int left) {
      if (pos == v - 1) {
        e[pos] = left;
        out.push_back(e);
        return;
      }
      for (int k = left; k >= 0; --k) {
        e[pos] = k;
        rec(pos + 1, left - k);
      }
    };
    rec(0, deg);
  }
  return out;
}

// Frequencies kappa in Z^m with 1 <= |kappa|_inf <= deg whose first nonzero
// entry is positive.
std::vector<std::vector<int>> half_frequencies(int m, int deg) {
  std::vector<std::vector<int>> out;
  std::vector<int> k(m, -deg);
  while (true) {
    int first = 0;
    for (int x : k) {
      if (x != 0) {
        first = x;
        break;
      }
    }
    if (first > 0) out.push_back(k);
    int i = 0;
    for (; i < m; ++i) {
      if (++k[i] <= deg) break;
      k[i] = -deg;
    }
    if (i == m) break;
  }
  return out;
}

std::string monomial_name(const char* var, const std::vector<int>& e) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (!first) os << '*';
    os << var << i;
    if (e[i] > 1) os << '^' << e[i];
    first = false;
  }
  return os.str();
}

Jet monomial(const std::vector<Jet>& vars, const std::vector<int>& e, int dim) {
  Jet r(dim, 1.0);
  bool any = false;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    const Jet p = e[i] == 1 ? vars[i] : pow(vars[i], e[i]);
    r = any ? r * p : p;
    any = true;
  }
  return r;
}

int invariant_count(const ModelManifold& m) {
  switch (m.kind()) {
    case ModelKind::ProjProduct: {
      int c = 0;
      for (int d : m.factors()) c += d;
      return c;
    }
    case ModelKind::HirzebruchF1: return 2;
    case ModelKind::FlatTorus: return 2 * m.dim();
  }
  return 0;
}

}  // namespace

PotentialBasis::PotentialBasis(const ModelManifold& model, BasisOptions options)
    : model_(model), options_(std::move(options)) {
  if (options_.degree < 0) throw std::invalid_argument("basis degree must be non-negative");
  const int v = invariant_count(model_);
  switch (model_.kind()) {
    case ModelKind::ProjProduct:
    case ModelKind::HirzebruchF1: {
      const char* var = model_.kind() == ModelKind::HirzebruchF1 ? "m" : "t";
      for (auto& e : monomial_exponents(v, options_.degree)) {
        names_.push_back(monomial_name(var, e));
        exponents_.push_back(std::move(e));
      }
      if (model_.kind() == ModelKind::ProjProduct && options_.angular) {
        int pairs = 0;
        for (int d : model_.factors()) pairs += d * (d + 1) / 2;
        for (int p = 0; p < pairs; ++p) {
          names_.push_back("re" + std::to_string(p));
          names_.push_back("im" + std::to_string(p));
        }
      }
      if (model_.kind() == ModelKind::HirzebruchF1) {
        for (double eps : options_.log_eps) {
          if (!(eps > 0)) throw std::invalid_argument("log term scale must be positive");
          std::ostringstream os;
          os << "log(sigma^2+" << eps << "^2)";
          names_.push_back(os.str());
        }
      }
      break;
    }
    case ModelKind::FlatTorus: {
      for (auto& k : half_frequencies(v, options_.degree)) {
        for (int kind = 0; kind < 2; ++kind) {
          std::ostringstream os;
          os << (kind == 0 ? "cos" : "sin") << '(';
          for (std::size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
          os << ')';
          names_.push_back(os.str());
          exponents_.push_back(k);
          trig_kind_.push_back(kind);
        }
      }
      break;
    }
  }
}

std::vector<Jet> PotentialBasis::evaluate(const GridNode& node) const {
  const int n = model_.dim();
  std::vector<Jet> out;
  out.reserve(size());
  const std::vector<Jet> vars = invariant_coordinates(model_, node);
  if (model_.kind() == ModelKind::FlatTorus) {
    for (std::size_t j = 0; j < exponents_.size(); ++j) {
      Jet arg(n, 0.0);
      for (std::size_t a = 0; a < vars.size(); ++a) {
        if (exponents_[j][a] != 0) arg += (2.0 * std::numbers::pi * exponents_[j][a]) * vars[a];
      }
      out.push_back(trig_kind_[j] == 0 ? cos(arg) : sin(arg));
    }
    return out;
  }
  for (const auto& e : exponents_) out.push_back(monomial(vars, e, n));
  if (model_.kind() == ModelKind::ProjProduct && options_.angular) {
    for (Jet& a : angular_coordinates(model_, node)) out.push_back(std::move(a));
  }
  if (model_.kind() == ModelKind::HirzebruchF1 && !options_.log_eps.empty()) {
    const Jet s2 = f1::sigma_norm_sq(node.chart, node.z);
    for (double eps : options_.log_eps) out.push_back(log(s2 + eps * eps));
  }
  return out;
}

BasisTable tabulate(const PotentialBasis& basis, const QuadratureGrid& grid) {
  BasisTable t;
  t.size = basis.size();
  t.dim = grid.nodes.empty() ? 0 : static_cast<int>(grid.nodes.front().z.size());
  t.hessians.resize(grid.nodes.size() * t.size);
  parallel_for(grid.nodes.size(), [&](std::size_t i) {
    const auto jets = basis.evaluate(grid.nodes[i]);
    for (std::size_t j = 0; j < t.size; ++j) t.hessians[i * t.size + j] = ddbar_matrix(jets[j]);
  });
  return t;
}

}  // namespace hqlab
