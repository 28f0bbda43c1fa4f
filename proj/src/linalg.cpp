#include "hqlab/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace hqlab {

RVec relative_eigenvalues(const CMat& metric, const CMat& form) {
  Eigen::LLT<CMat> llt(metric);
  if (llt.info() != Eigen::Success) {
    throw std::domain_error("metric matrix is not positive definite at a node");
  }
  const auto& l = llt.matrixL();
  CMat half = l.solve(form);                        // L^{-1} U
  CMat reduced = l.solve(half.adjoint()).adjoint(); // L^{-1} U L^{-*}
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(reduced),
                                         Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

CMat hermitian_part(const CMat& a) { return (a + a.adjoint()) * 0.5; }

double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {
std::atomic<int> g_threads{0};
}

void set_default_threads(int threads) { g_threads = std::max(0, threads); }

int default_threads() {
  int t = g_threads.load();
  if (t > 0) return t;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  int threads) {
  int workers = threads > 0 ? threads : default_threads();
  if (workers <= 1 || n < 256) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  workers = static_cast<int>(std::min<std::size_t>(workers, n));
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
}

long long binomial(long long n, long long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  __int128 r = 1;
  for (long long i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
  }
  return static_cast<long long>(r);
}

double pfaffian(const Eigen::MatrixXd& a_in) {
  const Eigen::Index m = a_in.rows();
  if (m != a_in.cols() || m % 2 != 0) {
    throw std::invalid_argument("pfaffian needs an even square matrix");
  }
  Eigen::MatrixXd a = a_in;
  double pf = 1.0;
  for (Eigen::Index k = 0; k + 1 < m; k += 2) {
    Eigen::Index piv = k + 1;
    for (Eigen::Index j = k + 2; j < m; ++j) {
      if (std::abs(a(k, j)) > std::abs(a(k, piv))) piv = j;
    }
    if (piv != k + 1) {
      a.row(k + 1).swap(a.row(piv));
      a.col(k + 1).swap(a.col(piv));
      pf = -pf;
    }
    const double p = a(k, k + 1);
    if (p == 0.0) return 0.0;
    pf *= p;
    if (k + 2 < m) {
      // Schur-style elimination keeping the trailing block antisymmetric.
      Eigen::VectorXd u = a.row(k).segment(k + 2, m - k - 2).transpose() / p;
      Eigen::VectorXd v = a.row(k + 1).segment(k + 2, m - k - 2).transpose();
      auto tail = a.block(k + 2, k + 2, m - k - 2, m - k - 2);
      tail += v * u.transpose() - u * v.transpose();
    }
  }
  return pf;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(y[i] > 0.0) || !(x[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++cnt;
  }
  if (cnt < 2) return 0.0;
  const double den = cnt * sxx - sx * sx;
  if (den == 0.0) return 0.0;
  return (cnt * sxy - sx * sy) / den;
}

}  // namespace hqlab
