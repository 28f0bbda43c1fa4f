#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hqlab {

using cd = std::complex<double>;

// Complex dimension cap for node-level linear algebra. Keeps per-node
// matrices on the stack.
inline constexpr int kMaxDim = 4;

using CVec = Eigen::Matrix<cd, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using CMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using RVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

/// Eigenvalues of `form` relative to the positive definite hermitian `metric`,
/// i.e. the spectrum of metric^{-1} form, in ascending order.
///
/// The metric is Cholesky-factored (metric = L L^*) and the hermitian matrix
/// L^{-1} form L^{-*} is diagonalized. Throws std::domain_error when the
/// metric is not positive definite.
RVec relative_eigenvalues(const CMat& metric, const CMat& form);

/// Hermitian part (A + A^*)/2.
CMat hermitian_part(const CMat& a);

/// Pairwise (tree) summation in index order. The result depends only on the
/// input sequence, never on how the terms were produced.
double pairwise_sum(std::span<const double> values);

/// Default worker count for node-parallel loops; 0 means hardware width.
void set_default_threads(int threads);
int default_threads();

/// Runs body(i) for i in [0, n) over contiguous chunks on `threads` workers.
/// Bodies must only write to slots indexed by i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  int threads = 0);

/// Binomial coefficient C(n, k) as a 64-bit integer; 0 when k < 0 or k > n.
long long binomial(long long n, long long k);

/// Pfaffian of an even-dimensional real antisymmetric matrix.
double pfaffian(const Eigen::MatrixXd& a);

/// Least-squares slope of log(y) against log(x), skipping non-positive y.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace hqlab
