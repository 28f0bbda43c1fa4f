#include "hqlab/jet.hpp"

#include <cmath>
#include <stdexcept>

namespace hqlab {

Jet::Jet(int dim, double value)
    : value_(value), grad_(CVec::Zero(dim)), levi_(CMat::Zero(dim, dim)) {}

Jet Jet::real_part(int dim, int j, double x) {
  Jet r(dim, x);
  r.grad_(j) = cd(0.5, 0.0);
  return r;
}

Jet Jet::imag_part(int dim, int j, double y) {
  Jet r(dim, y);
  r.grad_(j) = cd(0.0, -0.5);
  return r;
}

Jet Jet::abs_sq(int dim, int j, cd z) {
  Jet r(dim, std::norm(z));
  r.grad_(j) = std::conj(z);
  r.levi_(j, j) = 1.0;
  return r;
}

CMat outer(const CVec& a, const CVec& b) { return a * b.adjoint(); }

Jet Jet::compose(double f0, double f1, double f2) const {
  Jet r(dim(), f0);
  r.grad_ = f1 * grad_;
  r.levi_ = f1 * levi_ + f2 * outer(grad_, grad_);
  return r;
}

Jet& Jet::operator+=(const Jet& o) {
  value_ += o.value_;
  grad_ += o.grad_;
  levi_ += o.levi_;
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  value_ -= o.value_;
  grad_ -= o.grad_;
  levi_ -= o.levi_;
  return *this;
}

Jet& Jet::operator*=(double s) {
  value_ *= s;
  grad_ *= s;
  levi_ *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet r(a.dim(), a.value_ * b.value_);
  r.grad_ = a.value_ * b.grad_ + b.value_ * a.grad_;
  r.levi_ = a.value_ * b.levi_ + b.value_ * a.levi_ + outer(a.grad_, b.grad_) +
            outer(b.grad_, a.grad_);
  return r;
}

Jet operator/(const Jet& a, const Jet& b) { return a * inverse(b); }

Jet log(const Jet& a) {
  const double x = a.value();
  if (!(x > 0.0)) throw std::domain_error("log of a non-positive jet");
  return a.compose(std::log(x), 1.0 / x, -1.0 / (x * x));
}

Jet exp(const Jet& a) {
  const double e = std::exp(a.value());
  return a.compose(e, e, e);
}

Jet sqrt(const Jet& a) {
  const double x = a.value();
  if (!(x > 0.0)) throw std::domain_error("sqrt of a non-positive jet");
  const double s = std::sqrt(x);
  return a.compose(s, 0.5 / s, -0.25 / (s * x));
}

Jet cos(const Jet& a) {
  const double c = std::cos(a.value());
  const double s = std::sin(a.value());
  return a.compose(c, -s, -c);
}

Jet sin(const Jet& a) {
  const double c = std::cos(a.value());
  const double s = std::sin(a.value());
  return a.compose(s, c, -s);
}

Jet inverse(const Jet& a) {
  const double x = a.value();
  if (x == 0.0) throw std::domain_error("inverse of a zero jet");
  return a.compose(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x));
}

Jet pow(const Jet& a, int p) {
  if (p == 0) return Jet(a.dim(), 1.0);
  const double x = a.value();
  const double f0 = std::pow(x, p);
  const double f1 = p * std::pow(x, p - 1);
  const double f2 = p == 1 ? 0.0 : p * (p - 1) * std::pow(x, p - 2);
  return a.compose(f0, f1, f2);
}

}  // namespace hqlab
