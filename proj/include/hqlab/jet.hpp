#pragma once

#include "hqlab/linalg.hpp"

namespace hqlab {

/// Second-order complex jet of a real-valued function of chart coordinates
/// z_1..z_n: the value, the holomorphic gradient d_j = df/dz_j, and the Levi
/// matrix levi(j,k) = d^2 f / dz_j dzbar_k.
///
/// Arithmetic propagates jets exactly (forward-mode differentiation), which is
/// how every complex Hessian in the project is obtained.
class Jet {
 public:
  Jet() = default;
  Jet(int dim, double value);

  /// Re z_j and Im z_j at the point z.
  static Jet real_part(int dim, int j, double x);
  static Jet imag_part(int dim, int j, double y);
  /// |z_j|^2.
  static Jet abs_sq(int dim, int j, cd z);

  int dim() const { return static_cast<int>(grad_.size()); }
  double value() const { return value_; }
  const CVec& grad() const { return grad_; }
  const CMat& levi() const { return levi_; }

  /// Chain rule through a scalar function F with F(value)=f0, F'=f1, F''=f2.
  Jet compose(double f0, double f1, double f2) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) {
    a.value_ += s;
    return a;
  }
  friend Jet operator+(double s, Jet a) { return a + s; }
  friend Jet operator-(Jet a, double s) { return a + (-s); }
  friend Jet operator-(double s, const Jet& a) { return (a * -1.0) + s; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);

 private:
  double value_ = 0.0;
  CVec grad_;
  CMat levi_;
};

Jet log(const Jet& a);
Jet exp(const Jet& a);
Jet sqrt(const Jet& a);
Jet cos(const Jet& a);
Jet sin(const Jet& a);
Jet inverse(const Jet& a);
Jet pow(const Jet& a, int p);

/// grad(a) grad(b)^*, the (1,0) x (0,1) outer product appearing in Levi
/// matrices of products.
CMat outer(const CVec& a, const CVec& b);

}  // namespace hqlab
