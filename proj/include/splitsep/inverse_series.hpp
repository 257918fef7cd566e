#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "splitsep/error.hpp"

namespace splitsep {

/// Truncated formal series sum_{l=0}^{order} c_l z^{-l}.
///
/// `order` is the highest power whose coefficient is exact. Every operation
/// propagates it: differentiation gains one order, a product of series with
/// leading powers a and b is exact up to min(order_x + b, order_y + a), and
/// multiplying by z^p loses p orders.
template <class T>
class InverseZSeries {
 public:
  InverseZSeries() = default;

  /// Zero series, exact through z^{-order}.
  explicit InverseZSeries(int order) : coeffs_(static_cast<std::size_t>(order) + 1, T{}) {
    if (order < 0) throw Error(ErrorKind::InvalidArgument, "series order must be >= 0");
  }

  static InverseZSeries monomial(int power, T coefficient, int order) {
    InverseZSeries s(order);
    if (power <= order) s[power] = coefficient;
    return s;
  }

  int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }

  /// Index of the first nonzero coefficient, order()+1 for the zero series.
  int leading_order() const noexcept {
    for (std::size_t l = 0; l < coeffs_.size(); ++l)
      if (coeffs_[l] != T{}) return static_cast<int>(l);
    return order() + 1;
  }

  T& operator[](int l) { return coeffs_.at(static_cast<std::size_t>(l)); }
  const T& operator[](int l) const { return coeffs_.at(static_cast<std::size_t>(l)); }

  /// Coefficient of z^{-l}; zero past the stored order.
  T coeff(int l) const {
    return l >= 0 && l <= order() ? coeffs_[static_cast<std::size_t>(l)] : T{};
  }

  const std::vector<T>& coefficients() const noexcept { return coeffs_; }

  InverseZSeries truncated(int new_order) const {
    InverseZSeries out(std::min(new_order, order()));
    for (int l = 0; l <= out.order(); ++l) out[l] = coeff(l);
    return out;
  }

  InverseZSeries& operator+=(const InverseZSeries& other) {
    coeffs_.resize(static_cast<std::size_t>(std::min(order(), other.order())) + 1);
    for (int l = 0; l <= order(); ++l) (*this)[l] += other[l];
    return *this;
  }

  InverseZSeries& operator-=(const InverseZSeries& other) {
    coeffs_.resize(static_cast<std::size_t>(std::min(order(), other.order())) + 1);
    for (int l = 0; l <= order(); ++l) (*this)[l] -= other[l];
    return *this;
  }

  template <class S>
  InverseZSeries& operator*=(const S& scalar) {
    for (auto& c : coeffs_) c *= scalar;
    return *this;
  }

  friend InverseZSeries operator+(InverseZSeries a, const InverseZSeries& b) { return a += b; }
  friend InverseZSeries operator-(InverseZSeries a, const InverseZSeries& b) { return a -= b; }

  template <class S>
  friend InverseZSeries operator*(InverseZSeries a, const S& scalar) {
    return a *= scalar;
  }

  friend InverseZSeries operator*(const InverseZSeries& a, const InverseZSeries& b) {
    const int la = a.leading_order();
    const int lb = b.leading_order();
    const int out_order = std::min(a.order() + lb, b.order() + la);
    InverseZSeries out(out_order);
    for (int i = la; i <= a.order(); ++i) {
      if (a[i] == T{}) continue;
      for (int j = lb; j <= b.order() && i + j <= out_order; ++j) out[i + j] += a[i] * b[j];
    }
    return out;
  }

  /// Multiplies by z^p; throws if a nonzero coefficient would land on a positive power.
  InverseZSeries times_z_pow(int p) const {
    const int new_order = order() - p;
    if (new_order < 0) throw Error(ErrorKind::InvalidArgument, "series exhausted by z^p shift");
    InverseZSeries out(new_order);
    for (int l = 0; l <= order(); ++l) {
      const int target = l - p;
      if (target < 0) {
        if (coeffs_[static_cast<std::size_t>(l)] != T{})
          throw Error(ErrorKind::InvalidArgument, "z^p shift produces a growing term");
        continue;
      }
      out[target] = coeffs_[static_cast<std::size_t>(l)];
    }
    return out;
  }

  /// d/dz, exact through z^{-(order+1)}.
  InverseZSeries derivative() const {
    InverseZSeries out(order() + 1);
    for (int l = 1; l <= order(); ++l) out[l + 1] = -static_cast<double>(l) * (*this)[l];
    return out;
  }

  /// Horner evaluation in w = 1/z.
  template <class Z>
  Z evaluate(const Z& z) const {
    const Z w = Z(1) / z;
    Z acc{};
    for (int l = order(); l >= 0; --l) acc = acc * w + Z(coeffs_[static_cast<std::size_t>(l)]);
    return acc;
  }

 private:
  std::vector<T> coeffs_{T{}};
};

}  // namespace splitsep
