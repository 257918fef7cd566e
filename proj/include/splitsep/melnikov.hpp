#pragma once

// Melnikov function of the pendulum x'' = -sin x - mu sin(x) g(t/eps):
//
//   M(tau; eps) = -int 2 sinh(r) / cosh^3(r) g(tau + r/eps) dr
//               = -i (pi/eps^2) sum_k g^[k] e^{ik tau} k^2 / sinh(k pi / (2 eps))

#include <cmath>
#include <numbers>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "splitsep/error.hpp"
#include "splitsep/harmonics.hpp"

namespace splitsep {

struct MelnikovEval {
  double epsilon = 0.0;
  double tau = 0.0;
  double value = 0.0;
  double leading_term = 0.0;
  double tail_bound_order = 0.0;  // size of the k = 2 exponential tier
  double imag_residual = 0.0;     // imaginary part of the complex sum, zero up to roundoff
};

/// Unperturbed separatrix (x0(t), y0(t)) = (4 arctan e^t, 2 / cosh t).
inline std::pair<double, double> homoclinic(double t) {
  // 4 arctan(e^t) = 2 pi - 4 arctan(e^-t); the second form keeps precision for t > 0
  const double x = t <= 0.0 ? 4.0 * std::atan(std::exp(t))
                            : 2.0 * std::numbers::pi - 4.0 * std::atan(std::exp(-t));
  return {x, 2.0 / std::cosh(t)};
}

namespace detail {

/// 1/sinh(x) for x > 0 without forming e^x.
inline double inv_sinh(double x) {
  const double e = std::exp(-x);
  return 2.0 * e / -std::expm1(-2.0 * x);
}

}  // namespace detail

inline MelnikovEval melnikov_closed(const PerturbationSpec& spec, double epsilon, double tau) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
  using std::numbers::pi;
  MelnikovEval out{epsilon, tau, 0.0, 0.0, 0.0, 0.0};
  const double pref = pi / (epsilon * epsilon);
  cplx sum{};
  for (const auto& [k, gk] : spec.coefficients()) {
    const double weight = static_cast<double>(k) * k * detail::inv_sinh(k * pi / (2.0 * epsilon));
    // k and -k together: g^[k] e^{ik tau} w - conj(g^[k] e^{ik tau}) w
    const cplx a = gk * std::polar(1.0, k * tau);
    sum += (a - std::conj(a)) * weight;
  }
  const cplx total = cplx{0.0, -pref} * sum;
  out.value = total.real();
  out.imag_residual = total.imag();

  const double decay = std::exp(-pi / (2.0 * epsilon));
  out.leading_term = 4.0 * pref * decay * std::imag(spec[1] * std::polar(1.0, tau));
  double upper = 0.0;
  for (const auto& [k, gk] : spec.coefficients())
    if (k >= 2) upper += std::abs(gk);
  out.tail_bound_order = 16.0 * pref * decay * decay * upper;
  return out;
}

/// Direct quadrature of the Melnikov integral along the separatrix.
inline double melnikov_quadrature(const PerturbationSpec& spec, double epsilon, double tau) {
  if (!(epsilon >= 0.2))
    throw Error(ErrorKind::InvalidArgument, "quadrature oracle needs epsilon >= 0.2");
  // 2 sinh r / cosh^3 r < 8 e^{-2r}; the tail past r = 20 is below 1e-17
  constexpr double half_width = 20.0;
  const auto integrand = [&](double r) {
    const double c = std::cosh(r);
    return -2.0 * std::sinh(r) / (c * c * c) * spec.evaluate(tau + r / epsilon);
  };
  // panels of about one period of the fastest harmonic
  const double period = 2.0 * std::numbers::pi * epsilon / spec.max_harmonic();
  const int panels = static_cast<int>(std::ceil(2.0 * half_width / period));
  const double width = 2.0 * half_width / panels;
  double total = 0.0, l1 = 0.0, err_sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = -half_width + p * width;
    double err = 0.0, panel_l1 = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, a, a + width, 8, 1e-12, &err, &panel_l1);
    err_sum += err;
    l1 += panel_l1;
  }
  if (err_sum > 1e-10 * std::max(l1, 1e-300))
    throw Error(ErrorKind::QuadratureBudgetExceeded,
                "error estimate " + std::to_string(err_sum) + " against L1 norm " + std::to_string(l1));
  return total;
}

}  // namespace splitsep
