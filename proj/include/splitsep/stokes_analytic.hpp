#pragma once

// Closed forms for the first two Stokes coefficients of the inner equation.

#include <map>
#include <numbers>

#include "splitsep/harmonics.hpp"

namespace splitsep {

enum class Provenance { analytic, numeric_plateau };

constexpr const char* to_string(Provenance p) noexcept {
  return p == Provenance::analytic ? "analytic" : "numeric-plateau";
}

struct StokesCoefficient {
  int order = 0;
  cplx value{};
  Provenance provenance = Provenance::analytic;
};

/// chi_1 = 4 pi g^[1]
inline StokesCoefficient chi1(const PerturbationSpec& spec) {
  return {1, 4.0 * std::numbers::pi * spec[1], Provenance::analytic};
}

/// chi_2 = -(4 pi / 3) sum_{k>1} g^[k] g^[1-k] / (k (1-k))
inline StokesCoefficient chi2(const PerturbationSpec& spec) {
  cplx sum{};
  for (const auto& [k, gk] : spec.coefficients()) {
    if (k < 2) continue;
    const cplx partner = spec[1 - k];
    if (partner == cplx{}) continue;
    sum += gk * partner / static_cast<double>(k * (1 - k));
  }
  return {2, -4.0 * std::numbers::pi / 3.0 * sum, Provenance::analytic};
}

/// (G^2)^[1] for the zero-mean primitive G of g, by explicit Fourier convolution.
inline cplx g_squared_first_harmonic(const PerturbationSpec& spec) {
  const cplx i{0.0, 1.0};
  std::map<int, cplx> primitive;
  for (int k : spec.support()) primitive[k] = spec[k] / (i * static_cast<double>(k));
  cplx acc{};
  for (const auto& [m, gm] : primitive) {
    const auto it = primitive.find(1 - m);
    if (it != primitive.end()) acc += gm * it->second;
  }
  return acc;
}

}  // namespace splitsep
