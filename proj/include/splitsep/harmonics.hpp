#pragma once

// Fourier data of the periodic forcing g(tau) and the combinatorics of its
// harmonic sumsets G_l = {m_1 + ... + m_l : m_i in G_1}.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "splitsep/error.hpp"

namespace splitsep {

using cplx = std::complex<double>;
using HarmonicSet = std::set<int>;

/// Finite Fourier series of a real-analytic, zero-mean, 2pi-periodic g.
///
/// Only harmonics k >= 1 are stored. The negative harmonics follow from
/// g^[-k] = conj(g^[k]), so a spec cannot describe a complex-valued g.
/// Construct through validate_spec().
class PerturbationSpec {
 public:
  const std::map<int, cplx>& coefficients() const noexcept { return coeffs_; }
  double sigma0() const noexcept { return sigma0_; }

  /// g^[k] for any integer k.
  cplx operator[](int k) const {
    if (k == 0) return {};
    const auto it = coeffs_.find(k > 0 ? k : -k);
    if (it == coeffs_.end()) return {};
    return k > 0 ? it->second : std::conj(it->second);
  }

  int max_harmonic() const noexcept { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }

  /// G_1: every m with g^[m] != 0, both signs.
  HarmonicSet support() const {
    HarmonicSet out;
    for (const auto& [k, v] : coeffs_) {
      out.insert(k);
      out.insert(-k);
    }
    return out;
  }

  /// g(tau) evaluated from the Fourier sum (real for real tau).
  double evaluate(double tau) const {
    double acc = 0.0;
    for (const auto& [k, v] : coeffs_) acc += 2.0 * std::real(v * std::polar(1.0, k * tau));
    return acc;
  }

  /// Every coefficient multiplied by a real factor; the support is unchanged for lambda != 0.
  PerturbationSpec scaled(double lambda) const {
    PerturbationSpec out = *this;
    for (auto& [k, v] : out.coeffs_) v *= lambda;
    return out;
  }

  friend bool operator==(const PerturbationSpec&, const PerturbationSpec&) = default;

 private:
  friend PerturbationSpec validate_spec(const std::vector<std::pair<int, cplx>>&, double);
  std::map<int, cplx> coeffs_;
  double sigma0_ = 1.0;
};

/// Builds a spec from raw (k, g^[k]) pairs.
///
/// Zero-valued entries are dropped. A negative index is folded onto -k by
/// conjugation; it collides with an explicit entry for -k as a duplicate.
inline PerturbationSpec validate_spec(const std::vector<std::pair<int, cplx>>& raw,
                                      double sigma0 = 1.0) {
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0))
    throw Error(ErrorKind::InvalidArgument, "sigma0 must be positive and finite");
  PerturbationSpec spec;
  spec.sigma0_ = sigma0;
  std::set<int> seen;
  for (const auto& [k, value] : raw) {
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
      throw Error(ErrorKind::InvalidArgument, "non-finite coefficient at k=" + std::to_string(k));
    if (k == 0) {
      if (value != cplx{}) throw Error(ErrorKind::ZeroMeanViolation, "g^[0] must vanish");
      continue;
    }
    const int key = k > 0 ? k : -k;
    if (!seen.insert(key).second)
      throw Error(ErrorKind::DuplicateHarmonic, "harmonic " + std::to_string(key) + " given twice");
    if (value == cplx{}) continue;
    spec.coeffs_[key] = k > 0 ? value : std::conj(value);
  }
  if (spec.coeffs_.empty()) throw Error(ErrorKind::EmptySpec, "no nonzero harmonic");
  int g = 0;
  for (const auto& [k, v] : spec.coeffs_) g = std::gcd(g, k);
  if (g != 1)
    throw Error(ErrorKind::NonUnitGcd,
                "gcd of the support is " + std::to_string(g) + "; the period is 2pi/" +
                    std::to_string(g));
  return spec;
}

/// {x + y : x in a, y in b}
inline HarmonicSet sumset(const HarmonicSet& a, const HarmonicSet& b) {
  HarmonicSet out;
  for (int x : a)
    for (int y : b) out.insert(x + y);
  return out;
}

struct DegeneracyReport {
  std::vector<HarmonicSet> g_sets;  // g_sets[l-1] is G_l
  int order_n = 0;
  std::vector<int> witness;  // 1 = witness[0] + ... + witness[n-1], each in G_1

  const HarmonicSet& G(int l) const { return g_sets.at(static_cast<std::size_t>(l - 1)); }
};

/// n(g) = min{l : 1 in G_l}, with the sets G_1..G_n and the lexicographically
/// smallest decomposition of 1 into n harmonics of g.
inline DegeneracyReport degeneracy_order(const PerturbationSpec& spec, int max_order = 64) {
  if (max_order < 1) throw Error(ErrorKind::InvalidArgument, "max_order must be >= 1");
  DegeneracyReport report;
  const HarmonicSet g1 = spec.support();
  report.g_sets.push_back(g1);
  while (!report.g_sets.back().contains(1)) {
    if (static_cast<int>(report.g_sets.size()) >= max_order)
      throw Error(ErrorKind::OrderExceedsBound,
                  "1 not in G_l for l <= " + std::to_string(max_order));
    report.g_sets.push_back(sumset(report.g_sets.back(), g1));
  }
  report.order_n = static_cast<int>(report.g_sets.size());

  // Greedy backtrack: m_i is the smallest element leaving a remainder in G_{n-i}.
  int remainder = 1;
  for (int left = report.order_n; left >= 1; --left) {
    for (int m : g1) {
      const int rest = remainder - m;
      const bool ok = left == 1 ? rest == 0 : report.G(left - 1).contains(rest);
      if (ok) {
        report.witness.push_back(m);
        remainder = rest;
        break;
      }
    }
  }
  return report;
}

/// Smallest M >= 0 with g_norm <= (delta/2) e^{M sigma0/2} (1 - e^{-sigma0/2}).
///
/// Harmonics |k| >= M then contribute at most delta on the strip of width sigma0/2.
inline int truncation_cutoff(double g_norm, double sigma0, double delta) {
  if (!(g_norm > 0.0) || !(sigma0 > 0.0) || !(delta > 0.0))
    throw Error(ErrorKind::InvalidArgument, "truncation_cutoff needs positive arguments");
  const double tail = -std::expm1(-0.5 * sigma0);
  const auto holds = [&](int m) {
    return g_norm <= 0.5 * delta * std::exp(0.5 * m * sigma0) * tail;
  };
  const double estimate = 2.0 / sigma0 * std::log(2.0 * g_norm / (delta * tail));
  int m = std::max(0, static_cast<int>(std::ceil(estimate)));
  while (m > 0 && holds(m - 1)) --m;
  while (!holds(m)) ++m;
  return m;
}

/// Harmonic cutoff for the inner solver; finite-support specs are used exactly.
inline int harmonic_cutoff(const PerturbationSpec& spec) { return spec.max_harmonic(); }

struct BezoutOrder {
  int p = 0;
  int q = 0;
  int k1 = 0;
  int k2 = 0;
  int n = 0;  // |k1| + |k2|
};

/// Integer solution of k1 p + k2 q = 1 minimizing |k1| + |k2| (ties: smaller |k1|).
inline BezoutOrder bezout_order(int p, int q) {
  if (p < 1 || q < 1) throw Error(ErrorKind::InvalidArgument, "p and q must be positive");
  if (std::gcd(p, q) != 1)
    throw Error(ErrorKind::NotCoprime,
                std::to_string(p) + " and " + std::to_string(q) + " are not coprime");

  // extended Euclid on (p, q)
  std::int64_t old_r = p, r = q, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    const std::int64_t quot = old_r / r;
    old_r = std::exchange(r, old_r - quot * r);
    old_s = std::exchange(s, old_s - quot * s);
    old_t = std::exchange(t, old_t - quot * t);
  }
  // general solution (old_s + j q, old_t - j p); |.|+|.| is convex in j with
  // its minimum between the roots -old_s/q and old_t/p
  const double root_a = -static_cast<double>(old_s) / q;
  const double root_b = static_cast<double>(old_t) / p;
  const auto lo = static_cast<std::int64_t>(std::floor(std::min(root_a, root_b))) - 1;
  const auto hi = static_cast<std::int64_t>(std::ceil(std::max(root_a, root_b))) + 1;

  BezoutOrder best{p, q, 0, 0, 0};
  bool have = false;
  for (std::int64_t j = lo; j <= hi; ++j) {
    const std::int64_t a = old_s + j * q;
    const std::int64_t b = old_t - j * p;
    const std::int64_t cost = std::abs(a) + std::abs(b);
    if (!have || cost < best.n || (cost == best.n && std::abs(a) < std::abs(best.k1))) {
      best.k1 = static_cast<int>(a);
      best.k2 = static_cast<int>(b);
      best.n = static_cast<int>(cost);
      have = true;
    }
  }
  return best;
}

}  // namespace splitsep
