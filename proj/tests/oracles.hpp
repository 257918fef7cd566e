#pragma once

// Independent reference computations shared by the unit and acceptance tests.
// Nothing here calls into the library code it is used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

/// {m_1 + ... + m_l : m_i in g1} by enumerating every l-tuple.
inline std::set<int> tuple_sums(const std::set<int>& g1, int l) {
  const std::vector<int> base(g1.begin(), g1.end());
  std::set<int> out;
  if (base.empty()) return out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(l), 0);
  while (true) {
    int s = 0;
    for (auto i : idx) s += base[i];
    out.insert(s);
    std::size_t pos = 0;
    while (pos < idx.size() && ++idx[pos] == base.size()) idx[pos++] = 0;
    if (pos == idx.size()) break;
  }
  return out;
}

/// Smallest l with 1 in tuple_sums(g1, l), or 0 if none up to max_l.
inline int brute_order(const std::set<int>& g1, int max_l) {
  for (int l = 1; l <= max_l; ++l)
    if (tuple_sums(g1, l).contains(1)) return l;
  return 0;
}

/// min |k1| + |k2| over k1 p + k2 q = 1 with |k1|, |k2| <= p + q.
inline int brute_bezout(int p, int q) {
  int best = -1;
  for (int a = -(p + q); a <= p + q; ++a)
    for (int b = -(p + q); b <= p + q; ++b)
      if (a * p + b * q == 1 && (best < 0 || std::abs(a) + std::abs(b) < best)) best = std::abs(a) + std::abs(b);
  return best;
}

/// Positive harmonics with random complex coefficients; gcd of the support is 1.
struct RandomSpec {
  std::vector<std::pair<int, cplx>> entries;
};

inline RandomSpec random_spec(std::mt19937_64& rng, int max_k, int max_terms) {
  std::uniform_int_distribution<int> kdist(1, max_k), ndist(1, max_terms);
  std::uniform_real_distribution<double> vdist(-2.0, 2.0);
  while (true) {
    std::set<int> ks;
    const int n = ndist(rng);
    while (static_cast<int>(ks.size()) < n) ks.insert(kdist(rng));
    int g = 0;
    for (int k : ks) g = std::gcd(g, k);
    if (g != 1) continue;
    RandomSpec s;
    for (int k : ks) s.entries.emplace_back(k, cplx{vdist(rng), vdist(rng)});
    return s;
  }
}

/// (G^2)^[1] by sampling the zero-mean primitive G on a uniform grid and
/// taking the first discrete Fourier coefficient of G^2.
inline cplx g_squared_first_harmonic_sampled(const std::vector<std::pair<int, cplx>>& entries) {
  int kmax = 1;
  for (const auto& e : entries) kmax = std::max(kmax, e.first);
  const int samples = 8 * kmax + 16;  // G^2 has harmonics up to 2 kmax
  cplx acc{};
  for (int s = 0; s < samples; ++s) {
    const double t = 2.0 * std::numbers::pi * s / samples;
    double G = 0.0;
    for (const auto& [k, gk] : entries) {
      // g^[k] e^{ikt} / (ik) plus its conjugate
      const cplx term = gk * std::polar(1.0, k * t) / cplx{0.0, static_cast<double>(k)};
      G += 2.0 * term.real();
    }
    acc += G * G * std::polar(1.0, -t);
  }
  return acc / static_cast<double>(samples);
}

/// Composite Simpson rule for -int 2 sinh r / cosh^3 r g(tau + r/eps) dr on [-L, L].
template <class G>
double melnikov_simpson(G&& g, double eps, double tau, double L = 25.0, int intervals = 400000) {
  const double h = 2.0 * L / intervals;
  const auto f = [&](double r) {
    const double c = std::cosh(r);
    return -2.0 * std::sinh(r) / (c * c * c) * g(tau + r / eps);
  };
  double s = f(-L) + f(L);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(-L + i * h);
  return s * h / 3.0;
}

inline double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace oracle
