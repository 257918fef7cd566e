#include <catch_amalgamated.hpp>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "splitsep/harmonics.hpp"
#include "splitsep/splitting.hpp"

using namespace splitsep;
using Catch::Matchers::WithinAbs;

namespace {

PerturbationSpec two_three() { return validate_spec({{3, {10, 0}}, {2, {8, 0}}}); }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("validate_spec keeps positive harmonics", "[harmonics]") {
  const auto spec = two_three();
  CHECK(spec.coefficients().size() == 2);
  CHECK(spec[3] == cplx{10, 0});
  CHECK(spec[2] == cplx{8, 0});
  CHECK(spec[-3] == cplx{10, 0});
  CHECK(spec[1] == cplx{});
  CHECK(spec.max_harmonic() == 3);
  CHECK(spec.support() == HarmonicSet{-3, -2, 2, 3});
}

TEST_CASE("validate_spec rejects bad input", "[harmonics]") {
  CHECK(kind_of([] { validate_spec({{0, {1, 0}}}); }) == ErrorKind::ZeroMeanViolation);
  CHECK(kind_of([] { validate_spec({}); }) == ErrorKind::EmptySpec);
  CHECK(kind_of([] { validate_spec({{2, {1, 0}}, {2, {3, 0}}}); }) == ErrorKind::DuplicateHarmonic);
  CHECK(kind_of([] { validate_spec({{2, {1, 0}}, {4, {1, 0}}}); }) == ErrorKind::NonUnitGcd);
  CHECK(kind_of([] { validate_spec({{1, {1, 0}}}, -1.0); }) == ErrorKind::InvalidArgument);
  // only zero entries is the same as no entries
  CHECK(kind_of([] { validate_spec({{1, {0, 0}}}); }) == ErrorKind::EmptySpec);
}

TEST_CASE("negative indices fold by conjugation", "[harmonics]") {
  const auto spec = validate_spec({{-1, {0.5, 0.25}}});
  CHECK(spec[1] == cplx{0.5, -0.25});
  CHECK(kind_of([] { validate_spec({{-1, {1, 0}}, {1, {1, 0}}}); }) == ErrorKind::DuplicateHarmonic);
}

TEST_CASE("evaluate matches the cosine form", "[harmonics]") {
  const auto spec = two_three();
  for (double t : {0.0, 0.4, 1.3, 2.9})
    CHECK_THAT(spec.evaluate(t), WithinAbs(20 * std::cos(3 * t) + 16 * std::cos(2 * t), 1e-12));
}

TEST_CASE("sumset examples", "[harmonics]") {
  const HarmonicSet g1{-3, -2, 2, 3};
  CHECK(sumset(g1, g1) == HarmonicSet{-6, -5, -4, -1, 0, 1, 4, 5, 6});
  CHECK(sumset({}, g1).empty());
  const HarmonicSet h1{-5, -3, 3, 5};
  CHECK(sumset(h1, h1) == HarmonicSet{-10, -8, -6, -2, 0, 2, 6, 8, 10});
}

TEST_CASE("degeneracy order of worked examples", "[harmonics]") {
  const auto rep = degeneracy_order(two_three());
  CHECK(rep.order_n == 2);
  CHECK(rep.witness == std::vector<int>{-2, 3});
  CHECK(degeneracy_order(validate_spec({{1, {0.5, 0}}})).order_n == 1);
  CHECK(degeneracy_order(validate_spec({{5, {10, 0}}, {3, {8, 0}}})).order_n == 3);
  CHECK(degeneracy_order(validate_spec({{5, {0.5, 0}}, {4, {0.5, 0}}, {3, {0.5, 0}}})).order_n == 2);
  CHECK(kind_of([] { degeneracy_order(validate_spec({{5, {1, 0}}, {3, {1, 0}}}), 2); }) ==
        ErrorKind::OrderExceedsBound);
}

TEST_CASE("sumsets agree with tuple enumeration", "[harmonics][property]") {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 60; ++trial) {
    const auto raw = oracle::random_spec(rng, 9, 3);
    const auto spec = validate_spec(raw.entries);
    const auto g1 = spec.support();
    const int n_ref = oracle::brute_order(g1, 8);
    REQUIRE(n_ref > 0);
    const auto rep = degeneracy_order(spec);
    CHECK(rep.order_n == n_ref);
    for (int l = 1; l <= rep.order_n; ++l) {
      const auto& G = rep.G(l);
      CHECK(G == oracle::tuple_sums(g1, l));
      for (int k : G) CHECK(G.contains(-k));
      if (l + 2 <= rep.order_n) CHECK(std::includes(rep.G(l + 2).begin(), rep.G(l + 2).end(), G.begin(), G.end()));
    }
    // witness: n elements of G_1 summing to 1, lexicographically smallest
    CHECK(static_cast<int>(rep.witness.size()) == rep.order_n);
    CHECK(std::accumulate(rep.witness.begin(), rep.witness.end(), 0) == 1);
    for (int m : rep.witness) CHECK(g1.contains(m));
  }
}

TEST_CASE("witness is the lexicographically smallest decomposition", "[harmonics]") {
  const auto spec = validate_spec({{5, {1, 0}}, {4, {1, 0}}, {3, {1, 0}}});
  const auto rep = degeneracy_order(spec);
  const HarmonicSet support = spec.support();
  const std::vector<int> g1(support.begin(), support.end());
  std::vector<int> best;
  for (int a : g1)
    for (int b : g1)
      if (a + b == 1 && (best.empty() || std::vector<int>{a, b} < best)) best = {a, b};
  CHECK(rep.witness == best);
}

TEST_CASE("truncation cutoff is the smallest admissible M", "[harmonics]") {
  const auto holds = [](double gn, double s0, double d, int m) {
    return gn <= 0.5 * d * std::exp(0.5 * m * s0) * (1.0 - std::exp(-0.5 * s0));
  };
  int m_ref = 0;
  while (!holds(1.0, 1.0, 0.01, m_ref)) ++m_ref;
  CHECK(truncation_cutoff(1.0, 1.0, 0.01) == m_ref);
  CHECK(m_ref == 13);
  CHECK(truncation_cutoff(1.0, 1.0, 2.0 / (1.0 - std::exp(-0.5))) == 0);
  for (double gn : {0.1, 1.0, 50.0})
    for (double s0 : {0.3, 1.0, 2.5})
      for (double d : {1e-12, 1e-6, 1e-2}) {
        const int m = truncation_cutoff(gn, s0, d);
        CHECK(holds(gn, s0, d, m));
        if (m > 0) CHECK_FALSE(holds(gn, s0, d, m - 1));
      }
  CHECK(harmonic_cutoff(two_three()) == 3);
}

TEST_CASE("bezout order examples", "[harmonics]") {
  const auto b23 = bezout_order(2, 3);
  CHECK(b23.k1 == -1);
  CHECK(b23.k2 == 1);
  CHECK(b23.n == 2);
  const auto b1 = bezout_order(1, 7);
  CHECK(b1.k1 == 1);
  CHECK(b1.k2 == 0);
  CHECK(b1.n == 1);
  const auto b35 = bezout_order(3, 5);
  CHECK(b35.k1 == 2);
  CHECK(b35.k2 == -1);
  CHECK(b35.n == 3);
  CHECK(kind_of([] { bezout_order(4, 6); }) == ErrorKind::NotCoprime);
  CHECK(kind_of([] { bezout_order(0, 3); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("bezout order matches brute force and sumsets", "[harmonics][property]") {
  for (int p = 1; p <= 12; ++p)
    for (int q = 1; q <= 12; ++q) {
      if (std::gcd(p, q) != 1) continue;
      const auto b = bezout_order(p, q);
      CHECK(b.k1 * p + b.k2 * q == 1);
      CHECK(b.n == oracle::brute_bezout(p, q));
      if (p >= 2 && q >= 2) CHECK(degeneracy_order(arnold_spec(p, q, 1.0, 1.0)).order_n == b.n);
    }
}
