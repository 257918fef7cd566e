#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "splitsep/melnikov.hpp"
#include "splitsep/splitting.hpp"

using namespace splitsep;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using std::numbers::pi;

namespace {

std::vector<PerturbationSpec> worked_specs() {
  return {validate_spec({{1, {0.5, 0}}}),
          validate_spec({{3, {10, 0}}, {2, {8, 0}}}),
          validate_spec({{5, {10, 0}}, {3, {8, 0}}}),
          validate_spec({{2, {0.5, 0}}, {3, {0.5, 0}}, {4, {-1, 0}}}),
          arnold_spec(2, 3, 1, 1)};
}

}  // namespace

TEST_CASE("homoclinic orbit", "[melnikov]") {
  const auto [x0, y0] = homoclinic(0.0);
  CHECK_THAT(x0, WithinRel(pi, 1e-15));
  CHECK_THAT(y0, WithinRel(2.0, 1e-15));
  const auto [x1, y1] = homoclinic(1.0);
  CHECK_THAT(x1, WithinRel(4 * std::atan(std::exp(1.0)), 1e-15));
  CHECK_THAT(y1, WithinRel(2 / std::cosh(1.0), 1e-15));
  const auto [xinf, yinf] = homoclinic(60.0);
  CHECK_THAT(xinf, WithinRel(2 * pi, 1e-15));
  CHECK(yinf < 1e-25);
  const auto [xm, ym] = homoclinic(-60.0);
  CHECK(xm < 1e-25);
  CHECK(ym < 1e-25);
}

TEST_CASE("closed form worked values", "[melnikov]") {
  const auto cos1 = validate_spec({{1, {0.5, 0}}});
  CHECK_THAT(melnikov_closed(cos1, 1.0, pi / 2).value, WithinRel(pi / std::sinh(pi / 2), 1e-14));
  CHECK_THAT(melnikov_closed(cos1, 1.0, pi / 2).value, WithinRel(1.3651389006617, 1e-12));
  CHECK_THAT(melnikov_closed(cos1, 1.0, 0.0).value, WithinAbs(0.0, 1e-15));
  const auto no_first = melnikov_closed(validate_spec({{3, {10, 0}}, {2, {8, 0}}}), 0.5, 0.7);
  CHECK(no_first.leading_term == 0.0);
  CHECK(no_first.value != 0.0);
  CHECK_THROWS_AS(melnikov_closed(cos1, 0.0, 0.0), Error);
}

TEST_CASE("stable 1/sinh at small epsilon", "[melnikov]") {
  const auto spec = validate_spec({{1, {0.5, 0}}, {7, {1, 1}}});
  const auto m = melnikov_closed(spec, 0.005, 1.0);
  CHECK(std::isfinite(m.value));
  CHECK(std::isfinite(m.leading_term));
  CHECK_THAT(detail::inv_sinh(800.0), WithinRel(2 * std::exp(-800.0), 1e-14));
  CHECK_THAT(detail::inv_sinh(0.5), WithinRel(1 / std::sinh(0.5), 1e-15));
}

TEST_CASE("quadrature oracle", "[melnikov][oracle]") {
  const auto cos1 = validate_spec({{1, {0.5, 0}}});
  for (double eps : {0.5, 1.0})
    for (double tau : {0.3, 1.7})
      CHECK_THAT(melnikov_quadrature(cos1, eps, tau), WithinRel(melnikov_closed(cos1, eps, tau).value, 1e-8));
  CHECK(melnikov_quadrature(cos1.scaled(0.0), 1.0, 0.4) == 0.0);
  const auto tt = validate_spec({{3, {10, 0}}, {2, {8, 0}}});
  CHECK_THAT(melnikov_quadrature(tt, 1.0, 1.0), WithinRel(melnikov_closed(tt, 1.0, 1.0).value, 1e-8));
  CHECK_THROWS_AS(melnikov_quadrature(cos1, 0.1, 0.0), Error);
}

TEST_CASE("closed form agrees with an independent Simpson rule", "[melnikov][oracle]") {
  const auto tt = validate_spec({{3, {10, 0}}, {2, {8, 0}}});
  const auto g = [](double t) { return 20 * std::cos(3 * t) + 16 * std::cos(2 * t); };
  for (double eps : {0.6, 1.5}) {
    const double ref = oracle::melnikov_simpson(g, eps, 0.9);
    CHECK_THAT(melnikov_closed(tt, eps, 0.9).value, WithinRel(ref, 1e-9));
  }
}

TEST_CASE("closed form and quadrature on a 5x5 grid", "[melnikov][property]") {
  for (const auto& spec : worked_specs())
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        const double eps = 0.5 + 1.5 * i / 4.0;
        const double tau = 2 * pi * j / 5.0 + 0.1;
        const auto c = melnikov_closed(spec, eps, tau);
        const double q = melnikov_quadrature(spec, eps, tau);
        CHECK(std::abs(c.value - q) <= 1e-8 * std::abs(c.value) + 1e-12);
        CHECK(std::abs(c.imag_residual) < 1e-12);
      }
}

TEST_CASE("periodic in tau", "[melnikov][property]") {
  const auto cos1 = validate_spec({{1, {0.5, 0}}});
  for (double eps : {0.5, 1.0, 2.0})
    for (double tau : {0.0, 1.1, 4.0}) {
      const double a = melnikov_closed(cos1, eps, tau).value, b = melnikov_closed(cos1, eps, tau + 2 * pi).value;
      CHECK(std::abs(a - b) < 1e-14);
    }
}

TEST_CASE("higher tiers fade as epsilon shrinks", "[melnikov][property]") {
  const auto spec = validate_spec({{1, {0.5, 0.2}}, {2, {0.3, 0}}, {3, {0, 0.4}}});
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {0.4, 0.3, 0.25, 0.2}) {
    const auto m = melnikov_closed(spec, eps, 0.8);
    const double r = std::abs(m.value - m.leading_term) / std::abs(m.leading_term);
    CHECK(r < prev);
    prev = r;
  }
  CHECK(prev < 5e-3);
}
