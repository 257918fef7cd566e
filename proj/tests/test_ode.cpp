#include <catch_amalgamated.hpp>

#include <complex>
#include <vector>

#include "splitsep/ode.hpp"

using namespace splitsep;
using cplx = std::complex<double>;

namespace {

// y' = i w y, y(0) = 1
auto rotation(double w) {
  return [w](double, const std::vector<cplx>& y, std::vector<cplx>& dy) { dy[0] = cplx{0, w} * y[0]; };
}

}  // namespace

TEST_CASE("dop853 integrates an oscillator to tolerance", "[ode]") {
  for (double rtol : {1e-8, 1e-11, 1e-13}) {
    std::vector<cplx> y{1.0};
    ode::Options opt;
    opt.rel_tol = rtol;
    opt.abs_tol = rtol * 1e-3;
    const auto stats = ode::integrate_dop853(rotation(3.0), 0.0, 20.0, y, opt);
    CHECK(stats.accepted > 0);
    CHECK(std::abs(y[0] - std::polar(1.0, 60.0)) < 500 * rtol);
  }
}

TEST_CASE("dop853 runs backwards and respects max_step", "[ode]") {
  std::vector<cplx> y{std::polar(1.0, 6.0)};
  ode::Options opt;
  opt.max_step = 0.05;
  const auto stats = ode::integrate_dop853(rotation(1.0), 6.0, 0.0, y, opt);
  CHECK(stats.accepted >= 120);
  CHECK(std::abs(y[0] - 1.0) < 1e-11);
}

TEST_CASE("dop853 matches a nonautonomous exact solution", "[ode]") {
  // y' = -2 t y, y = exp(-t^2)
  std::vector<double> y{1.0};
  const auto rhs = [](double t, const std::vector<double>& v, std::vector<double>& dv) { dv[0] = -2 * t * v[0]; };
  ode::integrate_dop853(rhs, 0.0, 2.5, y, ode::Options{});
  CHECK(std::abs(y[0] - std::exp(-6.25)) < 1e-13);
}

TEST_CASE("dop853 reports blow-up as step underflow", "[ode]") {
  std::vector<double> y{1.0};
  const auto rhs = [](double, const std::vector<double>& v, std::vector<double>& dv) { dv[0] = v[0] * v[0]; };
  try {
    ode::integrate_dop853(rhs, 0.0, 2.0, y, ode::Options{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::StepSizeUnderflow);
  }
}

TEST_CASE("rk4 is fourth order and deterministic", "[ode]") {
  const auto err = [](double h) {
    std::vector<cplx> y{1.0};
    ode::integrate_rk4(rotation(2.0), 0.0, 5.0, y, h);
    return std::abs(y[0] - std::polar(1.0, 10.0));
  };
  const double ratio = err(0.02) / err(0.01);
  CHECK(ratio > 14.0);
  CHECK(ratio < 18.0);

  std::vector<cplx> a{1.0}, b{1.0};
  ode::integrate_rk4(rotation(2.0), 0.0, 5.0, a, 0.013);
  ode::integrate_rk4(rotation(2.0), 0.0, 5.0, b, 0.013);
  CHECK(a[0] == b[0]);
  CHECK_THROWS_AS(ode::integrate_rk4(rotation(2.0), 0.0, 1.0, a, 0.0), Error);
}
