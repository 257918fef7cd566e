#pragma once

// Explicit Runge-Kutta integrators over std::vector<V> states, V real or
// complex. The independent variable is real and may run in either direction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "splitsep/error.hpp"

namespace splitsep::ode {

struct Options {
  double rel_tol = 1e-12;
  double abs_tol = 1e-15;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 selects a starting step from the RHS scale
  long max_steps = 50'000'000;
};

struct Stats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
};

namespace detail {

// Dormand-Prince 8(5,3) coefficients (Hairer, Norsett & Wanner, DOP853).
namespace dp853 {
constexpr double c2 = 0.526001519587677318785587544488e-01;
constexpr double c3 = 0.789002279381515978178381316732e-01;
constexpr double c4 = 0.118350341907227396726757197510e+00;
constexpr double c5 = 0.281649658092772603273242802490e+00;
constexpr double c6 = 0.333333333333333333333333333333e+00;
constexpr double c7 = 0.25e+00;
constexpr double c8 = 0.307692307692307692307692307692e+00;
constexpr double c9 = 0.651282051282051282051282051282e+00;
constexpr double c10 = 0.6e+00;
constexpr double c11 = 0.857142857142857142857142857142e+00;

constexpr double a21 = 5.26001519587677318785587544488e-2;
constexpr double a31 = 1.97250569845378994544595329183e-2;
constexpr double a32 = 5.91751709536136983633785987549e-2;
constexpr double a41 = 2.95875854768068491816892993775e-2;
constexpr double a43 = 8.87627564304205475450678981324e-2;
constexpr double a51 = 2.41365134159266685502369798665e-1;
constexpr double a53 = -8.84549479328286085344864962717e-1;
constexpr double a54 = 9.24834003261792003115737966543e-1;
constexpr double a61 = 3.7037037037037037037037037037e-2;
constexpr double a64 = 1.70828608729473871279604482173e-1;
constexpr double a65 = 1.25467687566822425016691814123e-1;
constexpr double a71 = 3.7109375e-2;
constexpr double a74 = 1.70252211019544039314978060272e-1;
constexpr double a75 = 6.02165389804559606850219397283e-2;
constexpr double a76 = -1.7578125e-2;
constexpr double a81 = 3.70920001185047927108779319836e-2;
constexpr double a84 = 1.70383925712239993810214054705e-1;
constexpr double a85 = 1.07262030446373284651809199168e-1;
constexpr double a86 = -1.53194377486244017527936158236e-2;
constexpr double a87 = 8.27378916381402288758473766002e-3;
constexpr double a91 = 6.24110958716075717114429577812e-1;
constexpr double a94 = -3.36089262944694129406857109825e0;
constexpr double a95 = -8.68219346841726006818189891453e-1;
constexpr double a96 = 2.75920996994467083049415600797e1;
constexpr double a97 = 2.01540675504778934086186788979e1;
constexpr double a98 = -4.34898841810699588477366255144e1;
constexpr double a101 = 4.77662536438264365890433908527e-1;
constexpr double a104 = -2.48811461997166764192642586468e0;
constexpr double a105 = -5.90290826836842996371446475743e-1;
constexpr double a106 = 2.12300514481811942347288949897e1;
constexpr double a107 = 1.52792336328824235832596922938e1;
constexpr double a108 = -3.32882109689848629194453265587e1;
constexpr double a109 = -2.03312017085086261358222928593e-2;
constexpr double a111 = -9.3714243008598732571704021658e-1;
constexpr double a114 = 5.18637242884406370830023853209e0;
constexpr double a115 = 1.09143734899672957818500254654e0;
constexpr double a116 = -8.14978701074692612513997267357e0;
constexpr double a117 = -1.85200656599969598641566180701e1;
constexpr double a118 = 2.27394870993505042818970056734e1;
constexpr double a119 = 2.49360555267965238987089396762e0;
constexpr double a1110 = -3.0467644718982195003823669022e0;
constexpr double a121 = 2.27331014751653820792359768449e0;
constexpr double a124 = -1.05344954667372501984066689879e1;
constexpr double a125 = -2.00087205822486249909675718444e0;
constexpr double a126 = -1.79589318631187989172765950534e1;
constexpr double a127 = 2.79488845294199600508499808837e1;
constexpr double a128 = -2.85899827713502369474065508674e0;
constexpr double a129 = -8.87285693353062954433549289258e0;
constexpr double a1210 = 1.23605671757943030647266201528e1;
constexpr double a1211 = 6.43392746015763530355970484046e-1;

constexpr double b1 = 5.42937341165687622380535766363e-2;
constexpr double b6 = 4.45031289275240888144113950566e0;
constexpr double b7 = 1.89151789931450038304281599044e0;
constexpr double b8 = -5.8012039600105847814672114227e0;
constexpr double b9 = 3.1116436695781989440891606237e-1;
constexpr double b10 = -1.52160949662516078556178806805e-1;
constexpr double b11 = 2.01365400804030348374776537501e-1;
constexpr double b12 = 4.47106157277725905176885569043e-2;

constexpr double bhh1 = 0.244094488188976377952755905512e+00;
constexpr double bhh2 = 0.733846688281611857341361741547e+00;
constexpr double bhh3 = 0.220588235294117647058823529412e-01;

constexpr double er1 = 0.1312004499419488073250102996e-01;
constexpr double er6 = -0.1225156446376204440720569753e+01;
constexpr double er7 = -0.4957589496572501915214079952e+00;
constexpr double er8 = 0.1664377182454986536961530415e+01;
constexpr double er9 = -0.3503288487499736816886487290e+00;
constexpr double er10 = 0.3341791187130174790297318841e+00;
constexpr double er11 = 0.8192320648511571246570742613e-01;
constexpr double er12 = -0.2235530786388629525884427845e-01;
}  // namespace dp853

template <class V>
double max_abs(const std::vector<V>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, static_cast<double>(std::abs(x)));
  return m;
}

}  // namespace detail

/// Adaptive Dormand-Prince 8(5,3) from t0 to t1; y is advanced in place.
template <class V, class Rhs>
Stats integrate_dop853(Rhs&& rhs, double t0, double t1, std::vector<V>& y, const Options& opt) {
  using namespace detail::dp853;
  Stats stats;
  const std::size_t n = y.size();
  if (n == 0 || t0 == t1) return stats;
  if (!(opt.rel_tol > 0.0) || !(opt.abs_tol >= 0.0) || !(opt.max_step > 0.0))
    throw Error(ErrorKind::InvalidArgument, "ODE tolerances and max_step must be positive");

  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  std::vector<V> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), k8(n), k9(n), k10(n);
  std::vector<V> y1(n), yw(n);

  const auto f = [&](double t, const std::vector<V>& state, std::vector<V>& out) {
    rhs(t, state, out);
    ++stats.rhs_evals;
  };

  double t = t0;
  f(t, y, k1);

  double h = opt.initial_step;
  if (!(h > 0.0)) {
    const double d0 = detail::max_abs(y);
    const double d1 = detail::max_abs(k1);
    h = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * d0 / d1;
  }
  h = std::min({h, opt.max_step, span});

  const double safe = 0.9, facc1 = 1.0 / 0.333, facc2 = 1.0 / 6.0, expo = 1.0 / 8.0;
  bool last_rejected = false;

  while (dir * (t1 - t) > 0.0) {
    if (stats.accepted + stats.rejected >= opt.max_steps)
      throw Error(ErrorKind::StepSizeUnderflow, "step budget exhausted");
    const double remaining = std::abs(t1 - t);
    // stretch onto the endpoint rather than leave a sliver
    if (1.01 * h >= remaining) h = remaining;
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0))
      throw Error(ErrorKind::StepSizeUnderflow,
                  "step below roundoff at t=" + std::to_string(t));
    const double hs = dir * h;

    for (std::size_t i = 0; i < n; ++i) yw[i] = y[i] + hs * (a21 * k1[i]);
    f(t + c2 * hs, yw, k2);
    for (std::size_t i = 0; i < n; ++i) yw[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * hs, yw, k3);
    for (std::size_t i = 0; i < n; ++i) yw[i] = y[i] + hs * (a41 * k1[i] + a43 * k3[i]);
    f(t + c4 * hs, yw, k4);
    for (std::size_t i = 0; i < n; ++i)
      yw[i] = y[i] + hs * (a51 * k1[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * hs, yw, k5);
    for (std::size_t i = 0; i < n; ++i)
      yw[i] = y[i] + hs * (a61 * k1[i] + a64 * k4[i] + a65 * k5[i]);
    f(t + c6 * hs, yw, k6);
    for (std::size_t i = 0; i < n; ++i)
      yw[i] = y[i] + hs * (a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    f(t + c7 * hs, yw, k7);
    for (std::size_t i = 0; i < n; ++i)
      yw[i] = y[i] + hs * (a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] + a87 * k7[i]);
    f(t + c8 * hs, yw, k8);
    for (std::size_t i = 0; i < n; ++i)
      yw[i] = y[i] + hs * (a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] + a97 * k7[i] +
                           a98 * k8[i]);
    f(t + c9 * hs, yw, k9);
    for (std::size_t i = 0; i < n; ++i)
      yw[i] = y[i] + hs * (a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] +
                           a107 * k7[i] + a108 * k8[i] + a109 * k9[i]);
    f(t + c10 * hs, yw, k10);
    for (std::size_t i = 0; i < n; ++i)
      yw[i] = y[i] + hs * (a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] +
                           a117 * k7[i] + a118 * k8[i] + a119 * k9[i] + a1110 * k10[i]);
    f(t + c11 * hs, yw, k2);  // stage 11 reuses k2
    for (std::size_t i = 0; i < n; ++i)
      yw[i] = y[i] + hs * (a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] +
                           a127 * k7[i] + a128 * k8[i] + a129 * k9[i] + a1210 * k10[i] +
                           a1211 * k2[i]);
    const double t_new = (h == remaining) ? t1 : t + hs;
    f(t_new, yw, k3);  // stage 12 reuses k3
    for (std::size_t i = 0; i < n; ++i) {
      k4[i] = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] + b10 * k10[i] +
              b11 * k2[i] + b12 * k3[i];
      y1[i] = y[i] + hs * k4[i];
    }

    double err3 = 0.0, err5 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sk = opt.abs_tol + opt.rel_tol * std::max(static_cast<double>(std::abs(y[i])),
                                                             static_cast<double>(std::abs(y1[i])));
      const V e3 = k4[i] - bhh1 * k1[i] - bhh2 * k9[i] - bhh3 * k3[i];
      const V e5 = er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] + er9 * k9[i] +
                   er10 * k10[i] + er11 * k2[i] + er12 * k3[i];
      const double s3 = static_cast<double>(std::abs(e3)) / sk;
      const double s5 = static_cast<double>(std::abs(e5)) / sk;
      err3 += s3 * s3;
      err5 += s5 * s5;
    }
    double deno = err5 + 0.01 * err3;
    if (deno <= 0.0) deno = 1.0;
    const double err = h * err5 * std::sqrt(1.0 / (static_cast<double>(n) * deno));
    if (!std::isfinite(err))
      throw Error(ErrorKind::StepSizeUnderflow, "non-finite error estimate");

    const double fac11 = std::pow(err, expo);
    const double fac = std::max(facc2, std::min(facc1, fac11 / safe));
    double h_new = h / fac;

    if (err <= 1.0) {
      ++stats.accepted;
      f(t_new, y1, k1);  // FSAL
      y.swap(y1);
      t = t_new;
      h_new = std::min(h_new, opt.max_step);
      if (last_rejected) h_new = std::min(h_new, h);
      last_rejected = false;
    } else {
      ++stats.rejected;
      h_new = h / std::min(facc1, fac11 / safe);
      last_rejected = true;
    }
    h = h_new;
  }
  return stats;
}

/// Classical fourth-order Runge-Kutta with a fixed nominal step; the step is
/// shrunk uniformly so that an integer number of steps covers [t0, t1].
template <class V, class Rhs>
Stats integrate_rk4(Rhs&& rhs, double t0, double t1, std::vector<V>& y, double step) {
  Stats stats;
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidArgument, "fixed step must be positive");
  const std::size_t n = y.size();
  if (n == 0 || t0 == t1) return stats;
  const auto count = static_cast<long>(std::ceil(std::abs(t1 - t0) / step));
  const double h = (t1 - t0) / static_cast<double>(count);
  std::vector<V> k1(n), k2(n), k3(n), k4(n), yw(n);
  for (long s = 0; s < count; ++s) {
    const double t = t0 + static_cast<double>(s) * h;
    rhs(t, y, k1);
    for (std::size_t i = 0; i < n; ++i) yw[i] = y[i] + (0.5 * h) * k1[i];
    rhs(t + 0.5 * h, yw, k2);
    for (std::size_t i = 0; i < n; ++i) yw[i] = y[i] + (0.5 * h) * k2[i];
    rhs(t + 0.5 * h, yw, k3);
    for (std::size_t i = 0; i < n; ++i) yw[i] = y[i] + h * k3[i];
    rhs(t + h, yw, k4);
    for (std::size_t i = 0; i < n; ++i) y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    stats.rhs_evals += 4;
    ++stats.accepted;
  }
  return stats;
}

}  // namespace splitsep::ode
