// Orders and Stokes coefficients of A sin(p t) + B cos(q t) for small p, q.

#include <cstdio>
#include <numeric>

#include "splitsep/splitsep.hpp"

int main() {
  using namespace splitsep;
  for (int p = 1; p <= 5; ++p) {
    for (int q = 1; q <= 5; ++q) {
      if (p == q || std::gcd(p, q) != 1) continue;
      const auto b = bezout_order(p, q);
      if (b.n > 2) {
        std::printf("p=%d q=%d  n=%d  (k1, k2) = (%d, %d)\n", p, q, b.n, b.k1, b.k2);
        continue;
      }
      const auto rep = arnold_pipeline(p, q, 1.0, 1.0);
      std::printf("p=%d q=%d  n=%d  Theta = %+.12f %+.12fi\n", p, q, rep.n, splitsep::tidy(rep.theta.real()),
                  splitsep::tidy(rep.theta.imag()));
    }
  }
}
