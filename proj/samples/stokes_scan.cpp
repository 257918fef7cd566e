// Scan chi_2 for g = 20 cos 3t + 16 cos 2t and compare with the closed form.

#include <cstdio>
#include <vector>

#include "splitsep/splitsep.hpp"

int main() {
  using namespace splitsep;
  const auto spec = validate_spec({{3, {10.0, 0.0}}, {2, {8.0, 0.0}}});
  const std::vector<double> rho{4, 5, 6, 7, 8, 9, 10};
  SolverConfig cfg;
  cfg.workers = 4;
  const auto est = plateau_scan(spec, 2, rho, cfg);
  for (std::size_t i = 0; i < rho.size(); ++i)
    std::printf("rho = %4.1f   chi_2 ~ %.10f\n", rho[i], std::abs(est.estimates[i]));
  const cplx exact = chi2(spec).value;
  std::printf("plateau %.10f on [%g, %g], spread %.2e\n", est.plateau_value.real(), est.plateau_window.first,
              est.plateau_window.second, est.plateau_spread);
  std::printf("closed form %.10f\n", exact.real());
}
