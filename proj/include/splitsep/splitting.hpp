#pragma once

// Leading term of the separatrix splitting
//
//   d_u Delta = (2 e^{-pi/(2eps)} / eps^2) [ Im(chi_n mu^n e^{i(tau - u/eps)}) + ... ]
//
// and the reduced Arnold model g = A sin(p tau) + B cos(q tau).

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "splitsep/error.hpp"
#include "splitsep/harmonics.hpp"
#include "splitsep/inner_solver.hpp"
#include "splitsep/stokes_analytic.hpp"

namespace splitsep {

/// Remainder magnitudes with all O(.) constants set to one. They indicate
/// scale only; they are not bounds.
struct ErrorBudget {
  double next_mu_order = 0.0;       // (2 e^{-pi/2eps}/eps^2) mu^{n+1}
  double second_exponential = 0.0;  // (2/eps^2) mu e^{-pi/eps}
  double log_correction = 0.0;      // (2 e^{-pi/2eps}/eps^2) mu^n / ln(1/eps)
};

struct SplittingEval {
  double mu = 0.0;
  double epsilon = 0.0;
  double u = 0.0;
  double tau = 0.0;
  int n = 0;
  cplx chi_n{};
  double leading = 0.0;
  ErrorBudget error_budget;
};

inline SplittingEval splitting_leading(cplx chi_n, int n, double mu, double epsilon, double u,
                                       double tau) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "order must be >= 1");
  if (!(mu >= 0.0 && mu < 1.0)) throw Error(ErrorKind::InvalidArgument, "mu must lie in [0, 1)");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw Error(ErrorKind::InvalidArgument, "epsilon must lie in (0, 1)");
  using std::numbers::pi;
  SplittingEval out{mu, epsilon, u, tau, n, chi_n, 0.0, {}};
  const double decay = std::exp(-pi / (2.0 * epsilon));
  const double pref = 2.0 * decay / (epsilon * epsilon);
  const double mu_n = std::pow(mu, n);
  out.leading = pref * std::imag(chi_n * mu_n * std::polar(1.0, tau - u / epsilon));
  out.error_budget.next_mu_order = pref * mu_n * mu;
  out.error_budget.second_exponential = 2.0 / (epsilon * epsilon) * mu * decay * decay;
  out.error_budget.log_correction = pref * mu_n / std::log(1.0 / epsilon);
  return out;
}

enum class Dominance { asymptotic_valid, degenerate };

constexpr const char* to_string(Dominance d) noexcept {
  return d == Dominance::asymptotic_valid ? "asymptotic_valid" : "degenerate";
}

/// Compares the amplitude of the leading term, (2e^{-pi/2eps}/eps^2)|chi_n| mu^n,
/// against each budget entry. The phase of a particular (u, tau) is ignored so
/// that zero crossings of the sine are not reported as degeneracy.
inline Dominance dominance_check(const SplittingEval& eval, double factor = 10.0) {
  if (eval.chi_n == cplx{}) return Dominance::degenerate;
  using std::numbers::pi;
  const double pref = 2.0 * std::exp(-pi / (2.0 * eval.epsilon)) / (eval.epsilon * eval.epsilon);
  const double amplitude = pref * std::abs(eval.chi_n) * std::pow(eval.mu, eval.n);
  const auto& b = eval.error_budget;
  for (double entry : {b.next_mu_order, b.second_exponential, b.log_correction})
    if (!(amplitude > factor * entry)) return Dominance::degenerate;
  return Dominance::asymptotic_valid;
}

struct ArnoldOptions {
  SolverConfig solver;
  std::vector<double> rho_grid{4, 5, 6, 7, 8, 9, 10};
  PlateauOptions plateau;
  double mu = 0.05;
  double epsilon = 0.1;
  int tau_samples = 8;  // splitting samples at u = 0, tau = 2 pi s / tau_samples
};

struct ArnoldReport {
  int p = 0, q = 0;
  double A = 0.0, B = 0.0;
  int n = 0;
  cplx theta{};
  StokesCoefficient chi;
  std::vector<SplittingEval> samples;
};

/// g = A sin(p tau) + B cos(q tau); g^[p] = -iA/2, g^[q] = B/2.
inline PerturbationSpec arnold_spec(int p, int q, double A, double B) {
  if (p < 1 || q < 1) throw Error(ErrorKind::InvalidArgument, "p and q must be positive");
  if (p == q) {
    if (p != 1) throw Error(ErrorKind::NotCoprime, "p = q > 1 is not coprime");
    return validate_spec({{1, cplx{B / 2.0, -A / 2.0}}});
  }
  return validate_spec({{p, cplx{0.0, -A / 2.0}}, {q, cplx{B / 2.0, 0.0}}});
}

/// Order, Stokes coefficient and Theta = 2 chi_n for the reduced Arnold model.
inline ArnoldReport arnold_pipeline(int p, int q, double A, double B, const ArnoldOptions& opt = {}) {
  const BezoutOrder bez = bezout_order(p, q);
  ArnoldReport report{p, q, A, B, bez.n, {}, {}, {}};
  if (A == 0.0 || B == 0.0)
    throw Error(ErrorKind::InvalidArgument, "A and B must both be nonzero");
  const PerturbationSpec spec = arnold_spec(p, q, A, B);
  const int n_sumset = degeneracy_order(spec).order_n;
  if (n_sumset != bez.n)
    throw Error(ErrorKind::OrderMismatch, "Bezout order " + std::to_string(bez.n) +
                                              " but sumset order " + std::to_string(n_sumset));
  if (bez.n == 1) {
    report.chi = chi1(spec);
  } else if (bez.n == 2) {
    report.chi = chi2(spec);
  } else {
    const StokesEstimate est = plateau_scan(spec, bez.n, opt.rho_grid, opt.solver, opt.plateau);
    report.chi = {bez.n, est.plateau_value, Provenance::numeric_plateau};
  }
  report.theta = 2.0 * report.chi.value;
  for (int s = 0; s < opt.tau_samples; ++s) {
    const double tau = 2.0 * std::numbers::pi * s / opt.tau_samples;
    report.samples.push_back(splitting_leading(report.chi.value, bez.n, opt.mu, opt.epsilon, 0.0, tau));
  }
  return report;
}

}  // namespace splitsep
