#pragma once

// Numerical Stokes coefficients from the inner equation
//
//   d_tau psi + d_z psi = (1/8) z^2 (d_z psi)^2 - 2 mu g(tau) / z^2.
//
// Expanding psi = sum_j mu^j sum_k psi_j^[k](z) e^{ik tau} gives, per mode,
//
//   d_z psi_1^[k] = -ik psi_1^[k] - 2 g^[k] / z^2
//   d_z psi_j^[k] = -ik psi_j^[k] + (1/8) z^2 sum_{l<j} sum_m d_z psi_l^[m] d_z psi_{j-l}^[k-m]
//
// The branches psi^+ and psi^- are fixed by decay as Re z -> +inf and -inf.
// Each is seeded from its asymptotic 1/z expansion at z0 = +-R - i rho and
// integrated along Im z = -rho to z = -i rho. The coefficient chi_n is the
// limit of e^rho (psi_n^-[1] - psi_n^+[1])(-i rho) as rho grows.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "splitsep/error.hpp"
#include "splitsep/harmonics.hpp"
#include "splitsep/inverse_series.hpp"
#include "splitsep/ode.hpp"

namespace splitsep {

using Series = InverseZSeries<cplx>;

struct ModeIndex {
  int order = 0;
  int harmonic = 0;
  friend auto operator<=>(const ModeIndex&, const ModeIndex&) = default;
};

enum class ModeSelection {
  support,    // k in G_j only
  full_band,  // every |k| <= n K, for checking that modes outside G_j stay zero
};

enum class DerivativeScheme {
  algebraic,     // d_z psi recovered from the mode equations
  explicit_ode,  // d_z psi_1, d_z^2 psi_1 and d_z psi_2 co-integrated (n <= 3)
};

enum class Branch { plus, minus };

/// Enumeration of the (order, harmonic) pairs carried by the solver.
class ModeLayout {
 public:
  ModeLayout(const PerturbationSpec& spec, int max_order,
             ModeSelection selection = ModeSelection::support)
      : max_order_(max_order), band_(spec.max_harmonic()) {
    if (max_order < 1) throw Error(ErrorKind::InvalidArgument, "max_order must be >= 1");
    HarmonicSet g = spec.support();
    const HarmonicSet g1 = g;
    for (int j = 1; j <= max_order; ++j) {
      if (j > 1) g = sumset(g, g1);
      std::vector<int> hs;
      if (selection == ModeSelection::support) {
        hs.assign(g.begin(), g.end());
      } else {
        for (int k = -max_order * band_; k <= max_order * band_; ++k) hs.push_back(k);
      }
      g_sets_.push_back(g);
      offsets_.push_back(modes_.size());
      for (int k : hs) modes_.push_back({j, k});
      harmonics_.push_back(std::move(hs));
    }
  }

  int max_order() const noexcept { return max_order_; }
  /// Largest harmonic of g.
  int band() const noexcept { return band_; }
  std::size_t size() const noexcept { return modes_.size(); }
  std::span<const ModeIndex> modes() const noexcept { return modes_; }
  const ModeIndex& mode(std::size_t idx) const { return modes_.at(idx); }
  const std::vector<int>& harmonics(int j) const { return harmonics_.at(static_cast<std::size_t>(j - 1)); }
  const HarmonicSet& G(int j) const { return g_sets_.at(static_cast<std::size_t>(j - 1)); }

  std::optional<std::size_t> find(int j, int k) const {
    if (j < 1 || j > max_order_) return std::nullopt;
    const auto& hs = harmonics(j);
    const auto it = std::lower_bound(hs.begin(), hs.end(), k);
    if (it == hs.end() || *it != k) return std::nullopt;
    return offsets_[static_cast<std::size_t>(j - 1)] + static_cast<std::size_t>(it - hs.begin());
  }

  std::size_t index(int j, int k) const {
    if (auto idx = find(j, k)) return *idx;
    throw Error(ErrorKind::MissingMode,
                "mode (" + std::to_string(j) + "," + std::to_string(k) + ") not in layout");
  }

 private:
  int max_order_;
  int band_;
  std::vector<ModeIndex> modes_;
  std::vector<std::vector<int>> harmonics_;
  std::vector<HarmonicSet> g_sets_;
  std::vector<std::size_t> offsets_;
};

/// Mode values psi_j^[k](z) at one point of the integration path.
struct InnerState {
  cplx z{};
  std::shared_ptr<const ModeLayout> layout;
  std::vector<cplx> values;

  /// psi_j^[k]; throws MissingMode if the pair is not carried.
  cplx at(int j, int k) const { return values.at(layout->index(j, k)); }
  /// psi_j^[k], zero for pairs outside the layout.
  cplx value_or_zero(int j, int k) const {
    const auto idx = layout->find(j, k);
    return idx ? values[*idx] : cplx{};
  }
};

struct SolverConfig {
  int series_order = 20;  // N
  double re_z0 = 40.0;    // R
  double rel_tol = 1e-12;
  double abs_tol = 1e-15;
  double max_step = std::numeric_limits<double>::infinity();
  std::optional<double> fixed_step;  // classical RK4 with this step instead of DOP853
  DerivativeScheme derivatives = DerivativeScheme::algebraic;
  ModeSelection modes = ModeSelection::support;
  int workers = 1;  // concurrent grid points in plateau_scan

  void validate() const {
    if (series_order < 4) throw Error(ErrorKind::InvalidArgument, "series order must be >= 4");
    if (!(re_z0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "Re(z0) must be positive");
    if (!(rel_tol > 0.0 && rel_tol <= 1e-6) || !(abs_tol > 0.0 && abs_tol <= 1e-6))
      throw Error(ErrorKind::InvalidArgument, "ODE tolerances must lie in (0, 1e-6]");
    if (!(max_step > 0.0)) throw Error(ErrorKind::InvalidArgument, "max_step must be positive");
    if (fixed_step && !(*fixed_step > 0.0))
      throw Error(ErrorKind::InvalidArgument, "fixed step must be positive");
    if (workers < 1) throw Error(ErrorKind::InvalidArgument, "workers must be >= 1");
  }
};

// ---------------------------------------------------------------------------
// Asymptotic seeds

/// Formal solution f = sum_{l=1}^N f_l z^{-l} of ik f + f' = h, h given as a 1/z series.
///
/// For k != 0 the coefficients follow ik f_l = h_l + (l-1) f_{l-1}. For k = 0
/// f is the decaying antiderivative, f_l = -h_{l+1}/l, and h_1 must vanish.
/// The same coefficients serve both branches; only the evaluation point differs.
template <class T>
InverseZSeries<T> seed_series(int /*order*/, int k, const InverseZSeries<T>& rhs) {
  const int n = rhs.order();
  InverseZSeries<T> f(n);
  if (rhs.coeff(0) != T{})
    throw Error(ErrorKind::InvalidArgument, "right-hand side must vanish at infinity");
  if (k == 0) {
    if (rhs.coeff(1) != T{})
      throw Error(ErrorKind::NonDecayingAverage, "k=0 right-hand side has a 1/z term");
    for (int l = 1; l < n; ++l) f[l] = -rhs.coeff(l + 1) / static_cast<double>(l);
    return f;
  }
  const T ik = T(0, 1) * static_cast<double>(k);
  for (int l = 1; l <= n; ++l) f[l] = (rhs.coeff(l) + static_cast<double>(l - 1) * f[l - 1]) / ik;
  return f;
}

/// -2 g^[k] / z^2, the order-one forcing.
inline cplx rhs_order1(const PerturbationSpec& spec, int k, cplx z) {
  if (z == cplx{}) throw Error(ErrorKind::InvalidArgument, "z = 0 is singular");
  return -2.0 * spec[k] / (z * z);
}

/// Seed series of every mode in layout order, truncated at N.
inline std::vector<Series> seed_all(const PerturbationSpec& spec, const ModeLayout& layout,
                                    int n_terms) {
  std::vector<Series> seeds(layout.size());
  std::vector<Series> derivs(layout.size());
  for (std::size_t idx = 0; idx < layout.size(); ++idx) {
    const auto [j, k] = layout.mode(idx);
    Series rhs(n_terms);
    if (j == 1) {
      rhs = Series::monomial(2, -2.0 * spec[k], n_terms);
    } else {
      std::optional<Series> acc;
      for (int l = 1; l < j; ++l) {
        for (int m : layout.harmonics(l)) {
          const auto other = layout.find(j - l, k - m);
          if (!other) continue;
          Series term = derivs[layout.index(l, m)] * derivs[*other];
          acc = acc ? *acc + term : term;
        }
      }
      if (acc) rhs = (acc->times_z_pow(2) * 0.125).truncated(n_terms);
    }
    seeds[idx] = seed_series(j, k, rhs);
    derivs[idx] = seeds[idx].derivative();
  }
  return seeds;
}

// ---------------------------------------------------------------------------
// Right-hand sides

namespace detail {

/// Precomputed index pairs of the quadratic couplings.
struct ConvolutionPlan {
  // for mode idx: pairs [begin[idx], begin[idx+1]) of (a, b) with
  // d_z psi[a] * d_z psi[b] contributing to mode idx
  std::vector<std::size_t> begin;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;

  explicit ConvolutionPlan(const ModeLayout& layout) {
    begin.reserve(layout.size() + 1);
    for (std::size_t idx = 0; idx < layout.size(); ++idx) {
      begin.push_back(pairs.size());
      const auto [j, k] = layout.mode(idx);
      for (int l = 1; l < j; ++l)
        for (int m : layout.harmonics(l))
          if (const auto other = layout.find(j - l, k - m))
            pairs.emplace_back(layout.index(l, m), *other);
    }
    begin.push_back(pairs.size());
  }
};

}  // namespace detail

/// The coupled mode system with algebraic derivative recovery.
///
/// Modes are stored by increasing order, so one forward sweep computes every
/// d_z psi_j^[k] from the values at z and the already recovered lower orders.
class InnerSystem {
 public:
  InnerSystem(const PerturbationSpec& spec, std::shared_ptr<const ModeLayout> layout)
      : layout_(std::move(layout)), plan_(*layout_) {
    forcing_.reserve(layout_->size());
    ik_.reserve(layout_->size());
    for (const auto& [j, k] : layout_->modes()) {
      forcing_.push_back(j == 1 ? -2.0 * spec[k] : cplx{});
      ik_.push_back(cplx{0.0, static_cast<double>(k)});
    }
  }

  const ModeLayout& layout() const noexcept { return *layout_; }

  /// out[idx] = d_z psi at z for every mode.
  void derivatives(cplx z, std::span<const cplx> psi, std::span<cplx> out) const {
    const cplx inv_z2 = 1.0 / (z * z);
    const cplx quad = 0.125 * z * z;
    for (std::size_t idx = 0; idx < psi.size(); ++idx) {
      cplx h = forcing_[idx] * inv_z2;
      const std::size_t b = plan_.begin[idx], e = plan_.begin[idx + 1];
      if (b != e) {
        cplx acc{};
        for (std::size_t p = b; p < e; ++p) acc += out[plan_.pairs[p].first] * out[plan_.pairs[p].second];
        h += quad * acc;
      }
      out[idx] = h - ik_[idx] * psi[idx];
    }
  }

 private:
  std::shared_ptr<const ModeLayout> layout_;
  detail::ConvolutionPlan plan_;
  std::vector<cplx> forcing_;
  std::vector<cplx> ik_;
};

inline cplx derivative_recover(const PerturbationSpec& spec, int j, int k, const InnerState& state);

/// (1/8) z^2 sum_{l<j} sum_m d_z psi_l^[m] d_z psi_{j-l}^[k-m], for j > 1.
inline cplx rhs_convolution(const PerturbationSpec& spec, int j, int k, const InnerState& state) {
  if (j < 2) throw Error(ErrorKind::InvalidArgument, "convolution forcing starts at order 2");
  if (j > state.layout->max_order())
    throw Error(ErrorKind::MissingMode, "state lacks order " + std::to_string(j - 1));
  cplx acc{};
  for (int l = 1; l < j; ++l)
    for (int m : state.layout->harmonics(l))
      if (state.layout->find(j - l, k - m))
        acc += derivative_recover(spec, l, m, state) * derivative_recover(spec, j - l, k - m, state);
  return 0.125 * state.z * state.z * acc;
}

/// d_z psi_j^[k] = h_j^[k](z) - ik psi_j^[k](z).
inline cplx derivative_recover(const PerturbationSpec& spec, int j, int k, const InnerState& state) {
  const cplx psi = state.at(j, k);
  const cplx h = j == 1 ? rhs_order1(spec, k, state.z) : rhs_convolution(spec, j, k, state);
  return h - cplx{0.0, static_cast<double>(k)} * psi;
}

namespace detail {

/// Mode system that co-integrates d_z psi_1, d_z^2 psi_1 and d_z psi_2 through
/// their own differential equations instead of recovering them algebraically.
class ExplicitDerivativeSystem {
 public:
  ExplicitDerivativeSystem(const PerturbationSpec& spec, std::shared_ptr<const ModeLayout> layout)
      : layout_(std::move(layout)) {
    const int n = layout_->max_order();
    if (n > 3) throw Error(ErrorKind::InvalidArgument, "explicit derivative scheme supports n <= 3");
    const auto& h1 = layout_->harmonics(1);
    n_psi_ = layout_->size();
    n_h1_ = h1.size();
    n_h2_ = n >= 2 ? layout_->harmonics(2).size() : 0;
    offset2_ = n >= 2 ? layout_->index(2, layout_->harmonics(2).front()) : 0;
    for (int k : h1) g_.push_back(spec[k]);
  }

  std::size_t size() const noexcept { return n_psi_ + 2 * n_h1_ + (layout_->max_order() >= 3 ? n_h2_ : 0); }

  std::vector<cplx> initial_values(const std::vector<Series>& seeds, cplx z0) const {
    std::vector<cplx> y(size());
    for (std::size_t i = 0; i < n_psi_; ++i) y[i] = seeds[i].evaluate(z0);
    const auto& h1 = layout_->harmonics(1);
    for (std::size_t i = 0; i < n_h1_; ++i) {
      const Series d = seeds[layout_->index(1, h1[i])].derivative();
      y[d1_at(i)] = d.evaluate(z0);
      y[d11_at(i)] = d.derivative().evaluate(z0);
    }
    if (layout_->max_order() >= 3) {
      const auto& h2 = layout_->harmonics(2);
      for (std::size_t i = 0; i < n_h2_; ++i)
        y[d2_at(i)] = seeds[layout_->index(2, h2[i])].derivative().evaluate(z0);
    }
    return y;
  }

  void rhs(cplx z, std::span<const cplx> y, std::span<cplx> out) const {
    const auto& h1 = layout_->harmonics(1);
    const cplx iz = 1.0 / z;
    const auto ik = [](int k) { return cplx{0.0, static_cast<double>(k)}; };
    for (std::size_t i = 0; i < n_h1_; ++i) {
      const int k = h1[i];
      out[d1_at(i)] = -ik(k) * y[d1_at(i)] + 4.0 * g_[i] * iz * iz * iz;
      out[d11_at(i)] = -ik(k) * y[d11_at(i)] - 12.0 * g_[i] * iz * iz * iz * iz;
    }
    const auto d1 = [&](int m) -> std::optional<std::size_t> {
      const auto it = std::lower_bound(h1.begin(), h1.end(), m);
      if (it == h1.end() || *it != m) return std::nullopt;
      return static_cast<std::size_t>(it - h1.begin());
    };
    for (std::size_t idx = 0; idx < n_psi_; ++idx) {
      const auto [j, k] = layout_->mode(idx);
      cplx h{};
      if (j == 1) {
        h = -2.0 * g_[*d1(k)] * iz * iz;
      } else if (j == 2) {
        cplx acc{};
        for (std::size_t i = 0; i < n_h1_; ++i)
          if (const auto o = d1(k - h1[i])) acc += y[d1_at(i)] * y[d1_at(*o)];
        h = 0.125 * z * z * acc;
      } else {
        cplx acc{};
        for (std::size_t i = 0; i < n_h1_; ++i)
          if (const auto o = layout_->find(2, k - h1[i]))
            acc += y[d1_at(i)] * y[d2_at(*o - offset2_)];
        h = 0.25 * z * z * acc;
      }
      out[idx] = h - ik(k) * y[idx];
    }
    if (layout_->max_order() >= 3) {
      const auto& h2 = layout_->harmonics(2);
      for (std::size_t i = 0; i < n_h2_; ++i) {
        const int k = h2[i];
        cplx s1{}, s2{};
        for (std::size_t a = 0; a < n_h1_; ++a)
          if (const auto o = d1(k - h1[a])) {
            s1 += y[d1_at(a)] * y[d1_at(*o)];
            s2 += y[d1_at(a)] * y[d11_at(*o)];
          }
        out[d2_at(i)] = -ik(k) * y[d2_at(i)] + 0.25 * z * s1 + 0.25 * z * z * s2;
      }
    }
  }

 private:
  std::size_t d1_at(std::size_t i) const { return n_psi_ + i; }
  std::size_t d11_at(std::size_t i) const { return n_psi_ + n_h1_ + i; }
  std::size_t d2_at(std::size_t i) const { return n_psi_ + 2 * n_h1_ + i; }

  std::shared_ptr<const ModeLayout> layout_;
  std::size_t n_psi_ = 0, n_h1_ = 0, n_h2_ = 0, offset2_ = 0;
  std::vector<cplx> g_;
};

template <class Rhs>
void run_path(Rhs&& rhs, double t_end, std::vector<cplx>& y, const SolverConfig& cfg,
              double step_cap) {
  if (cfg.fixed_step) {
    ode::integrate_rk4(rhs, 0.0, t_end, y, *cfg.fixed_step);
    return;
  }
  ode::Options opt;
  opt.rel_tol = cfg.rel_tol;
  opt.abs_tol = cfg.abs_tol;
  opt.max_step = std::min(cfg.max_step, step_cap);
  ode::integrate_dop853(rhs, 0.0, t_end, y, opt);
}

}  // namespace detail

/// Mode values of psi^+ or psi^- at z = -i rho, all orders up to n.
inline InnerState integrate_branch(const PerturbationSpec& spec, int n, Branch branch, double rho,
                                   const SolverConfig& cfg) {
  cfg.validate();
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "order must be >= 1");
  if (!(rho > 0.0)) throw Error(ErrorKind::InvalidArgument, "rho must be positive");
  if (cfg.re_z0 < 2.0 * cfg.series_order)
    throw Error(ErrorKind::SeedOutOfRange, "Re(z0) must be at least twice the series order");

  auto layout = std::make_shared<const ModeLayout>(spec, n, cfg.modes);
  const std::vector<Series> seeds = seed_all(spec, *layout, cfg.series_order);

  const double sign = branch == Branch::plus ? 1.0 : -1.0;
  const cplx z0{sign * cfg.re_z0, -rho};
  const double t_end = -z0.real();
  const double step_cap = 0.1 / (static_cast<double>(n) * spec.max_harmonic());

  InnerState state{cplx{0.0, -rho}, layout, {}};
  if (cfg.derivatives == DerivativeScheme::algebraic) {
    const InnerSystem system(spec, layout);
    std::vector<cplx> y(layout->size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = seeds[i].evaluate(z0);
    const auto rhs = [&](double t, const std::vector<cplx>& psi, std::vector<cplx>& dpsi) {
      system.derivatives(z0 + t, psi, dpsi);
    };
    detail::run_path(rhs, t_end, y, cfg, step_cap);
    state.values = std::move(y);
  } else {
    const detail::ExplicitDerivativeSystem system(spec, layout);
    std::vector<cplx> y = system.initial_values(seeds, z0);
    const auto rhs = [&](double t, const std::vector<cplx>& v, std::vector<cplx>& dv) {
      system.rhs(z0 + t, v, dv);
    };
    detail::run_path(rhs, t_end, y, cfg, step_cap);
    y.resize(layout->size());
    state.values = std::move(y);
  }
  for (const cplx& v : state.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw Error(ErrorKind::StepSizeUnderflow, "non-finite mode value at end of path");
  return state;
}

/// psi_j^-[k](-i rho) - psi_j^+[k](-i rho), integrating modes up to order n.
inline cplx branch_difference(const PerturbationSpec& spec, int n, int j, int k, double rho,
                              const SolverConfig& cfg) {
  const InnerState minus = integrate_branch(spec, n, Branch::minus, rho, cfg);
  const InnerState plus = integrate_branch(spec, n, Branch::plus, rho, cfg);
  return minus.value_or_zero(j, k) - plus.value_or_zero(j, k);
}

/// e^rho (psi_n^-[1] - psi_n^+[1])(-i rho); n must be the degeneracy order of spec.
inline cplx chi_estimate(const PerturbationSpec& spec, int n, double rho, const SolverConfig& cfg) {
  const int expected = degeneracy_order(spec).order_n;
  if (n != expected)
    throw Error(ErrorKind::OrderMismatch, "requested order " + std::to_string(n) +
                                              " but n(g) = " + std::to_string(expected));
  if (rho < 2.0 || rho > 16.0) throw Error(ErrorKind::InvalidArgument, "rho must lie in [2, 16]");
  return std::exp(rho) * branch_difference(spec, n, n, 1, rho, cfg);
}

/// Closed-form first-order difference, harmonic [1]: 4 pi g^[1] e^{-iz}.
inline cplx delta_in_first_order(const PerturbationSpec& spec, cplx z) {
  if (!(z.imag() < 0.0)) throw Error(ErrorKind::InvalidArgument, "needs Im(z) < 0");
  return 4.0 * std::numbers::pi * spec[1] * std::exp(cplx{0.0, -1.0} * z);
}

// ---------------------------------------------------------------------------
// Plateau detection

struct PlateauOptions {
  int min_points = 3;
  double stable_spread = 0.005;  // widest window at or below this wins
  double flag_spread = 0.02;
  double fail_spread = 0.10;
  double max_rho = 10.0;  // larger rho reported, never selected
};

struct StokesEstimate {
  std::vector<double> rho_grid;
  std::vector<cplx> estimates;
  cplx plateau_value{};
  std::pair<double, double> plateau_window{};
  double plateau_spread = 0.0;
  bool flagged = false;  // spread above PlateauOptions::flag_spread
};

/// (max |e| - min |e|) / mean |e| over a window.
inline double relative_spread(std::span<const cplx> values) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
  for (const cplx& v : values) {
    const double a = std::abs(v);
    lo = std::min(lo, a);
    hi = std::max(hi, a);
    sum += a;
  }
  const double mean = sum / static_cast<double>(values.size());
  return mean > 0.0 ? (hi - lo) / mean : std::numeric_limits<double>::infinity();
}

/// Chooses the plateau window of a finished scan. Exposed separately so it can
/// be applied to tabulated estimates.
inline void select_plateau(StokesEstimate& est, const PlateauOptions& opt = {}) {
  const std::size_t min_pts = static_cast<std::size_t>(std::max(opt.min_points, 2));
  std::size_t eligible = 0;
  while (eligible < est.rho_grid.size() && est.rho_grid[eligible] <= opt.max_rho) ++eligible;
  if (eligible < min_pts)
    throw Error(ErrorKind::NoPlateau, "fewer than " + std::to_string(min_pts) +
                                          " grid points with rho <= " + std::to_string(opt.max_rho));

  struct Window {
    std::size_t lo, hi;  // inclusive
    double spread;
  };
  std::optional<Window> best_stable, best_any;
  for (std::size_t lo = 0; lo + min_pts <= eligible; ++lo) {
    for (std::size_t hi = lo + min_pts - 1; hi < eligible; ++hi) {
      const std::span<const cplx> window(est.estimates.data() + lo, hi - lo + 1);
      const Window w{lo, hi, relative_spread(window)};
      if (!best_any || w.spread < best_any->spread) best_any = w;
      if (w.spread <= opt.stable_spread) {
        const std::size_t width = hi - lo, best_width = best_stable ? best_stable->hi - best_stable->lo : 0;
        if (!best_stable || width > best_width ||
            (width == best_width && w.spread < best_stable->spread))
          best_stable = w;
      }
    }
  }
  const Window w = best_stable ? *best_stable : *best_any;
  if (!(w.spread < opt.fail_spread))
    throw Error(ErrorKind::NoPlateau, "smallest window spread is " + std::to_string(w.spread));

  const std::size_t count = w.hi - w.lo + 1;
  const std::size_t mid = w.lo + count / 2;
  est.plateau_value = count % 2 == 1 ? est.estimates[mid]
                                     : 0.5 * (est.estimates[mid - 1] + est.estimates[mid]);
  est.plateau_window = {est.rho_grid[w.lo], est.rho_grid[w.hi]};
  est.plateau_spread = w.spread;
  est.flagged = w.spread > opt.flag_spread;
}

/// chi_estimate over an ascending rho grid, then plateau selection.
inline StokesEstimate plateau_scan(const PerturbationSpec& spec, int n, std::span<const double> rho_grid,
                                   const SolverConfig& cfg, const PlateauOptions& opt = {}) {
  if (rho_grid.size() < 4) throw Error(ErrorKind::InvalidArgument, "rho grid needs >= 4 points");
  if (!std::is_sorted(rho_grid.begin(), rho_grid.end()) ||
      std::adjacent_find(rho_grid.begin(), rho_grid.end()) != rho_grid.end())
    throw Error(ErrorKind::InvalidArgument, "rho grid must be strictly ascending");

  StokesEstimate est;
  est.rho_grid.assign(rho_grid.begin(), rho_grid.end());
  est.estimates.resize(rho_grid.size());

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg.workers, 1)),
                                                    rho_grid.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < rho_grid.size(); ++i)
      est.estimates[i] = chi_estimate(spec, n, rho_grid[i], cfg);
  } else {
    std::vector<std::exception_ptr> failures(rho_grid.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < rho_grid.size(); i += workers) {
          try {
            est.estimates[i] = chi_estimate(spec, n, rho_grid[i], cfg);
          } catch (...) {
            failures[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& f : failures)
      if (f) std::rethrow_exception(f);
  }
  select_plateau(est, opt);
  return est;
}

}  // namespace splitsep
