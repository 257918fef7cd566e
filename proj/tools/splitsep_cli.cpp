// splitsep: command line front end.
//
// Exit status: 0 ok, 1 usage, 2 invalid input, 3 numerical failure,
// 4 regression mismatch.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "splitsep/splitsep.hpp"
#include "splitsep/table1_fixture.hpp"

namespace {

using namespace splitsep;
using json = nlohmann::json;

enum Exit { ok = 0, usage = 1, invalid = 2, numerical = 3, regression = 4 };

// Name of the step in progress, reported when it throws.
std::string g_stage = "startup";

std::vector<double> parse_grid(const std::string& text, const char* what) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError(what, "bad number '" + item + "'");
    }
  }
  if (parts.size() != 3 || !(parts[2] > 0.0) || !(parts[1] >= parts[0]))
    throw CLI::ValidationError(what, "expected lo:hi:step with lo <= hi, step > 0");
  std::vector<double> grid;
  const auto count = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  for (long i = 0; i <= count; ++i) grid.push_back(parts[0] + static_cast<double>(i) * parts[2]);
  return grid;
}

int workers_from_env() {
  const char* env = std::getenv("SPLITSEP_WORKERS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long w = std::strtol(env, &end, 10);
  if (*end != '\0' || w < 1) throw Error(ErrorKind::InvalidArgument, "SPLITSEP_WORKERS must be a positive integer");
  return static_cast<int>(w);
}

struct Common {
  std::string spec_path;
  std::string out;
  std::string format = "csv";
};

struct SolverFlags {
  int order = 0;  // 0: use n(g)
  std::string rho_grid = "4:10:1";
  double re_z0 = 40.0;
  int series_order = 20;
  double rel_tol = 1e-12;
  double abs_tol = 1e-15;
  std::optional<double> fixed_step;
  bool explicit_derivatives = false;

  SolverConfig config() const {
    SolverConfig cfg;
    cfg.re_z0 = re_z0;
    cfg.series_order = series_order;
    cfg.rel_tol = rel_tol;
    cfg.abs_tol = abs_tol;
    cfg.fixed_step = fixed_step;
    cfg.derivatives = explicit_derivatives ? DerivativeScheme::explicit_ode : DerivativeScheme::algebraic;
    cfg.workers = workers_from_env();
    cfg.validate();
    return cfg;
  }
};

void add_solver_flags(CLI::App* sub, SolverFlags& f) {
  sub->add_option("--order", f.order, "Order n of the coefficient (default: n(g))")->check(CLI::PositiveNumber);
  sub->add_option("--rho-grid", f.rho_grid, "lo:hi:step")->capture_default_str();
  sub->add_option("--re-z0", f.re_z0, "Real part R of the seeding point")->capture_default_str();
  sub->add_option("--series-order", f.series_order, "Terms N of the asymptotic seed")->capture_default_str();
  sub->add_option("--rel-tol", f.rel_tol)->capture_default_str();
  sub->add_option("--abs-tol", f.abs_tol)->capture_default_str();
  sub->add_option("--fixed-step", f.fixed_step, "Fixed RK4 step instead of adaptive DOP853");
  sub->add_flag("--explicit-derivatives", f.explicit_derivatives, "Co-integrate derivatives (n <= 3)");
}

void add_output_flags(CLI::App* sub, Common& c, bool with_format) {
  sub->add_option("--out", c.out, "Write results here (manifest goes to <out>.manifest.json)");
  if (with_format)
    sub->add_option("--format", c.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

// Writes the payload to stdout or to --out plus its manifest.
void emit(const Common& c, const std::string& payload, RunManifest manifest,
          std::chrono::steady_clock::time_point start) {
  g_stage = "emit";
  if (c.out.empty()) {
    std::cout << payload;
    return;
  }
  {
    std::ofstream os(c.out, std::ios::binary);
    if (!os) throw Error(ErrorKind::InvalidArgument, "cannot write " + c.out);
    os << payload;
  }
  manifest.spec_path = c.spec_path;
  manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ofstream ms(manifest_path_for(c.out), std::ios::binary);
  if (!ms) throw Error(ErrorKind::InvalidArgument, "cannot write manifest for " + c.out);
  ms << manifest.to_json().dump(2) << '\n';
}

PerturbationSpec load(const Common& c) {
  g_stage = "load";
  return load_spec(c.spec_path);
}

int resolve_order(const PerturbationSpec& spec, int requested) {
  g_stage = "degeneracy";
  const int n = degeneracy_order(spec).order_n;
  if (requested != 0 && requested != n)
    throw Error(ErrorKind::OrderMismatch,
                "--order " + std::to_string(requested) + " but the perturbation has n(g) = " + std::to_string(n));
  return n;
}

std::string set_text(const HarmonicSet& s) {
  std::string out = "{";
  bool first = true;
  for (int k : s) {
    out += (first ? "" : ", ") + std::to_string(k);
    first = false;
  }
  return out + "}";
}

}  // namespace

int main(int argc, char** argv) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest manifest;
  manifest.argv.assign(argv, argv + argc);

  CLI::App app{"Stokes coefficients and separatrix splitting for a rapidly forced pendulum"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version));

  Common common;
  SolverFlags solver;

  auto* validate = app.add_subcommand("validate", "Check a perturbation spec");
  validate->add_option("spec", common.spec_path)->required();

  auto* analyze = app.add_subcommand("analyze", "Harmonic sets G_l, order n(g) and a witness");
  analyze->add_option("spec", common.spec_path)->required();

  int analytic_order = 0;
  auto* chi_analytic = app.add_subcommand("chi-analytic", "Closed-form chi_1 or chi_2");
  chi_analytic->add_option("spec", common.spec_path)->required();
  chi_analytic->add_option("--order", analytic_order)->required()->check(CLI::Range(1, 2));
  add_output_flags(chi_analytic, common, false);

  auto* chi_numeric = app.add_subcommand("chi-numeric", "chi_n estimates over a rho grid (CSV or JSON)");
  chi_numeric->add_option("spec", common.spec_path)->required();
  add_solver_flags(chi_numeric, solver);
  add_output_flags(chi_numeric, common, true);

  auto* plateau = app.add_subcommand("plateau", "Scan plus plateau selection (JSON summary)");
  plateau->add_option("spec", common.spec_path)->required();
  add_solver_flags(plateau, solver);
  add_output_flags(plateau, common, false);
  std::string scan_out;
  plateau->add_option("--scan-out", scan_out, "Also write the scan CSV here");

  double mel_epsilon = 0.5;
  std::string tau_grid;
  bool oracle = false;
  auto* melnikov = app.add_subcommand("melnikov", "Melnikov function over a tau grid (CSV)");
  melnikov->add_option("spec", common.spec_path)->required();
  melnikov->add_option("--epsilon", mel_epsilon)->capture_default_str()->check(CLI::PositiveNumber);
  melnikov->add_option("--tau-grid", tau_grid, "lo:hi:step (default: 64 points on [0, 2pi))");
  melnikov->add_flag("--oracle", oracle, "Cross-check every point against direct quadrature");
  add_output_flags(melnikov, common, false);

  double sp_mu = 0.0, sp_eps = 0.0, sp_u = 0.0, sp_tau = 0.0;
  auto* splitting = app.add_subcommand("splitting", "Leading splitting term with its error budget (JSON)");
  splitting->add_option("spec", common.spec_path)->required();
  splitting->add_option("--mu", sp_mu)->required();
  splitting->add_option("--epsilon", sp_eps)->required();
  splitting->add_option("--u", sp_u)->capture_default_str();
  splitting->add_option("--tau", sp_tau)->capture_default_str();
  add_solver_flags(splitting, solver);
  add_output_flags(splitting, common, false);

  int ar_p = 0, ar_q = 0;
  double ar_A = 0.0, ar_B = 0.0;
  auto* arnold = app.add_subcommand("arnold", "Reduced model A sin(p t) + B cos(q t) (JSON)");
  arnold->add_option("--p", ar_p)->required();
  arnold->add_option("--q", ar_q)->required();
  arnold->add_option("--A", ar_A)->required();
  arnold->add_option("--B", ar_B)->required();
  add_solver_flags(arnold, solver);
  add_output_flags(arnold, common, false);

  auto* table1 = app.add_subcommand("table1", "Regression against the reference chi_2 and chi_3 table");
  add_output_flags(table1, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? Exit::ok : Exit::usage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    manifest.subcommand = sub->get_name();
    json& params = manifest.parameters;

    if (sub == validate) {
      const auto spec = load(common);
      std::cout << "ok: " << spec.coefficients().size() << " harmonics, max |k| = " << spec.max_harmonic()
                << ", sigma0 = " << fmt17(spec.sigma0()) << '\n';
      return Exit::ok;
    }

    if (sub == analyze) {
      const auto spec = load(common);
      g_stage = "degeneracy";
      const auto rep = degeneracy_order(spec);
      for (int l = 1; l <= rep.order_n; ++l) std::cout << "G_" << l << " = " << set_text(rep.G(l)) << '\n';
      std::cout << "n = " << rep.order_n << '\n' << "witness: 1 =";
      for (std::size_t i = 0; i < rep.witness.size(); ++i) {
        const int m = rep.witness[i];
        std::cout << (i ? " + " : " ") << (m < 0 ? "(" + std::to_string(m) + ")" : std::to_string(m));
      }
      std::cout << '\n';
      return Exit::ok;
    }

    if (sub == chi_analytic) {
      const auto spec = load(common);
      resolve_order(spec, analytic_order);
      g_stage = "chi-analytic";
      const auto chi = analytic_order == 1 ? chi1(spec) : chi2(spec);
      const json doc{{"order", chi.order},
                     {"chi_re", tidy(chi.value.real())},
                     {"chi_im", tidy(chi.value.imag())},
                     {"provenance", to_string(chi.provenance)}};
      params["order"] = analytic_order;
      emit(common, doc.dump(2) + "\n", manifest, start);
      return Exit::ok;
    }

    if (sub == chi_numeric || sub == plateau) {
      const auto spec = load(common);
      const int n = resolve_order(spec, solver.order);
      g_stage = "config";
      const SolverConfig cfg = solver.config();
      const auto grid = parse_grid(solver.rho_grid, "--rho-grid");
      params["order"] = n;
      params["rho_grid"] = grid;
      params["solver"] = solver_config_to_json(cfg);

      if (sub == chi_numeric) {
        g_stage = "scan";
        std::vector<cplx> chi(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) chi[i] = chi_estimate(spec, n, grid[i], cfg);
        std::ostringstream os;
        if (common.format == "csv")
          write_scan_csv(os, grid, chi);
        else
          os << scan_to_json(grid, chi).dump(2) << '\n';
        params["format"] = common.format;
        emit(common, os.str(), manifest, start);
        return Exit::ok;
      }

      g_stage = "plateau";
      const auto est = plateau_scan(spec, n, grid, cfg);
      if (est.flagged)
        std::cerr << "warning: plateau spread " << est.plateau_spread << " exceeds the flag threshold\n";
      if (!scan_out.empty()) {
        std::ofstream os(scan_out, std::ios::binary);
        if (!os) throw Error(ErrorKind::InvalidArgument, "cannot write " + scan_out);
        write_scan_csv(os, est.rho_grid, est.estimates);
        params["scan_out"] = scan_out;
      }
      emit(common, plateau_to_json(est).dump(2) + "\n", manifest, start);
      return Exit::ok;
    }

    if (sub == melnikov) {
      const auto spec = load(common);
      g_stage = "config";
      std::vector<double> taus;
      if (tau_grid.empty()) {
        for (int s = 0; s < 64; ++s) taus.push_back(2.0 * std::numbers::pi * s / 64.0);
      } else {
        taus = parse_grid(tau_grid, "--tau-grid");
      }
      params["epsilon"] = mel_epsilon;
      params["tau_grid"] = taus;
      params["oracle"] = oracle;
      g_stage = "melnikov";
      std::vector<MelnikovEval> rows;
      double worst = 0.0, scale = 0.0;
      for (double t : taus) {
        rows.push_back(melnikov_closed(spec, mel_epsilon, t));
        scale = std::max(scale, std::abs(rows.back().value));
      }
      if (oracle) {
        g_stage = "melnikov-oracle";
        for (const auto& r : rows) worst = std::max(worst, std::abs(melnikov_quadrature(spec, mel_epsilon, r.tau) - r.value));
        std::cerr << "oracle: max |closed - quadrature| = " << worst << " (scale " << scale << ")\n";
        if (worst > 1e-8 * scale + 1e-14)
          throw Error(ErrorKind::QuadratureBudgetExceeded, "closed form and quadrature disagree");
      }
      std::ostringstream os;
      write_melnikov_csv(os, rows);
      emit(common, os.str(), manifest, start);
      return Exit::ok;
    }

    if (sub == splitting) {
      const auto spec = load(common);
      const int n = resolve_order(spec, solver.order);
      g_stage = "config";
      const SolverConfig cfg = solver.config();
      StokesCoefficient chi;
      g_stage = "stokes";
      if (n == 1) {
        chi = chi1(spec);
      } else if (n == 2) {
        chi = chi2(spec);
      } else {
        const auto grid = parse_grid(solver.rho_grid, "--rho-grid");
        params["rho_grid"] = grid;
        chi = {n, plateau_scan(spec, n, grid, cfg).plateau_value, Provenance::numeric_plateau};
      }
      g_stage = "splitting";
      const auto eval = splitting_leading(chi.value, n, sp_mu, sp_eps, sp_u, sp_tau);
      json doc = splitting_to_json(eval, dominance_check(eval));
      doc["provenance"] = to_string(chi.provenance);
      params.update({{"mu", sp_mu}, {"epsilon", sp_eps}, {"u", sp_u}, {"tau", sp_tau}});
      params["solver"] = solver_config_to_json(cfg);
      emit(common, doc.dump(2) + "\n", manifest, start);
      return Exit::ok;
    }

    if (sub == arnold) {
      g_stage = "config";
      ArnoldOptions opt;
      opt.solver = solver.config();
      opt.rho_grid = parse_grid(solver.rho_grid, "--rho-grid");
      g_stage = "arnold";
      const auto rep = arnold_pipeline(ar_p, ar_q, ar_A, ar_B, opt);
      params.update({{"p", ar_p}, {"q", ar_q}, {"A", ar_A}, {"B", ar_B}});
      params["rho_grid"] = opt.rho_grid;
      params["solver"] = solver_config_to_json(opt.solver);
      emit(common, arnold_to_json(rep).dump(2) + "\n", manifest, start);
      return Exit::ok;
    }

    if (sub == table1) {
      g_stage = "fixture";
      const auto fixture = parse_table1_fixture(table1_fixture_json);
      SolverConfig cfg;
      cfg.workers = workers_from_env();
      g_stage = "table1";
      const auto rep = run_table1(fixture, cfg);
      std::ostringstream os;
      print_table1(os, rep);
      params["fixture_version"] = fixture.version;
      params["solver"] = solver_config_to_json(cfg);
      emit(common, os.str(), manifest, start);
      return rep.pass ? Exit::ok : Exit::regression;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << g_stage << "]: " << e.what() << '\n';
    return is_validation_error(e.kind()) ? Exit::invalid : Exit::numerical;
  } catch (const CLI::Error& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return Exit::usage;
  } catch (const std::exception& e) {
    std::cerr << "error [" << g_stage << "]: " << e.what() << '\n';
    return Exit::numerical;
  }
  return Exit::usage;
}
