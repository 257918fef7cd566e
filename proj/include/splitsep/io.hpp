#pragma once

// File formats: perturbation specs (JSON or TOML), scan CSV, plateau and
// Arnold JSON reports, run manifests, and the reference table regression fixture.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>
#include <toml.hpp>

#include "splitsep/error.hpp"
#include "splitsep/harmonics.hpp"
#include "splitsep/inner_solver.hpp"
#include "splitsep/melnikov.hpp"
#include "splitsep/splitting.hpp"
#include "splitsep/stokes_analytic.hpp"

namespace splitsep {

inline constexpr std::string_view tool_version = "0.1.0";

enum class SpecFormat { json, toml };

/// .toml selects TOML, anything else JSON.
inline SpecFormat detect_format(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".toml" ? SpecFormat::toml : SpecFormat::json;
}

/// One harmonic entry before validation. Either explicit (k, re, im) or the
/// cos/sin shorthand with an amplitude.
struct RawHarmonic {
  enum class Kind { explicit_pair, cos, sin } kind = Kind::explicit_pair;
  int k = 0;
  double re = 0.0, im = 0.0, amp = 0.0;
};

/// cos(k t) with amplitude a is (k, a/2, 0); sin(k t) is (k, 0, -a/2).
/// Shorthand entries with the same k are summed; an explicit entry for a k
/// that appears elsewhere is a duplicate.
inline PerturbationSpec build_spec(const std::vector<RawHarmonic>& entries, double sigma0) {
  std::vector<std::pair<int, cplx>> raw;
  std::map<int, cplx> sugar;
  for (const auto& e : entries) {
    switch (e.kind) {
      case RawHarmonic::Kind::explicit_pair: raw.emplace_back(e.k, cplx{e.re, e.im}); break;
      case RawHarmonic::Kind::cos: sugar[e.k] += cplx{e.amp / 2.0, 0.0}; break;
      case RawHarmonic::Kind::sin: sugar[e.k] += cplx{0.0, -e.amp / 2.0}; break;
    }
  }
  for (const auto& [k, v] : sugar) {
    if (k < 1) throw Error(ErrorKind::ParseError, "cos/sin harmonic must be >= 1, got " + std::to_string(k));
    raw.emplace_back(k, v);
  }
  return validate_spec(raw, sigma0);
}

namespace detail {

inline int json_int(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw Error(ErrorKind::ParseError, std::string(key) + " must be an integer");
  return v.get<int>();
}

inline double json_real(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) throw Error(ErrorKind::ParseError, std::string(key) + " must be a number");
  return v.get<double>();
}

inline RawHarmonic raw_from_json(const nlohmann::json& e) {
  if (!e.is_object()) throw Error(ErrorKind::ParseError, "harmonic entry must be an object");
  RawHarmonic h;
  if (e.contains("cos") || e.contains("sin")) {
    if (e.contains("k") || (e.contains("cos") && e.contains("sin")))
      throw Error(ErrorKind::ParseError, "entry mixes k/cos/sin keys");
    h.kind = e.contains("cos") ? RawHarmonic::Kind::cos : RawHarmonic::Kind::sin;
    h.k = json_int(e, e.contains("cos") ? "cos" : "sin");
    if (!e.contains("amp")) throw Error(ErrorKind::ParseError, "cos/sin entry needs amp");
    h.amp = json_real(e, "amp", 0.0);
    return h;
  }
  if (!e.contains("k")) throw Error(ErrorKind::ParseError, "harmonic entry needs k, cos or sin");
  h.k = json_int(e, "k");
  h.re = json_real(e, "re", 0.0);
  h.im = json_real(e, "im", 0.0);
  return h;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline double toml_real(const toml::table& t, std::string_view key, double fallback) {
  const toml::node* n = t.get(key);
  if (!n) return fallback;
  if (auto v = n->value<double>()) return *v;  // integers convert too
  throw Error(ErrorKind::ParseError, std::string(key) + " must be a number");
}

inline int toml_int(const toml::table& t, std::string_view key) {
  const toml::node* n = t.get(key);
  if (!n || !n->is_integer()) throw Error(ErrorKind::ParseError, std::string(key) + " must be an integer");
  return static_cast<int>(n->as_integer()->get());
}

}  // namespace detail

inline PerturbationSpec spec_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("harmonics") || !doc.at("harmonics").is_array())
    throw Error(ErrorKind::ParseError, "expected an object with a harmonics array");
  std::vector<RawHarmonic> entries;
  for (const auto& e : doc.at("harmonics")) entries.push_back(detail::raw_from_json(e));
  return build_spec(entries, detail::json_real(doc, "sigma0", 1.0));
}

inline PerturbationSpec parse_spec(std::string_view text, SpecFormat format) {
  if (format == SpecFormat::json) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::ParseError, e.what());
    }
    return spec_from_json(doc);
  }
  toml::table doc;
  try {
    doc = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string(e.description()));
  }
  const toml::array* arr = doc["harmonics"].as_array();
  if (!arr) throw Error(ErrorKind::ParseError, "expected a harmonics array of tables");
  std::vector<RawHarmonic> entries;
  for (const toml::node& node : *arr) {
    const toml::table* t = node.as_table();
    if (!t) throw Error(ErrorKind::ParseError, "harmonic entry must be a table");
    RawHarmonic h;
    const bool c = t->contains("cos"), s = t->contains("sin");
    if (c || s) {
      if (t->contains("k") || (c && s)) throw Error(ErrorKind::ParseError, "entry mixes k/cos/sin keys");
      h.kind = c ? RawHarmonic::Kind::cos : RawHarmonic::Kind::sin;
      h.k = detail::toml_int(*t, c ? "cos" : "sin");
      if (!t->contains("amp")) throw Error(ErrorKind::ParseError, "cos/sin entry needs amp");
      h.amp = detail::toml_real(*t, "amp", 0.0);
    } else {
      h.k = detail::toml_int(*t, "k");
      h.re = detail::toml_real(*t, "re", 0.0);
      h.im = detail::toml_real(*t, "im", 0.0);
    }
    entries.push_back(h);
  }
  return build_spec(entries, detail::toml_real(doc, "sigma0", 1.0));
}

inline PerturbationSpec load_spec(const std::filesystem::path& path, SpecFormat format) {
  return parse_spec(detail::read_file(path), format);
}

inline PerturbationSpec load_spec(const std::filesystem::path& path) {
  return load_spec(path, detect_format(path));
}

inline nlohmann::json spec_to_json(const PerturbationSpec& spec) {
  nlohmann::json doc{{"sigma0", spec.sigma0()}, {"harmonics", nlohmann::json::array()}};
  for (const auto& [k, v] : spec.coefficients())
    doc["harmonics"].push_back({{"k", k}, {"re", v.real()}, {"im", v.imag()}});
  return doc;
}

/// Shortest round-trip decimal form for every double.
inline std::string emit_spec(const PerturbationSpec& spec) { return spec_to_json(spec).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Result formats

/// %.17g, enough to recover every double exactly.
/// Folds -0 into 0 for reports.
inline double tidy(double x) { return x == 0.0 ? 0.0 : x; }

inline std::string fmt17(double x) {
  x = tidy(x);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline constexpr std::string_view scan_csv_header = "rho,re_chi,im_chi,abs_chi";
inline constexpr std::string_view melnikov_csv_header = "tau,melnikov,leading_term";

inline void write_scan_csv(std::ostream& os, std::span<const double> rho, std::span<const cplx> chi) {
  os << scan_csv_header << '\n';
  for (std::size_t i = 0; i < rho.size(); ++i)
    os << fmt17(rho[i]) << ',' << fmt17(chi[i].real()) << ',' << fmt17(chi[i].imag()) << ','
       << fmt17(std::abs(chi[i])) << '\n';
}

inline nlohmann::json scan_to_json(std::span<const double> rho, std::span<const cplx> chi) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < rho.size(); ++i)
    rows.push_back({{"rho", rho[i]},
                    {"re_chi", tidy(chi[i].real())},
                    {"im_chi", tidy(chi[i].imag())},
                    {"abs_chi", std::abs(chi[i])}});
  return rows;
}

inline nlohmann::json plateau_to_json(const StokesEstimate& est) {
  return {{"plateau_value_re", tidy(est.plateau_value.real())},
          {"plateau_value_im", tidy(est.plateau_value.imag())},
          {"window_lo", est.plateau_window.first},
          {"window_hi", est.plateau_window.second},
          {"spread", est.plateau_spread}};
}

inline void write_melnikov_csv(std::ostream& os, std::span<const MelnikovEval> rows) {
  os << melnikov_csv_header << '\n';
  for (const auto& r : rows) os << fmt17(r.tau) << ',' << fmt17(r.value) << ',' << fmt17(r.leading_term) << '\n';
}

inline nlohmann::json arnold_to_json(const ArnoldReport& r) {
  return {{"p", r.p},
          {"q", r.q},
          {"A", r.A},
          {"B", r.B},
          {"n", r.n},
          {"theta_re", tidy(r.theta.real())},
          {"theta_im", tidy(r.theta.imag())},
          {"chi_re", tidy(r.chi.value.real())},
          {"chi_im", tidy(r.chi.value.imag())},
          {"provenance", to_string(r.chi.provenance)}};
}

inline nlohmann::json splitting_to_json(const SplittingEval& e, Dominance d) {
  return {{"mu", e.mu},
          {"epsilon", e.epsilon},
          {"u", e.u},
          {"tau", e.tau},
          {"n", e.n},
          {"chi_re", tidy(e.chi_n.real())},
          {"chi_im", tidy(e.chi_n.imag())},
          {"leading", e.leading},
          {"next_mu_order", e.error_budget.next_mu_order},
          {"second_exponential", e.error_budget.second_exponential},
          {"log_correction", e.error_budget.log_correction},
          {"dominance", to_string(d)}};
}

inline nlohmann::json solver_config_to_json(const SolverConfig& cfg) {
  nlohmann::json j{{"series_order", cfg.series_order},
                   {"re_z0", cfg.re_z0},
                   {"rel_tol", cfg.rel_tol},
                   {"abs_tol", cfg.abs_tol},
                   {"max_step", std::isfinite(cfg.max_step) ? nlohmann::json(cfg.max_step) : nlohmann::json(nullptr)},
                   {"fixed_step", cfg.fixed_step ? nlohmann::json(*cfg.fixed_step) : nlohmann::json(nullptr)},
                   {"derivatives", cfg.derivatives == DerivativeScheme::algebraic ? "algebraic" : "explicit"},
                   {"modes", cfg.modes == ModeSelection::support ? "support" : "full_band"},
                   {"workers", cfg.workers}};
  return j;
}

/// Everything needed to rerun a command: written next to each result file.
struct RunManifest {
  std::string subcommand;
  std::vector<std::string> argv;
  nlohmann::json parameters = nlohmann::json::object();
  std::string spec_path;
  double wall_seconds = 0.0;

  nlohmann::json to_json() const {
    return {{"subcommand", subcommand},
            {"argv", argv},
            {"parameters", parameters},
            {"spec_path", spec_path},
            {"tool_version", tool_version},
            {"wall_clock_seconds", wall_seconds}};
  }
};

inline std::filesystem::path manifest_path_for(const std::filesystem::path& out) {
  return std::filesystem::path(out.string() + ".manifest.json");
}

// ---------------------------------------------------------------------------
// Reference table regression

struct Table1Row {
  std::string name;
  int order = 0;
  PerturbationSpec spec;
  std::vector<double> reference;  // aligned with Table1Fixture::rho
};

struct Table1Fixture {
  int version = 0;
  double re_z0 = 40.0;
  int series_order = 20;
  double gate_max_rho = 10.0;
  double tolerance = 0.01;
  std::vector<double> rho;
  std::vector<Table1Row> rows;
};

inline Table1Fixture parse_table1_fixture(std::string_view text) {
  Table1Fixture f;
  try {
    const auto doc = nlohmann::json::parse(text);
    f.version = doc.at("version").get<int>();
    f.re_z0 = doc.at("re_z0").get<double>();
    f.series_order = doc.at("series_order").get<int>();
    f.gate_max_rho = doc.at("gate_max_rho").get<double>();
    f.tolerance = doc.at("tolerance").get<double>();
    f.rho = doc.at("rho").get<std::vector<double>>();
    for (const auto& r : doc.at("rows")) {
      Table1Row row{r.at("name").get<std::string>(), r.at("order").get<int>(),
                    spec_from_json(r.at("spec")), r.at("values").get<std::vector<double>>()};
      if (row.reference.size() != f.rho.size())
        throw Error(ErrorKind::ParseError, "row " + row.name + " does not match the rho list");
      f.rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("table fixture: ") + e.what());
  }
  return f;
}

struct Table1Cell {
  double rho = 0.0;
  cplx computed{};
  double reference = 0.0;
  double deviation = 0.0;  // | |computed| - reference | / reference
  bool gated = false;      // counts toward pass/fail
  bool ok = true;
};

struct Table1Report {
  std::vector<std::string> names;
  std::vector<std::vector<Table1Cell>> cells;
  bool pass = true;
};

inline Table1Report run_table1(const Table1Fixture& fixture, SolverConfig cfg = {}) {
  cfg.re_z0 = fixture.re_z0;
  cfg.series_order = fixture.series_order;
  Table1Report report;
  for (const auto& row : fixture.rows) {
    report.names.push_back(row.name);
    auto& out = report.cells.emplace_back(fixture.rho.size());
    std::vector<std::exception_ptr> failures(fixture.rho.size());
    const auto one = [&](std::size_t i) {
      Table1Cell& c = out[i];
      c.rho = fixture.rho[i];
      c.reference = row.reference[i];
      c.computed = chi_estimate(row.spec, row.order, c.rho, cfg);
      c.deviation = std::abs(std::abs(c.computed) - c.reference) / c.reference;
      c.gated = c.rho <= fixture.gate_max_rho;
      c.ok = !c.gated || c.deviation <= fixture.tolerance;
    };
    const std::size_t workers = std::min<std::size_t>(std::max(cfg.workers, 1), fixture.rho.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < fixture.rho.size(); i += workers) {
          try {
            one(i);
          } catch (...) {
            failures[i] = std::current_exception();
          }
        }
      });
    for (auto& t : pool) t.join();
    for (const auto& f : failures)
      if (f) std::rethrow_exception(f);
    for (const auto& c : out) report.pass = report.pass && c.ok;
  }
  return report;
}

inline void print_table1(std::ostream& os, const Table1Report& report) {
  for (std::size_t r = 0; r < report.names.size(); ++r) {
    os << report.names[r] << '\n';
    os << "  rho   computed              reference   rel.dev    status\n";
    for (const auto& c : report.cells[r]) {
      char line[160];
      std::snprintf(line, sizeof line, "  %-5g %-21.12g %-11.4f %-10.3e %s\n", c.rho, std::abs(c.computed),
                    c.reference, c.deviation, !c.gated ? "(not gated)" : c.ok ? "ok" : "MISMATCH");
      os << line;
    }
  }
  os << (report.pass ? "table1: PASS\n" : "table1: FAIL\n");
}

}  // namespace splitsep
