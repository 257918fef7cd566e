#include <catch_amalgamated.hpp>

#include <filesystem>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "splitsep/io.hpp"
#include "splitsep/table1_fixture.hpp"

using namespace splitsep;
namespace fs = std::filesystem;

namespace {

const fs::path samples = SPLITSEP_SAMPLE_SPECS;

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

TEST_CASE("format detection", "[io]") {
  CHECK(detect_format("a/b.toml") == SpecFormat::toml);
  CHECK(detect_format("a/b.TOML") == SpecFormat::toml);
  CHECK(detect_format("a/b.json") == SpecFormat::json);
  CHECK(detect_format("spec") == SpecFormat::json);
}

TEST_CASE("sample specs load to the expected coefficients", "[io]") {
  const auto tt = load_spec(samples / "two_three.json");
  CHECK(tt == validate_spec({{3, {10, 0}}, {2, {8, 0}}}));
  CHECK(load_spec(samples / "two_three.toml") == tt);
  CHECK(load_spec(samples / "arnold_2_3.toml") == validate_spec({{2, {0, -0.5}}, {3, {0.5, 0}}}));
  CHECK(load_spec(samples / "cancelling.json")[4] == cplx{-1, 0});
  CHECK(load_spec(samples / "single_cos.json")[1] == cplx{0.5, 0});
}

TEST_CASE("shorthand entries", "[io]") {
  const auto s = parse_spec(R"({"harmonics": [{"sin": 2, "amp": 1}, {"cos": 3, "amp": 1}]})", SpecFormat::json);
  CHECK(s[2] == cplx{0, -0.5});
  CHECK(s[3] == cplx{0.5, 0});
  // cos and sin of the same harmonic combine
  const auto both = parse_spec(R"({"harmonics": [{"cos": 1, "amp": 2}, {"sin": 1, "amp": 4}]})", SpecFormat::json);
  CHECK(both[1] == cplx{1, -2});
  const auto toml = parse_spec("sigma0 = 0.5\n[[harmonics]]\ncos = 1\namp = 3\n", SpecFormat::toml);
  CHECK(toml[1] == cplx{1.5, 0});
  CHECK(toml.sigma0() == 0.5);
}

TEST_CASE("malformed and invalid files", "[io]") {
  CHECK(kind_of([] { parse_spec("{\"harmonics\": []}", SpecFormat::json); }) == ErrorKind::EmptySpec);
  CHECK(kind_of([] { parse_spec("{", SpecFormat::json); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { parse_spec("{\"sigma0\": 1}", SpecFormat::json); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { parse_spec(R"({"harmonics": [{"k": 1.5, "re": 1}]})", SpecFormat::json); }) ==
        ErrorKind::ParseError);
  CHECK(kind_of([] { parse_spec(R"({"harmonics": [{"cos": 2}]})", SpecFormat::json); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { parse_spec(R"({"harmonics": [{"k": 0, "re": 1}]})", SpecFormat::json); }) ==
        ErrorKind::ZeroMeanViolation);
  CHECK(kind_of([] { parse_spec(R"({"harmonics": [{"k": 2, "re": 1}, {"cos": 2, "amp": 1}]})", SpecFormat::json); }) ==
        ErrorKind::DuplicateHarmonic);
  CHECK(kind_of([] { parse_spec(R"({"harmonics": [{"cos": 2, "amp": 1}, {"cos": 4, "amp": 1}]})", SpecFormat::json); }) ==
        ErrorKind::NonUnitGcd);
  CHECK(kind_of([] { parse_spec("harmonics = [", SpecFormat::toml); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { load_spec("/nonexistent/spec.json"); }) == ErrorKind::ParseError);
}

TEST_CASE("emit then load reproduces the coefficients exactly", "[io][property]") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    auto raw = oracle::random_spec(rng, 12, 5);
    for (auto& e : raw.entries) e.second *= std::pow(10.0, trial % 7 - 3) / 3.0;  // awkward decimals
    const auto spec = validate_spec(raw.entries, 0.1 + trial / 7.0);
    CHECK(parse_spec(emit_spec(spec), SpecFormat::json) == spec);
  }
}

TEST_CASE("scan CSV layout", "[io]") {
  std::ostringstream os;
  const std::vector<double> rho{4, 5};
  const std::vector<cplx> chi{{55.72, 1e-9}, {0.1, -0.2}};
  write_scan_csv(os, rho, chi);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "rho,re_chi,im_chi,abs_chi");
  std::getline(is, line);
  CHECK(line.rfind("4,55.719999999999999,1.0000000000000001e-09,", 0) == 0);
  // every value reads back to the same double
  std::getline(is, line);
  std::stringstream fields(line);
  std::string f;
  std::vector<double> vals;
  while (std::getline(fields, f, ',')) vals.push_back(std::stod(f));
  CHECK(vals == std::vector<double>{5, 0.1, -0.2, std::abs(chi[1])});
}

TEST_CASE("report layouts", "[io]") {
  StokesEstimate est;
  est.plateau_value = {1, 2};
  est.plateau_window = {4, 10};
  est.plateau_spread = 0.001;
  const auto j = plateau_to_json(est);
  CHECK(j.size() == 5);
  CHECK(j.at("window_hi") == 10.0);

  ArnoldReport r;
  r.p = 2, r.q = 3, r.A = 1, r.B = 1, r.n = 2;
  r.chi = {2, {0, 0.1}, Provenance::analytic};
  r.theta = {0, 0.2};
  const auto a = arnold_to_json(r);
  for (const char* key : {"p", "q", "A", "B", "n", "theta_re", "theta_im", "chi_re", "chi_im", "provenance"})
    CHECK(a.contains(key));
  CHECK(a.at("provenance") == "analytic");

  std::ostringstream os;
  const std::vector<MelnikovEval> rows{{1.0, 0.5, 0.25, 0.125, 0, 0}};
  write_melnikov_csv(os, rows);
  CHECK(os.str() == "tau,melnikov,leading_term\n0.5,0.25,0.125\n");

  RunManifest m;
  m.subcommand = "plateau";
  CHECK(m.to_json().at("tool_version") == std::string(tool_version));
  CHECK(manifest_path_for("out/x.csv").string() == "out/x.csv.manifest.json");
}

TEST_CASE("embedded table fixture", "[io]") {
  const auto f = parse_table1_fixture(table1_fixture_json);
  CHECK(f.rho.size() == 10);
  REQUIRE(f.rows.size() == 2);
  CHECK(f.rows[0].order == 2);
  CHECK(f.rows[0].spec == validate_spec({{3, {10, 0}}, {2, {8, 0}}}));
  CHECK(f.rows[1].order == 3);
  CHECK(f.rows[0].reference[2] == 55.8006);
  CHECK(f.rows[1].reference[4] == 7.1007);
  CHECK(kind_of([] { parse_table1_fixture("{}"); }) == ErrorKind::ParseError);
}
