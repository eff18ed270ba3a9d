#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cvxlab/suite.hpp"

using namespace cvxlab;

namespace {

ordered_json parse(const std::string& text) { return ordered_json::parse(text); }

ExperimentConfig small_config(const std::string& pot, int count,
                              std::vector<std::string> verifiers) {
  ordered_json j = parse(R"({
    "schema": 1,
    "potential": )" + pot + R"(,
    "test_functions": {"family": "bump", "count": )" + std::to_string(count) + R"(, "seed": 17},
    "verifiers": [],
    "accuracy": 1e-6,
    "out": "suite_out"
  })");
  j["verifiers"] = verifiers;
  return config_from_json(j);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream ifs(p, std::ios::binary);
  REQUIRE(ifs);
  std::stringstream ss;
  ss << ifs.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("potential specs round-trip through json") {
  for (const char* text : {
           R"({"kind": "gaussian"})",
           R"({"kind": "power", "p": 4.0})",
           R"({"kind": "polynomial", "coeffs": [0.0, 0.0, 0.5, 0.0, 0.08333333333333333]})",
           R"({"kind": "perturbed", "base": {"kind": "gaussian"}, "perturbation_amplitude": 0.1})",
       }) {
    CAPTURE(text);
    PotentialSpec s = potential_spec_from_json(parse(text));
    PotentialSpec back = potential_spec_from_json(potential_spec_to_json(s));
    CHECK(s == back);
  }
}

TEST_CASE("potential specs reject malformed input") {
  CHECK_THROWS_AS(potential_spec_from_json(parse(R"({"kind": "cubic"})")),
                  PreconditionError);
  CHECK_THROWS_AS(potential_spec_from_json(parse(R"({"kind": "gaussian", "p": 2})")),
                  PreconditionError);
  CHECK_THROWS_AS(potential_spec_from_json(parse(R"({"kind": "power"})")),
                  PreconditionError);
  CHECK_THROWS_AS(potential_spec_from_json(parse(R"({"kind": "power", "p": 1.0})")),
                  PreconditionError);
  CHECK_THROWS_AS(potential_spec_from_json(parse(R"({"kind": "polynomial", "coeffs": []})")),
                  PreconditionError);
  CHECK_THROWS_AS(potential_spec_from_json(parse(R"({"kind": "perturbed", "base": {"kind": "gaussian"}})")),
                  PreconditionError);
  CHECK_THROWS_AS(potential_spec_from_json(parse(R"({"unknown": 1})")), PreconditionError);
}

TEST_CASE("instantiated specs evaluate like their hand-built counterparts") {
  Potential g = instantiate(potential_spec_from_json(parse(R"({"kind": "gaussian"})")));
  CHECK(g.value(1.5) == doctest::Approx(1.125).epsilon(1e-15));
  Potential p = instantiate(potential_spec_from_json(parse(R"({"kind": "power", "p": 4})")));
  CHECK(p.value(2.0) == doctest::Approx(4.0).epsilon(1e-15));
  Potential q = instantiate(potential_spec_from_json(
      parse(R"({"kind": "perturbed", "base": {"kind": "gaussian"}, "perturbation_amplitude": 0.1})")));
  CHECK(q.kind() == PotentialKind::perturbed);
  CHECK(q.value(0.5) == doctest::Approx(0.125 + 0.1 * std::sin(0.5)).epsilon(1e-14));
}

TEST_CASE("experiment configs round-trip and default their optional fields") {
  ordered_json j = parse(R"({
    "schema": 1,
    "potential": {"kind": "gaussian"},
    "verifiers": ["mlsi"]
  })");
  ExperimentConfig c = config_from_json(j);
  CHECK(c.accuracy == 1e-6);
  CHECK(c.out == "results");
  CHECK(c.test_functions.family == "bump");
  CHECK(c.test_functions.count == 1);
  ExperimentConfig back = config_from_json(config_to_json(c));
  CHECK(c == back);
}

TEST_CASE("experiment configs reject contract violations") {
  auto reject = [](const std::string& text) {
    CHECK_THROWS_AS(config_from_json(parse(text)), PreconditionError);
  };
  reject(R"({"potential": {"kind": "gaussian"}, "verifiers": ["mlsi"]})");  // no schema
  reject(R"({"schema": 2, "potential": {"kind": "gaussian"}, "verifiers": ["mlsi"]})");
  reject(R"({"schema": 1, "verifiers": ["mlsi"]})");  // no potential
  reject(R"({"schema": 1, "potential": {"kind": "gaussian"}, "verifiers": []})");
  reject(R"({"schema": 1, "potential": {"kind": "gaussian"}, "verifiers": ["bogus"]})");
  reject(R"({"schema": 1, "potential": {"kind": "gaussian"}, "verifiers": ["mlsi", "mlsi"]})");
  reject(R"({"schema": 1, "potential": {"kind": "gaussian"}, "verifiers": ["mlsi"], "accuracy": 1e-2})");
  reject(R"({"schema": 1, "potential": {"kind": "gaussian"}, "verifiers": ["mlsi"], "accuracy": 1e-13})");
  reject(R"({"schema": 1, "potential": {"kind": "gaussian"}, "verifiers": ["mlsi"], "extra": 0})");
  reject(R"({"schema": 1, "potential": {"kind": "gaussian"}, "verifiers": ["mlsi"], "test_functions": {"count": 0}})");
  reject(R"({"schema": 1, "potential": {"kind": "gaussian"}, "verifiers": ["mlsi"], "test_functions": {"family": "spline"}})");
  reject(R"({"schema": 1, "potential": {"kind": "gaussian"}, "verifiers": ["mlsi"], "test_functions": {"amplitude": [2, 1]}})");
}

TEST_CASE("config loading reports parse failures with position info") {
  std::filesystem::path p = std::filesystem::temp_directory_path() / "cvxlab_bad.json";
  {
    std::ofstream ofs(p);
    ofs << "{\"schema\": 1,,}";
  }
  try {
    load_config(p);
    FAIL("expected a parse failure");
  } catch (const PreconditionError& e) {
    std::string msg = e.what();
    CHECK(msg.find("parse error") != std::string::npos);
  }
  std::filesystem::remove(p);
  CHECK_THROWS_AS(load_config("/nonexistent/nowhere.json"), PreconditionError);
}

TEST_CASE("test function generation is seeded and bounded") {
  TestFunctionSpec spec;
  spec.count = 8;
  spec.seed = 123;
  std::vector<SmoothFunction> a = generate_test_functions(spec);
  std::vector<SmoothFunction> b = generate_test_functions(spec);
  REQUIRE(a.size() == 8);
  for (int k = 0; k < 8; ++k)
    for (double x : {-1.0, 0.0, 2.0})
      CHECK(a[k](x) == b[k](x));
  spec.seed = 124;
  std::vector<SmoothFunction> c = generate_test_functions(spec);
  bool any_diff = false;
  for (int k = 0; k < 8; ++k) any_diff = any_diff || (a[k](0.0) != c[k](0.0));
  CHECK(any_diff);
  // bumps never exceed the amplitude cap
  for (int k = 0; k < 8; ++k) {
    double sup = 0.0;
    for (int i = 0; i <= 100; ++i) sup = std::max(sup, std::abs(a[k](-4.0 + 0.08 * i)));
    CHECK(sup <= spec.amplitude_hi + 1e-12);
    CHECK(sup > 0.0);
  }
}

TEST_CASE("suite runs every requested verifier over every test function") {
  ExperimentConfig cfg = small_config(R"({"kind": "gaussian"})", 10,
                                      {"mlsi", "brascamp_lieb"});
  SuiteReport rep = run_suite(cfg);
  CHECK(rep.reports.size() == 20);
  CHECK(rep.violated == 0);
  CHECK(rep.skips.empty());
  CHECK(rep.errors.empty());
  CHECK(rep.holds + rep.equality == 20);
  // reports arrive in verifier-major order with their index recorded
  CHECK(rep.reports[0].name == "mlsi");
  CHECK(rep.reports[10].name == "brascamp_lieb");
  for (int i = 0; i < 10; ++i) {
    CHECK(rep.reports[i].meta.at("index").get<int>() == i);
    CHECK(rep.reports[10 + i].meta.at("index").get<int>() == i);
  }
  CHECK(rep.timings.size() == 2);
}

TEST_CASE("suite records an inapplicable verifier as a single skip") {
  ExperimentConfig cfg = small_config(R"({"kind": "gaussian"})", 3, {"hphi"});
  SuiteReport rep = run_suite(cfg);
  CHECK(rep.reports.empty());
  REQUIRE(rep.skips.size() == 1);
  CHECK(rep.skips[0].verifier == "hphi");
  CHECK(rep.skips[0].index == -1);
  CHECK(rep.skips[0].reason == "hess_unbounded=false");
}

TEST_CASE("suite skips the power family verifier off-family and runs it on-family") {
  ExperimentConfig off = small_config(
      R"({"kind": "polynomial", "coeffs": [0, 0, 0.5, 0, 0.08333333333333333]})", 2,
      {"power_lsi"});
  SuiteReport rep_off = run_suite(off);
  CHECK(rep_off.reports.empty());
  REQUIRE(rep_off.skips.size() == 1);
  CHECK(rep_off.skips[0].reason == "measure does not come from a power family potential");

  ExperimentConfig on = small_config(R"({"kind": "power", "p": 4})", 2, {"power_lsi"});
  SuiteReport rep_on = run_suite(on);
  CHECK(rep_on.reports.size() == 2);
  CHECK(rep_on.violated == 0);
}

TEST_CASE("suite covers the remaining verifier families without violations") {
  ExperimentConfig cfg = small_config(
      R"({"kind": "polynomial", "coeffs": [0, 0, 0.5, 0, 0.08333333333333333]})", 2,
      {"hphi", "perturbed", "euclidean", "nontight", "prekopa_leindler", "transport"});
  SuiteReport rep = run_suite(cfg);
  CHECK(rep.violated == 0);
  CHECK(rep.errors.empty());
  // hphi, perturbed, euclidean, nontight, transport run per function;
  // the interpolation check contributes one report
  CHECK(rep.reports.size() == 11);
}

TEST_CASE("suite runs the homogeneous verifier only on homogeneous potentials") {
  ExperimentConfig on = small_config(R"({"kind": "power", "p": 4})", 2, {"homogeneous"});
  SuiteReport rep_on = run_suite(on);
  CHECK(rep_on.reports.size() == 2);
  CHECK(rep_on.violated == 0);

  ExperimentConfig off = small_config(
      R"({"kind": "polynomial", "coeffs": [0, 0, 0.5, 0, 0.08333333333333333]})", 2,
      {"homogeneous"});
  SuiteReport rep_off = run_suite(off);
  CHECK(rep_off.reports.empty());
  REQUIRE(rep_off.skips.size() == 1);
  CHECK(rep_off.skips[0].reason == "potential is not homogeneous");
}

TEST_CASE("suite json carries config, summary and reports") {
  ExperimentConfig cfg = small_config(R"({"kind": "gaussian"})", 2, {"mlsi"});
  SuiteReport rep = run_suite(cfg);
  ordered_json j = suite_to_json(rep);
  CHECK(j.at("schema") == 1);
  CHECK(j.at("config").at("potential").at("kind") == "gaussian");
  CHECK(j.at("summary").at("violated") == 0);
  CHECK(j.at("summary").at("holds").get<int>() + j.at("summary").at("equality").get<int>() == 2);
  CHECK(j.at("reports").size() == 2);
  CHECK(j.at("skips").empty());
  CHECK(j.at("errors").empty());
  // timings stay out of the json payload
  CHECK(!j.contains("timings"));
}

TEST_CASE("emitted suite files are byte-identical across reruns") {
  ExperimentConfig cfg = small_config(R"({"kind": "gaussian"})", 3,
                                      {"mlsi", "prekopa_leindler"});
  std::filesystem::path base = std::filesystem::temp_directory_path() / "cvxlab_suite_test";
  std::filesystem::remove_all(base);
  SuiteReport r1 = run_suite(cfg);
  SuiteReport r2 = run_suite(cfg);
  std::vector<std::string> f1 = emit_report(r1, base / "a");
  std::vector<std::string> f2 = emit_report(r2, base / "b");
  CHECK(f1 == f2);
  REQUIRE(!f1.empty());
  CHECK(f1.front() == "suite.json");
  CHECK(slurp(base / "a" / "suite.json") == slurp(base / "b" / "suite.json"));
  CHECK(slurp(base / "a" / "mlsi.csv") == slurp(base / "b" / "mlsi.csv"));
  // manifest lists exactly the emitted files
  std::string manifest = slurp(base / "a" / "manifest.txt");
  for (const std::string& name : f1)
    if (name != "manifest.txt") CHECK(manifest.find(name) != std::string::npos);
  // csv header shape
  std::string csv = slurp(base / "a" / "mlsi.csv");
  CHECK(csv.rfind("index,lhs,rhs,margin,rel_margin,status,tolerance\n", 0) == 0);
  std::filesystem::remove_all(base);
}

TEST_CASE("suite runner rejects configs that bypassed validation") {
  ExperimentConfig cfg = small_config(R"({"kind": "gaussian"})", 1, {"mlsi"});
  cfg.verifiers.clear();
  CHECK_THROWS_AS(run_suite(cfg), PreconditionError);
  ExperimentConfig cfg2 = small_config(R"({"kind": "gaussian"})", 1, {"mlsi"});
  cfg2.accuracy = 1.0;
  CHECK_THROWS_AS(run_suite(cfg2), PreconditionError);
}
