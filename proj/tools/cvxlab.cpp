// Command line front end: run verifier suites from a config file, evaluate
// conjugates of configured potentials, check grid inequalities and run
// concentration sweeps.  Exit status is nonzero iff a checked inequality
// was violated (or the invocation itself failed).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cvxlab/conjugate.hpp"
#include "cvxlab/suite.hpp"

namespace {

using namespace cvxlab;

cvxlab::ordered_json parse_spec_arg(const std::string& arg) {
  std::string text = arg;
  if (!arg.empty() && arg[0] == '@') {
    std::ifstream ifs(arg.substr(1));
    if (!ifs)
      throw PreconditionError("cannot open potential spec file " + arg.substr(1));
    std::stringstream ss;
    ss << ifs.rdbuf();
    text = ss.str();
  }
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw PreconditionError(std::string("potential spec: ") + e.what());
  }
}

GridFunction1D load_grid(const std::string& path) {
  std::ifstream ifs(path);
  if (!ifs) throw PreconditionError("cannot open " + path);
  return GridFunction1D::read_csv(ifs);
}

struct Overrides {
  std::optional<double> accuracy;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;

  void apply(ExperimentConfig& cfg) const {
    if (accuracy) cfg.accuracy = *accuracy;
    if (seed) cfg.test_functions.seed = *seed;
    if (out) cfg.out = *out;
  }
};

void print_suite_summary(const SuiteReport& rep, std::ostream& os) {
  os << rep.reports.size() << " reports: " << rep.holds << " holds, "
     << rep.equality << " equality, " << rep.violated << " violated; "
     << rep.skips.size() << " skips, " << rep.errors.size() << " errors\n";
  for (const SkipEntry& e : rep.skips)
    os << "skip: " << e.verifier << "[" << e.index << "]: " << e.reason << "\n";
  for (const ErrorEntry& e : rep.errors)
    os << "error: " << e.verifier << "[" << e.index << "]: " << e.what << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical checks for convex potentials and log-concave measures"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides over;
  app.add_option("--accuracy", over.accuracy, "override quadrature accuracy target");
  app.add_option("--seed", over.seed, "override the test function seed");
  app.add_option("--out", over.out, "override the output directory");

  int exit_code = 0;

  auto* verify = app.add_subcommand("verify", "run the configured verifier suite");
  std::string verify_config;
  verify->add_option("--config", verify_config, "experiment config JSON")->required();
  verify->callback([&] {
    ExperimentConfig cfg = load_config(verify_config);
    over.apply(cfg);
    SuiteReport rep = run_suite(cfg);
    std::vector<std::string> files = emit_report(rep, cfg.out);
    print_suite_summary(rep, std::cout);
    std::cout << "wrote " << files.size() << " files to " << cfg.out << "\n";
    if (rep.violated > 0) exit_code = 1;
  });

  auto* conj = app.add_subcommand("conjugate", "evaluate the convex conjugate of a potential");
  std::string conj_spec;
  double conj_at = 0.0;
  conj->add_option("--potential", conj_spec, "potential spec JSON (inline or @file)")
      ->required();
  conj->add_option("--at", conj_at, "dual point y")->required();
  conj->callback([&] {
    Potential phi = instantiate(potential_spec_from_json(parse_spec_arg(conj_spec)));
    ConjugateResult r = conjugate_at(phi, conj_at);
    ordered_json j;
    j["value"] = r.value;
    ordered_json am = ordered_json::array();
    for (Eigen::Index i = 0; i < r.argmax.size(); ++i) am.push_back(r.argmax[i]);
    j["argmax"] = am;
    j["newton_iters"] = r.newton_iters;
    j["residual"] = r.residual;
    std::cout << j.dump(2) << "\n";
  });

  auto* pl = app.add_subcommand("plcheck", "check the grid interpolation inequality");
  std::string pl_u, pl_v, pl_w;
  double pl_a = 0.5;
  pl->add_option("--u", pl_u, "CSV samples of u")->required();
  pl->add_option("--v", pl_v, "CSV samples of v")->required();
  pl->add_option("--w", pl_w, "CSV samples of w")->required();
  pl->add_option("--a", pl_a, "interpolation weight in (0, 1)")->required();
  pl->callback([&] {
    VerificationReport rep =
        check_prekopa_leindler(load_grid(pl_u), load_grid(pl_v), load_grid(pl_w), pl_a);
    std::cout << to_json(rep).dump(2) << "\n";
    if (rep.status == Status::violated) exit_code = 1;
  });

  auto* conc = app.add_subcommand("concentration", "run a tail bound sweep");
  std::string conc_config;
  conc->add_option("--config", conc_config, "experiment config JSON")->required();
  conc->callback([&] {
    ExperimentConfig cfg = load_config(conc_config);
    over.apply(cfg);
    cfg.verifiers = {"concentration"};
    SuiteReport rep = run_suite(cfg);
    if (!rep.has_sweep) {
      print_suite_summary(rep, std::cerr);
      exit_code = 2;
      return;
    }
    std::filesystem::create_directories(cfg.out);
    std::ofstream ofs(std::filesystem::path(cfg.out) / "concentration.csv",
                      std::ios::binary);
    if (!ofs) throw PreconditionError("cannot write to " + cfg.out);
    write_csv(rep.sweep, ofs);
    print_suite_summary(rep, std::cout);
    std::cout << "wrote " << (std::filesystem::path(cfg.out) / "concentration.csv").string()
              << "\n";
    if (rep.violated > 0) exit_code = 1;
  });

  auto* report = app.add_subcommand("report", "re-render the summary of an emitted suite");
  std::string report_dir;
  report->add_option("--dir", report_dir, "directory containing suite.json")->required();
  report->callback([&] {
    std::ifstream ifs(std::filesystem::path(report_dir) / "suite.json");
    if (!ifs) throw PreconditionError("cannot open " + report_dir + "/suite.json");
    ordered_json j = ordered_json::parse(ifs);
    const ordered_json& summary = j.at("summary");
    for (const ordered_json& r : j.at("reports")) {
      std::cout << r.at("name").get<std::string>();
      if (r.at("meta").contains("index"))
        std::cout << "[" << r.at("meta").at("index").get<int>() << "]";
      std::cout << ": " << r.at("status").get<std::string>()
                << " (margin " << r.at("margin").get<double>() << ")\n";
    }
    for (const ordered_json& s : j.at("skips"))
      std::cout << "skip: " << s.at("verifier").get<std::string>() << "["
                << s.at("index").get<int>() << "]: "
                << s.at("reason").get<std::string>() << "\n";
    for (const ordered_json& e : j.at("errors"))
      std::cout << "error: " << e.at("verifier").get<std::string>() << "["
                << e.at("index").get<int>() << "]: "
                << e.at("error").get<std::string>() << "\n";
    std::cout << summary.at("holds").get<int>() << " holds, "
              << summary.at("equality").get<int>() << " equality, "
              << summary.at("violated").get<int>() << " violated\n";
    if (summary.at("violated").get<int>() > 0) exit_code = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return exit_code;
}
