#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cvxlab/concentration.hpp"
#include "cvxlab/inequality.hpp"
#include "cvxlab/measure.hpp"
#include "cvxlab/report.hpp"

namespace cvxlab {

// Potential description as written in config files.  Everything configured
// this way lives on the line.
struct PotentialSpec {
  std::string kind;  // gaussian | power | polynomial | perturbed
  double p = 0.0;                       // power only
  std::vector<double> coeffs;           // polynomial only, ascending degree
  std::shared_ptr<PotentialSpec> base;  // perturbed only
  double perturbation_amplitude = 0.0;  // perturbed only: amplitude of sin

  bool operator==(const PotentialSpec& o) const;
};

PotentialSpec potential_spec_from_json(const ordered_json& j);
ordered_json potential_spec_to_json(const PotentialSpec& s);
Potential instantiate(const PotentialSpec& s);

struct TestFunctionSpec {
  std::string family = "bump";  // bump | linear
  int count = 1;
  double amplitude_lo = 0.05, amplitude_hi = 0.5;
  double width_lo = 0.3, width_hi = 2.0;      // bump only
  double center_lo = -2.0, center_hi = 2.0;   // bump only
  std::uint64_t seed = 0;

  bool operator==(const TestFunctionSpec&) const = default;
};

struct ExperimentConfig {
  int schema = 1;
  PotentialSpec potential;
  TestFunctionSpec test_functions;
  std::vector<std::string> verifiers;
  double accuracy = 1e-6;
  std::string out = "results";

  bool operator==(const ExperimentConfig& o) const;
};

ExperimentConfig config_from_json(const ordered_json& j);
ordered_json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& file);

std::vector<SmoothFunction> generate_test_functions(const TestFunctionSpec& spec);

// A verifier whose hypotheses fail for the configured potential is skipped
// (index -1 when the whole verifier is inapplicable); numerical failures
// are recorded as errors instead.
struct SkipEntry {
  std::string verifier;
  int index = -1;
  std::string reason;
};

struct ErrorEntry {
  std::string verifier;
  int index = -1;
  std::string what;
};

struct SuiteReport {
  ExperimentConfig config;
  std::vector<VerificationReport> reports;
  std::vector<SkipEntry> skips;
  std::vector<ErrorEntry> errors;
  // Wall-clock per verifier; shown in summary.txt only so suite.json stays
  // byte-stable across reruns.
  std::vector<std::pair<std::string, double>> timings;
  ConcentrationResult sweep;
  bool has_sweep = false;
  int holds = 0, equality = 0, violated = 0;
};

SuiteReport run_suite(const ExperimentConfig& config);

ordered_json suite_to_json(const SuiteReport& s);

// Writes suite.json, one CSV per verifier that produced reports, a
// plain-text summary table and manifest.txt; returns the file names.
std::vector<std::string> emit_report(const SuiteReport& s,
                                     const std::filesystem::path& dir);

}  // namespace cvxlab
