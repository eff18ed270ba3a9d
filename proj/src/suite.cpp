#include "cvxlab/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "cvxlab/numerics.hpp"
#include "cvxlab/regularity.hpp"
#include "cvxlab/transport.hpp"

namespace cvxlab {

namespace {

const std::set<std::string>& known_verifiers() {
  static const std::set<std::string> k = {
      "mlsi",      "brascamp_lieb", "power_lsi",        "hphi",
      "perturbed", "euclidean",     "homogeneous",      "nontight",
      "prekopa_leindler", "transport", "concentration"};
  return k;
}

[[noreturn]] void config_error(const std::string& msg) {
  throw PreconditionError("config: " + msg);
}

double get_number(const ordered_json& j, const std::string& field) {
  if (!j.contains(field) || !j.at(field).is_number())
    config_error("field '" + field + "' must be a number");
  return j.at(field).get<double>();
}

std::pair<double, double> get_range(const ordered_json& j, const std::string& field) {
  const auto& v = j.at(field);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    config_error("field '" + field + "' must be a [lo, hi] pair");
  double lo = v[0].get<double>(), hi = v[1].get<double>();
  if (!(lo <= hi)) config_error("field '" + field + "' must have lo <= hi");
  return {lo, hi};
}

}  // namespace

bool PotentialSpec::operator==(const PotentialSpec& o) const {
  if (kind != o.kind || p != o.p || coeffs != o.coeffs ||
      perturbation_amplitude != o.perturbation_amplitude)
    return false;
  if ((base == nullptr) != (o.base == nullptr)) return false;
  return base == nullptr || *base == *o.base;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return schema == o.schema && potential == o.potential &&
         test_functions == o.test_functions && verifiers == o.verifiers &&
         accuracy == o.accuracy && out == o.out;
}

PotentialSpec potential_spec_from_json(const ordered_json& j) {
  if (!j.is_object()) config_error("potential spec must be an object");
  static const std::set<std::string> allowed = {"kind", "p", "coeffs", "base",
                                               "perturbation_amplitude"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      config_error("potential spec has unknown field '" + it.key() + "'");
  if (!j.contains("kind") || !j.at("kind").is_string())
    config_error("potential spec needs a string field 'kind'");
  PotentialSpec s;
  s.kind = j.at("kind").get<std::string>();
  if (s.kind == "gaussian") {
    if (j.size() != 1) config_error("gaussian potential takes no extra fields");
  } else if (s.kind == "power") {
    s.p = get_number(j, "p");
    if (!(s.p > 1.0) || !std::isfinite(s.p))
      config_error("power potential needs finite p > 1");
    if (j.size() != 2) config_error("power potential takes only 'p'");
  } else if (s.kind == "polynomial") {
    if (!j.contains("coeffs") || !j.at("coeffs").is_array() || j.at("coeffs").empty())
      config_error("polynomial potential needs a nonempty 'coeffs' array");
    for (const auto& c : j.at("coeffs")) {
      if (!c.is_number()) config_error("'coeffs' entries must be numbers");
      s.coeffs.push_back(c.get<double>());
      if (!std::isfinite(s.coeffs.back()))
        config_error("'coeffs' entries must be finite");
    }
    if (j.size() != 2) config_error("polynomial potential takes only 'coeffs'");
  } else if (s.kind == "perturbed") {
    if (!j.contains("base")) config_error("perturbed potential needs 'base'");
    s.base = std::make_shared<PotentialSpec>(potential_spec_from_json(j.at("base")));
    s.perturbation_amplitude = get_number(j, "perturbation_amplitude");
    if (!std::isfinite(s.perturbation_amplitude) ||
        std::abs(s.perturbation_amplitude) > 10.0)
      config_error("'perturbation_amplitude' must be finite and within [-10, 10]");
    if (j.size() != 3)
      config_error("perturbed potential takes only 'base' and 'perturbation_amplitude'");
  } else {
    config_error("unknown potential kind '" + s.kind + "'");
  }
  return s;
}

ordered_json potential_spec_to_json(const PotentialSpec& s) {
  ordered_json j;
  j["kind"] = s.kind;
  if (s.kind == "power") j["p"] = s.p;
  if (s.kind == "polynomial") j["coeffs"] = s.coeffs;
  if (s.kind == "perturbed") {
    j["base"] = potential_spec_to_json(*s.base);
    j["perturbation_amplitude"] = s.perturbation_amplitude;
  }
  return j;
}

Potential instantiate(const PotentialSpec& s) {
  if (s.kind == "gaussian") return Potential::gaussian(1);
  if (s.kind == "power") return Potential::power(s.p, 1);
  if (s.kind == "polynomial") return Potential::polynomial(s.coeffs);
  if (s.kind == "perturbed")
    return Potential::perturbed(instantiate(*s.base),
                                SmoothFunction::sine(1, s.perturbation_amplitude));
  throw PreconditionError("config: unknown potential kind '" + s.kind + "'");
}

namespace {

TestFunctionSpec test_functions_from_json(const ordered_json& j) {
  if (!j.is_object()) config_error("'test_functions' must be an object");
  static const std::set<std::string> allowed = {"family",  "count", "amplitude",
                                               "width",   "center", "seed"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      config_error("'test_functions' has unknown field '" + it.key() + "'");
  TestFunctionSpec t;
  if (j.contains("family")) {
    if (!j.at("family").is_string()) config_error("'family' must be a string");
    t.family = j.at("family").get<std::string>();
    if (t.family != "bump" && t.family != "linear")
      config_error("'family' must be \"bump\" or \"linear\"");
  }
  if (j.contains("count")) {
    if (!j.at("count").is_number_integer()) config_error("'count' must be an integer");
    t.count = j.at("count").get<int>();
    if (t.count < 1 || t.count > 10000)
      config_error("'count' must lie in [1, 10000]");
  }
  if (j.contains("amplitude"))
    std::tie(t.amplitude_lo, t.amplitude_hi) = get_range(j, "amplitude");
  if (j.contains("width")) {
    std::tie(t.width_lo, t.width_hi) = get_range(j, "width");
    if (!(t.width_lo > 0.0)) config_error("'width' must be positive");
  }
  if (j.contains("center"))
    std::tie(t.center_lo, t.center_hi) = get_range(j, "center");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
      config_error("'seed' must be a nonnegative integer");
    if (j.at("seed").is_number_integer() && j.at("seed").get<long long>() < 0)
      config_error("'seed' must be nonnegative");
    t.seed = j.at("seed").get<std::uint64_t>();
  }
  return t;
}

ordered_json test_functions_to_json(const TestFunctionSpec& t) {
  ordered_json j;
  j["family"] = t.family;
  j["count"] = t.count;
  j["amplitude"] = {t.amplitude_lo, t.amplitude_hi};
  j["width"] = {t.width_lo, t.width_hi};
  j["center"] = {t.center_lo, t.center_hi};
  j["seed"] = t.seed;
  return j;
}

}  // namespace

ExperimentConfig config_from_json(const ordered_json& j) {
  if (!j.is_object()) config_error("top level must be an object");
  static const std::set<std::string> allowed = {"schema",    "potential",
                                               "test_functions", "verifiers",
                                               "accuracy",  "out"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      config_error("unknown field '" + it.key() + "'");
  ExperimentConfig c;
  if (!j.contains("schema") || !j.at("schema").is_number_integer() ||
      j.at("schema").get<int>() != 1)
    config_error("field 'schema' must be the integer 1");
  if (!j.contains("potential")) config_error("field 'potential' is required");
  c.potential = potential_spec_from_json(j.at("potential"));
  if (!j.contains("verifiers") || !j.at("verifiers").is_array() ||
      j.at("verifiers").empty())
    config_error("field 'verifiers' must be a nonempty array");
  for (const auto& v : j.at("verifiers")) {
    if (!v.is_string()) config_error("'verifiers' entries must be strings");
    std::string name = v.get<std::string>();
    if (!known_verifiers().count(name))
      config_error("unknown verifier '" + name + "'");
    if (std::find(c.verifiers.begin(), c.verifiers.end(), name) != c.verifiers.end())
      config_error("duplicate verifier '" + name + "'");
    c.verifiers.push_back(name);
  }
  if (j.contains("test_functions"))
    c.test_functions = test_functions_from_json(j.at("test_functions"));
  if (j.contains("accuracy")) {
    c.accuracy = get_number(j, "accuracy");
    if (!(c.accuracy >= 1e-12 && c.accuracy <= 1e-4))
      config_error("'accuracy' must lie in [1e-12, 1e-4]");
  }
  if (j.contains("out")) {
    if (!j.at("out").is_string()) config_error("'out' must be a string");
    c.out = j.at("out").get<std::string>();
  }
  return c;
}

ordered_json config_to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["schema"] = c.schema;
  j["potential"] = potential_spec_to_json(c.potential);
  j["test_functions"] = test_functions_to_json(c.test_functions);
  j["verifiers"] = c.verifiers;
  j["accuracy"] = c.accuracy;
  j["out"] = c.out;
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream ifs(file);
  if (!ifs) throw PreconditionError("config: cannot open " + file.string());
  ordered_json j;
  try {
    j = ordered_json::parse(ifs);
  } catch (const nlohmann::json::parse_error& e) {
    throw PreconditionError("config: " + file.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::vector<SmoothFunction> generate_test_functions(const TestFunctionSpec& spec) {
  if (spec.family != "bump" && spec.family != "linear")
    throw PreconditionError("config: unknown test function family '" + spec.family + "'");
  if (spec.count < 1) throw PreconditionError("config: test function count must be positive");
  Rng rng(spec.seed);
  std::vector<SmoothFunction> out;
  out.reserve(spec.count);
  for (int k = 0; k < spec.count; ++k) {
    if (spec.family == "bump") {
      double a = rng.uniform(spec.amplitude_lo, spec.amplitude_hi);
      double w = rng.uniform(spec.width_lo, spec.width_hi);
      double c = rng.uniform(spec.center_lo, spec.center_hi);
      out.push_back(SmoothFunction::bump(a, w, scalar_vec(c)));
    } else {
      double s = rng.uniform(spec.amplitude_lo, spec.amplitude_hi);
      out.push_back(SmoothFunction::linear(scalar_vec(s)));
    }
  }
  return out;
}

namespace {

Measure build_config_measure(const Potential& phi, double accuracy) {
  if (phi.kind() == PotentialKind::perturbed) {
    // The combined potential need not be convex; the base carries the
    // hypotheses and the bounded oscillation keeps the measure comparable.
    const Potential& base = phi.base();
    check_superlinearity(base);
    check_strict_convexity(base, ProbeBox::symmetric(base.dimension(), 8.0), 33);
    double near = perturbation_oscillation(phi.perturbation(), 8.0);
    double far = perturbation_oscillation(phi.perturbation(), 32.0);
    if (far - near > 1e-6 * (1.0 + near))
      throw PreconditionError(
          "config: perturbation oscillation grows with the probe radius");
    Measure::BuildOptions opt;
    opt.check_convexity = false;
    return Measure::build(phi, accuracy, opt);
  }
  return Measure::build(phi, accuracy);
}

SmoothFunction exp_of(const SmoothFunction& g) {
  SmoothFunction f;
  f.dimension = g.dimension;
  f.value = [g](const Vector& x) { return std::exp(g.value(x)); };
  f.gradient = [g](const Vector& x) {
    return Vector(std::exp(g.value(x)) * g.gradient(x));
  };
  f.hessian = [g](const Vector& x) {
    double e = std::exp(g.value(x));
    Vector d = g.gradient(x);
    return Matrix(e * (g.hessian(x) + d * d.transpose()));
  };
  return f;
}

// g - phi: how a tilt of the measure reads as a flat-space test function.
// The generated tilts alone have no Lebesgue decay, so the flat-space
// verifiers get the full tilted exponent instead.
SmoothFunction tilt_minus_potential(const SmoothFunction& g, const Potential& phi) {
  SmoothFunction f;
  f.dimension = g.dimension;
  f.value = [g, phi](const Vector& x) { return g.value(x) - phi.value(x); };
  f.gradient = [g, phi](const Vector& x) {
    return Vector(g.gradient(x) - phi.gradient(x));
  };
  f.hessian = [g, phi](const Vector& x) {
    return Matrix(g.hessian(x) - phi.hessian(x));
  };
  return f;
}

}  // namespace

SuiteReport run_suite(const ExperimentConfig& config) {
  if (config.schema != 1) config_error("field 'schema' must be the integer 1");
  if (config.verifiers.empty()) config_error("field 'verifiers' must be a nonempty array");
  for (const std::string& v : config.verifiers)
    if (!known_verifiers().count(v)) config_error("unknown verifier '" + v + "'");
  if (!(config.accuracy >= 1e-12 && config.accuracy <= 1e-4))
    config_error("'accuracy' must lie in [1e-12, 1e-4]");

  SuiteReport out;
  out.config = config;
  Potential phi = instantiate(config.potential);
  Measure mu = build_config_measure(phi, config.accuracy);
  std::vector<SmoothFunction> gs = generate_test_functions(config.test_functions);

  std::optional<RegularityProfile> reg_cache;
  auto reg = [&]() -> const RegularityProfile& {
    if (!reg_cache)
      reg_cache = analyze_regularity(mu.raw_potential().without_shift(),
                                     ProbeBox::symmetric(1, 8.0), 65);
    return *reg_cache;
  };

  auto push = [&](VerificationReport rep, int index) {
    rep.meta["index"] = index;
    out.reports.push_back(std::move(rep));
  };
  auto per_g = [&](const std::string& name,
                   const std::function<VerificationReport(const SmoothFunction&)>& fn) {
    for (int k = 0; k < static_cast<int>(gs.size()); ++k) {
      try {
        push(fn(gs[k]), k);
      } catch (const PreconditionError& e) {
        out.skips.push_back({name, k, e.what()});
      } catch (const NumericalError& e) {
        out.errors.push_back({name, k, e.what()});
      }
    }
  };

  for (const std::string& name : config.verifiers) {
    auto t0 = std::chrono::steady_clock::now();
    try {
      if (name == "mlsi") {
        per_g(name, [&](const SmoothFunction& g) { return verify_mlsi(mu, g); });
      } else if (name == "brascamp_lieb") {
        per_g(name, [&](const SmoothFunction& g) { return verify_brascamp_lieb(mu, g); });
      } else if (name == "power_lsi") {
        PotentialKind k = mu.raw_potential().kind();
        if (k != PotentialKind::gaussian && k != PotentialKind::power)
          throw PreconditionError("measure does not come from a power family potential");
        per_g(name, [&](const SmoothFunction& g) { return verify_power_lsi(mu, g); });
      } else if (name == "hphi") {
        extract_hphi(mu.raw_potential());  // applicability gate, reports the reason
        per_g(name, [&](const SmoothFunction& g) { return verify_hphi_mlsi(mu, g); });
      } else if (name == "perturbed") {
        SmoothFunction U = SmoothFunction::sine(1, 0.1);
        check_superlinearity(phi);
        check_strict_convexity(phi, ProbeBox::symmetric(1, 8.0), 33);
        Measure::BuildOptions opt;
        opt.check_convexity = false;
        Measure mu_pert =
            Measure::build(Potential::perturbed(phi, U), config.accuracy, opt);
        per_g(name,
              [&](const SmoothFunction& g) { return verify_perturbed_with(mu_pert, g); });
      } else if (name == "euclidean") {
        per_g(name, [&](const SmoothFunction& g) {
          return verify_euclidean_lsi(mu.potential(),
                                      tilt_minus_potential(g, mu.potential()), 1.0,
                                      config.accuracy);
        });
      } else if (name == "homogeneous") {
        if (!reg().homogeneity_q)
          throw PreconditionError("potential is not homogeneous");
        double q = *reg().homogeneity_q;
        Potential p0 = mu.raw_potential().without_shift();
        per_g(name, [&](const SmoothFunction& g) {
          return verify_homogeneous_elsi(p0, q, tilt_minus_potential(g, p0),
                                         config.accuracy);
        });
      } else if (name == "nontight") {
        if (!reg().growth_B)
          throw PreconditionError("no upper growth exponent on the ladder");
        double A = *reg().growth_B - 1.0;
        if (!(A > 0.0))
          throw PreconditionError("upper growth exponent must exceed 1");
        NontightConstants nc = nontight_constants(mu, A);
        per_g(name, [&](const SmoothFunction& g) { return verify_nontight(mu, g, nc); });
      } else if (name == "prekopa_leindler") {
        Potential p0 = mu.raw_potential().without_shift();
        GridFunction1D u = GridFunction1D::from_samples(
            [&p0](double x) { return std::exp(-p0.value(x)); }, -8.0, 8.0, 4097);
        push(check_prekopa_leindler(u, u, u, 0.5), 0);
      } else if (name == "transport") {
        per_g(name, [&](const SmoothFunction& g) {
          TransportInstance inst = make_transport_instance(mu, exp_of(g));
          return verify_transport(mu, inst);
        });
      } else if (name == "concentration") {
        ConcentrationBound bnd;
        if (mu.raw_potential().kind() == PotentialKind::gaussian) {
          bnd = gross_bound(mu.raw_potential().second_deriv(0.0));
        } else {
          HPhiProfile prof = extract_hphi(mu.raw_potential());
          if (!reg().growth_B)
            throw PreconditionError("no upper growth exponent on the ladder");
          bnd = calibrate_constants(prof, *reg().growth_B);
        }
        std::vector<double> grid;
        for (int k = 1; k <= 16; ++k) grid.push_back(0.5 * k);
        auto F = [](const Vector& x) { return x.sum(); };
        ConcentrationResult res = run_concentration(mu, F, 5, bnd, grid, 20000,
                                                    config.test_functions.seed);
        double worst = -kInf;
        for (std::size_t i = 0; i < res.lambda.size(); ++i)
          worst = std::max(worst, res.wilson_upper[i] - res.bound[i]);
        VerificationReport rep = make_report("concentration", worst, 0.0, 1e-12);
        rep.meta["n"] = res.n;
        rep.meta["samples"] = res.samples;
        rep.meta["seed"] = res.seed;
        rep.meta["C1"] = bnd.C1;
        rep.meta["C2"] = bnd.C2;
        rep.meta["C3"] = std::isfinite(bnd.C3) ? ordered_json(bnd.C3)
                                               : ordered_json("inf");
        rep.meta["constant_recipe"] = "implementation-defined";
        push(std::move(rep), 0);
        out.sweep = std::move(res);
        out.has_sweep = true;
      }
    } catch (const PreconditionError& e) {
      out.skips.push_back({name, -1, e.what()});
    } catch (const NumericalError& e) {
      out.errors.push_back({name, -1, e.what()});
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.timings.emplace_back(name, secs);
  }

  for (const VerificationReport& r : out.reports) {
    if (r.status == Status::holds) ++out.holds;
    else if (r.status == Status::equality) ++out.equality;
    else ++out.violated;
  }
  return out;
}

ordered_json suite_to_json(const SuiteReport& s) {
  ordered_json j;
  j["schema"] = 1;
  j["config"] = config_to_json(s.config);
  ordered_json summary;
  summary["holds"] = s.holds;
  summary["equality"] = s.equality;
  summary["violated"] = s.violated;
  summary["skips"] = s.skips.size();
  summary["errors"] = s.errors.size();
  j["summary"] = summary;
  ordered_json reports = ordered_json::array();
  for (const VerificationReport& r : s.reports) reports.push_back(to_json(r));
  j["reports"] = reports;
  ordered_json skips = ordered_json::array();
  for (const SkipEntry& e : s.skips) {
    ordered_json sj;
    sj["verifier"] = e.verifier;
    sj["index"] = e.index;
    sj["reason"] = e.reason;
    skips.push_back(sj);
  }
  j["skips"] = skips;
  ordered_json errors = ordered_json::array();
  for (const ErrorEntry& e : s.errors) {
    ordered_json ej;
    ej["verifier"] = e.verifier;
    ej["index"] = e.index;
    ej["error"] = e.what;
    errors.push_back(ej);
  }
  j["errors"] = errors;
  return j;
}

std::vector<std::string> emit_report(const SuiteReport& s,
                                     const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory " + dir.string() +
                             ": " + ec.message());
  auto open = [&](const std::string& name) {
    std::ofstream ofs(dir / name, std::ios::binary);
    if (!ofs)
      throw std::runtime_error("cannot open " + (dir / name).string() +
                               " for writing");
    return ofs;
  };
  std::vector<std::string> files;
  {
    std::ofstream ofs = open("suite.json");
    ofs << suite_to_json(s).dump(2) << "\n";
    files.push_back("suite.json");
  }
  std::vector<std::string> order;
  for (const VerificationReport& r : s.reports)
    if (std::find(order.begin(), order.end(), r.name) == order.end())
      order.push_back(r.name);
  for (const std::string& name : order) {
    std::string fname = name + ".csv";
    std::ofstream ofs = open(fname);
    if (name == "concentration" && s.has_sweep) {
      write_csv(s.sweep, ofs);
    } else {
      ofs << "index,lhs,rhs,margin,rel_margin,status,tolerance\n";
      char buf[256];
      for (const VerificationReport& r : s.reports) {
        if (r.name != name) continue;
        int idx = r.meta.contains("index") ? r.meta.at("index").get<int>() : 0;
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%s,%.17g\n",
                      idx, r.lhs, r.rhs, r.margin, r.rel_margin,
                      to_string(r.status), r.tolerance);
        ofs << buf;
      }
    }
    files.push_back(fname);
  }
  {
    std::ofstream ofs = open("summary.txt");
    ofs << "verifier            reports  holds  equality  violated  skips  errors  seconds\n";
    for (const auto& [name, secs] : s.timings) {
      int reports = 0, holds = 0, eq = 0, viol = 0;
      for (const VerificationReport& r : s.reports) {
        if (r.name != name) continue;
        ++reports;
        if (r.status == Status::holds) ++holds;
        else if (r.status == Status::equality) ++eq;
        else ++viol;
      }
      int skips = 0, errors = 0;
      for (const SkipEntry& e : s.skips)
        if (e.verifier == name) ++skips;
      for (const ErrorEntry& e : s.errors)
        if (e.verifier == name) ++errors;
      char buf[256];
      std::snprintf(buf, sizeof(buf), "%-18s %8d %6d %9d %9d %6d %7d %8.3f\n",
                    name.c_str(), reports, holds, eq, viol, skips, errors, secs);
      ofs << buf;
    }
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "total: %d reports, %d holds, %d equality, %d violated, %zu skips, %zu errors\n",
                  static_cast<int>(s.reports.size()), s.holds, s.equality,
                  s.violated, s.skips.size(), s.errors.size());
    ofs << buf;
    for (const SkipEntry& e : s.skips)
      ofs << "skip: " << e.verifier << "[" << e.index << "]: " << e.reason << "\n";
    for (const ErrorEntry& e : s.errors)
      ofs << "error: " << e.verifier << "[" << e.index << "]: " << e.what << "\n";
    files.push_back("summary.txt");
  }
  {
    std::ofstream ofs = open("manifest.txt");
    for (const std::string& f : files) ofs << f << "\n";
    files.push_back("manifest.txt");
  }
  return files;
}

}  // namespace cvxlab
