//
// Copyright 2026 The ggdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Command-line front end: calibrate noise scales, sanitize histogram CSVs,
// compare mechanisms, and run experiment sweeps.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ggdp/analysis.hpp"
#include "ggdp/calibration.hpp"
#include "ggdp/errors.hpp"
#include "ggdp/ggdist.hpp"
#include "ggdp/mechanisms.hpp"
#include "ggdp/numerics.hpp"
#include "ggdp/pipeline.hpp"
#include "ggdp/sensitivity.hpp"
#include "nlohmann/json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIngestion = 3;
constexpr int kExitConvergence = 4;

std::vector<double> ParseDoubleList(const std::string& text,
                                    const char* what) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string field;
  while (std::getline(stream, field, ',')) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      throw ggdp::ConfigError(std::string(what) + ": unparseable number `" +
                              field + "`");
    }
    values.push_back(value);
  }
  if (values.empty()) {
    throw ggdp::ConfigError(std::string(what) + ": empty list");
  }
  return values;
}

std::vector<ggdp::Bounds> ParseBoundsList(const std::string& text) {
  std::vector<ggdp::Bounds> bounds;
  std::stringstream stream(text);
  std::string field;
  while (std::getline(stream, field, ',')) {
    const std::size_t colon = field.find(':');
    if (colon == std::string::npos) {
      throw ggdp::ConfigError("bounds entries must look like lo:hi, got `" +
                              field + "`");
    }
    const std::vector<double> lo =
        ParseDoubleList(field.substr(0, colon), "bounds");
    const std::vector<double> hi =
        ParseDoubleList(field.substr(colon + 1), "bounds");
    if (lo.size() != 1 || hi.size() != 1) {
      throw ggdp::ConfigError("bounds entries must look like lo:hi, got `" +
                              field + "`");
    }
    bounds.push_back(ggdp::Bounds{lo[0], hi[0]});
  }
  if (bounds.empty()) {
    throw ggdp::ConfigError("bounds: empty list");
  }
  return bounds;
}

nlohmann::json LoadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ggdp::IngestionError(path + ": cannot open");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ggdp::IngestionError(path + ": invalid JSON: " + e.what());
  }
  return j;
}

void WriteTextOutput(const std::string& text, const std::string& out_path,
                     bool overwrite) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  if (!overwrite && std::filesystem::exists(out_path)) {
    throw ggdp::IngestionError(out_path +
                               ": already exists (pass --overwrite to "
                               "replace it)");
  }
  std::ofstream out(out_path);
  if (!out) {
    throw ggdp::IngestionError(out_path + ": cannot open for writing");
  }
  out << text;
  if (!out) {
    throw ggdp::IngestionError(out_path + ": write failed");
  }
}

// Flags shared by `calibrate` and `sanitize` that assemble a MechanismSpec
// either from a JSON file (--spec) or from inline pieces.
struct SpecFlags {
  std::string spec_file;
  std::string mechanism;
  int p = 0;
  bool p_given = false;
  double epsilon = 0.0;
  double delta = 0.0;
  std::string profile_file;
  std::string delta1_text;
  std::string bounds_text;
  bool disjoint = false;
  std::optional<double> delta_p_override;
  std::optional<std::uint64_t> mc_draws;
  std::optional<double> mc_tol;
};

void AddSpecFlags(CLI::App* cmd, SpecFlags* flags) {
  cmd->add_option("--spec", flags->spec_file,
                  "Mechanism spec JSON file (alternative to the inline flags)");
  cmd->add_option("--mechanism", flags->mechanism,
                  "laplace | gauss_pdp | gauss_adp | gg_pdp | tgg_edp | exp_gg");
  auto* p_opt = cmd->add_option("--p", flags->p, "GG order p");
  cmd->callback([flags, p_opt]() { flags->p_given = p_opt->count() > 0; });
  cmd->add_option("--epsilon", flags->epsilon, "Privacy budget epsilon");
  cmd->add_option("--delta", flags->delta,
                  "Privacy budget delta (0 for pure mechanisms)");
  cmd->add_option("--profile", flags->profile_file,
                  "Sensitivity profile JSON file");
  cmd->add_option("--delta1", flags->delta1_text,
                  "Per-element l1 sensitivities, comma separated");
  cmd->add_option("--bounds", flags->bounds_text,
                  "Per-element output bounds lo:hi, comma separated");
  cmd->add_flag("--disjoint", flags->disjoint,
                "At most one element changes between neighboring datasets");
  cmd->add_option("--delta-p-override", flags->delta_p_override,
                  "Caller-supplied lp global sensitivity");
  cmd->add_option("--mc-draws", flags->mc_draws,
                  "Monte-Carlo calibration draws (gg_pdp)");
  cmd->add_option("--mc-tol", flags->mc_tol,
                  "Monte-Carlo bisection tolerance (gg_pdp)");
}

ggdp::SensitivityProfile ProfileFromFlags(const SpecFlags& flags) {
  if (!flags.profile_file.empty()) {
    return ggdp::ProfileFromJson(LoadJsonFile(flags.profile_file));
  }
  if (flags.delta1_text.empty()) {
    throw ggdp::ConfigError(
        "no sensitivity profile: pass --profile, --delta1, or --spec");
  }
  ggdp::SensitivityProfile profile;
  profile.delta1 = ParseDoubleList(flags.delta1_text, "delta1");
  if (!flags.bounds_text.empty()) {
    profile.bounds = ParseBoundsList(flags.bounds_text);
  }
  profile.disjoint = flags.disjoint;
  profile.delta_p_override = flags.delta_p_override;
  ggdp::ValidateProfile(profile);
  return profile;
}

// default_profile: used by `sanitize` when neither --spec, --profile, nor
// --delta1 is given (per-bin unit sensitivity over [0, n]).
ggdp::MechanismSpec SpecFromFlags(
    const SpecFlags& flags,
    const std::optional<ggdp::SensitivityProfile>& default_profile =
        std::nullopt) {
  if (!flags.spec_file.empty()) {
    if (!flags.mechanism.empty()) {
      throw ggdp::ConfigError("--spec conflicts with --mechanism");
    }
    return ggdp::MechanismSpecFromJson(LoadJsonFile(flags.spec_file));
  }
  if (flags.mechanism.empty()) {
    throw ggdp::ConfigError("pass either --spec or --mechanism");
  }
  ggdp::MechanismSpec spec;
  spec.kind = ggdp::MechanismKindFromString(flags.mechanism);
  if (flags.p_given) {
    spec.p = flags.p;
  } else if (spec.kind == ggdp::MechanismKind::kLaplace) {
    spec.p = 1;
  } else if (spec.kind == ggdp::MechanismKind::kGaussPdp ||
             spec.kind == ggdp::MechanismKind::kGaussAdp) {
    spec.p = 2;
  } else {
    throw ggdp::ConfigError("--p is required for " + flags.mechanism);
  }
  spec.privacy = ggdp::PrivacyParams{flags.epsilon, flags.delta};
  if (flags.profile_file.empty() && flags.delta1_text.empty() &&
      default_profile) {
    spec.profile = *default_profile;
  } else {
    spec.profile = ProfileFromFlags(flags);
  }
  if (flags.mc_draws || flags.mc_tol) {
    ggdp::McConfig mc;
    if (flags.mc_draws) mc.draws = *flags.mc_draws;
    if (flags.mc_tol) mc.bisection_tol = *flags.mc_tol;
    spec.mc = mc;
  }
  ggdp::ValidateMechanismSpec(spec);
  return spec;
}

int RunCalibrate(const SpecFlags& flags, std::uint64_t seed,
                 const std::string& out_path, bool overwrite) {
  const ggdp::MechanismSpec spec = SpecFromFlags(flags);
  if (spec.kind == ggdp::MechanismKind::kGaussAdp &&
      spec.privacy.epsilon >= 1.0) {
    // Standalone calibration keeps the guarded contract; the experiment
    // harness is the only consumer of the unguarded formula.
    throw ggdp::ConfigError(
        "gauss_adp calibration requires epsilon in (0, 1); the bound is not "
        "derived beyond that range");
  }
  const ggdp::CalibrationResult result =
      ggdp::CalibrateMechanism(spec, ggdp::RngStream(seed));
  WriteTextOutput(ggdp::CalibrationResultToJson(result).dump(2) + "\n",
                  out_path, overwrite);
  return kExitOk;
}

int RunSanitize(const SpecFlags& flags, const std::string& data_path,
                std::uint64_t seed, const std::string& postprocess_text,
                const std::string& out_path, bool overwrite) {
  const ggdp::Histogram hist = ggdp::LoadHistogram(data_path);
  ggdp::ValidateHistogram(hist);
  const double n = hist.Total();

  ggdp::SensitivityProfile default_profile;
  default_profile.delta1.assign(hist.size(), 1.0);
  default_profile.bounds =
      std::vector<ggdp::Bounds>(hist.size(), ggdp::Bounds{0.0, n});
  default_profile.disjoint = true;

  const ggdp::MechanismSpec spec = SpecFromFlags(flags, default_profile);
  std::vector<ggdp::PostprocessOp> ops;
  if (!postprocess_text.empty()) {
    std::stringstream stream(postprocess_text);
    std::string name;
    while (std::getline(stream, name, ',')) {
      ops.push_back(ggdp::PostprocessOpFromString(name));
    }
  }

  ggdp::RngStream rng(seed);
  ggdp::SanitizedResult release = ggdp::Sanitize(spec, hist.counts, rng);
  release.values = ggdp::ApplyPostprocess(release.values, ops,
                                          ggdp::Bounds{0.0, n}, n);
  for (ggdp::PostprocessOp op : ops) {
    release.post_ops.push_back(ggdp::ToString(op));
  }

  nlohmann::ordered_json j;
  j["mechanism"] = ggdp::ToString(spec.kind);
  j["p"] = spec.p;
  j["epsilon"] = spec.privacy.epsilon;
  j["delta"] = spec.privacy.delta;
  j["seed"] = seed;
  j["scale"] = release.scale_used;
  j["postprocess"] = release.post_ops;
  j["labels"] = hist.labels;
  j["values"] = release.values;
  WriteTextOutput(j.dump(2) + "\n", out_path, overwrite);
  return kExitOk;
}

int RunCompareTails(double epsilon, double delta, double sensitivity,
                    double t_max, std::size_t points,
                    const std::string& out_path, bool overwrite) {
  if (points < 2) {
    throw ggdp::ConfigError("--points must be at least 2");
  }
  if (!(t_max > 0.0)) {
    throw ggdp::ConfigError("--t-max must be positive");
  }
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = t_max * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  const std::vector<ggdp::TailCurvePoint> curve =
      ggdp::TailRatioCurve(epsilon, delta, sensitivity, grid);
  std::ostringstream text;
  ggdp::WriteCurveCsv(curve, text);
  WriteTextOutput(text.str(), out_path, overwrite);
  return kExitOk;
}

int RunCompareEquivEps(double epsilon1, double delta, double t,
                       double sensitivity, const std::string& out_path,
                       bool overwrite) {
  const double epsilon2 =
      ggdp::EquivalentEpsilon(epsilon1, delta, t, sensitivity);
  nlohmann::ordered_json j;
  j["epsilon1"] = epsilon1;
  j["delta"] = delta;
  j["t"] = t;
  j["sensitivity"] = sensitivity;
  j["epsilon2"] = epsilon2;
  WriteTextOutput(j.dump(2) + "\n", out_path, overwrite);
  return kExitOk;
}

int RunExperimentCmd(const std::string& config_path,
                     std::optional<std::uint64_t> seed_override,
                     const std::string& out_path, bool overwrite) {
  ggdp::ExperimentConfig config =
      ggdp::ExperimentConfigFromJson(LoadJsonFile(config_path));
  if (seed_override) {
    config.seed = *seed_override;
  }
  const ggdp::ExperimentReport report = ggdp::RunExperiment(config);
  ggdp::EmitReport(report, out_path, overwrite);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ggdp: differentially private sanitization with generalized Gaussian "
      "noise"};
  app.require_subcommand(1);

  // calibrate
  auto* calibrate = app.add_subcommand(
      "calibrate", "Compute the calibrated noise scale for a mechanism");
  SpecFlags cal_flags;
  AddSpecFlags(calibrate, &cal_flags);
  std::uint64_t cal_seed = 0;
  calibrate->add_option(
      "--seed", cal_seed,
      "Stream seed for Monte-Carlo calibration (ignored otherwise)");
  std::string cal_out;
  bool cal_overwrite = false;
  calibrate->add_option("--out", cal_out, "Output JSON path (default stdout)");
  calibrate->add_flag("--overwrite", cal_overwrite,
                      "Replace --out if it exists");

  // sanitize
  auto* sanitize =
      app.add_subcommand("sanitize", "Perturb a histogram CSV (label,count)");
  SpecFlags san_flags;
  AddSpecFlags(sanitize, &san_flags);
  std::string san_data;
  sanitize->add_option("--data", san_data, "Histogram CSV path")->required();
  std::uint64_t san_seed = 0;
  sanitize->add_option("--seed", san_seed, "Noise stream seed")->required();
  std::string san_post;
  sanitize->add_option("--postprocess", san_post,
                       "Comma-separated ops: clamp, normalize, round "
                       "(default: none)");
  std::string san_out;
  bool san_overwrite = false;
  sanitize->add_option("--out", san_out, "Output JSON path (default stdout)");
  sanitize->add_flag("--overwrite", san_overwrite,
                     "Replace --out if it exists");

  // compare (tails / equiv-eps)
  auto* compare =
      app.add_subcommand("compare", "Mechanism comparisons");
  compare->require_subcommand(1);

  auto* tails = compare->add_subcommand(
      "tails", "Laplace vs probabilistic-Gaussian tail probabilities (CSV)");
  double tails_epsilon = 1.0, tails_delta = 0.05, tails_sensitivity = 1.0;
  double tails_t_max = 10.0;
  std::size_t tails_points = 201;
  tails->add_option("--epsilon", tails_epsilon, "Privacy budget epsilon")
      ->required();
  tails->add_option("--delta", tails_delta, "Gaussian mechanism delta")
      ->required();
  tails->add_option("--sensitivity", tails_sensitivity,
                    "Shared sensitivity (default 1)");
  tails->add_option("--t-max", tails_t_max, "Largest radius (default 10)");
  tails->add_option("--points", tails_points,
                    "Grid points from 0 to --t-max (default 201)");
  std::string tails_out;
  bool tails_overwrite = false;
  tails->add_option("--out", tails_out, "Output CSV path (default stdout)");
  tails->add_flag("--overwrite", tails_overwrite,
                  "Replace --out if it exists");

  auto* equiv = compare->add_subcommand(
      "equiv-eps",
      "The epsilon at which a probabilistic Gaussian matches a Laplace tail");
  double eq_epsilon1 = 1.0, eq_delta = 0.05, eq_t = 1.0, eq_sensitivity = 1.0;
  equiv->add_option("--epsilon1", eq_epsilon1, "Laplace budget epsilon1")
      ->required();
  equiv->add_option("--delta", eq_delta, "Gaussian mechanism delta")
      ->required();
  equiv->add_option("--t", eq_t, "Tail radius")->required();
  equiv->add_option("--sensitivity", eq_sensitivity,
                    "Shared sensitivity (default 1)");
  std::string eq_out;
  bool eq_overwrite = false;
  equiv->add_option("--out", eq_out, "Output JSON path (default stdout)");
  equiv->add_flag("--overwrite", eq_overwrite, "Replace --out if it exists");

  // experiment
  auto* experiment = app.add_subcommand(
      "experiment", "Run a (mechanism, epsilon, delta) sweep from JSON config");
  std::string exp_config;
  experiment->add_option("--config", exp_config, "Experiment config JSON")
      ->required();
  std::optional<std::uint64_t> exp_seed;
  experiment->add_option("--seed", exp_seed,
                         "Override the seed from the config file");
  std::string exp_out;
  bool exp_overwrite = false;
  experiment->add_option("--out", exp_out, "Report JSON path")->required();
  experiment->add_flag("--overwrite", exp_overwrite,
                       "Replace --out if it exists");

  try {
    app.parse(argc, argv);
    if (*calibrate) {
      return RunCalibrate(cal_flags, cal_seed, cal_out, cal_overwrite);
    }
    if (*sanitize) {
      return RunSanitize(san_flags, san_data, san_seed, san_post, san_out,
                         san_overwrite);
    }
    if (*tails) {
      return RunCompareTails(tails_epsilon, tails_delta, tails_sensitivity,
                             tails_t_max, tails_points, tails_out,
                             tails_overwrite);
    }
    if (*equiv) {
      return RunCompareEquivEps(eq_epsilon1, eq_delta, eq_t, eq_sensitivity,
                                eq_out, eq_overwrite);
    }
    if (*experiment) {
      return RunExperimentCmd(exp_config, exp_seed, exp_out, exp_overwrite);
    }
    std::cerr << "no subcommand selected\n";
    return kExitConfig;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  } catch (const ggdp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ggdp::IngestionError& e) {
    std::cerr << "ingestion error: " << e.what() << "\n";
    return kExitIngestion;
  } catch (const ggdp::ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
