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

#include "ggdp/pipeline.hpp"

#include <algorithm>
#include <bitset>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "ggdp/errors.hpp"

namespace ggdp {
namespace {

// Stream identity for drawing a synthetic dataset, distinct from any cell
// stream so adding cells never reshuffles the data itself.
constexpr std::uint64_t kDatasetStreamId = 0x64617461;  // "data"

constexpr std::size_t kSynthBins = 64;

double ParseCount(const std::string& field) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw IngestionError("unparseable count `" + field + "`");
  }
  return value;
}

int DefaultOrderFor(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kLaplace:
      return 1;
    case MechanismKind::kGaussPdp:
    case MechanismKind::kGaussAdp:
      return 2;
    // The GG-family sweeps run at order 3, the non-Gaussian order the
    // reference histogram studies exercised.
    case MechanismKind::kGgPdp:
    case MechanismKind::kTggEdp:
    case MechanismKind::kExpGg:
      return 3;
  }
  throw ConfigError("unknown mechanism kind");
}

bool NeedsDelta(MechanismKind kind) {
  return kind == MechanismKind::kGaussPdp || kind == MechanismKind::kGaussAdp ||
         kind == MechanismKind::kGgPdp;
}

double Mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

double SampleSd(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) {
    ss += (x - mean) * (x - mean);
  }
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

void CheckWritable(const std::string& path, bool overwrite) {
  if (!overwrite && std::filesystem::exists(path)) {
    throw IngestionError(path + ": already exists (pass the overwrite flag "
                         "to replace it)");
  }
}

}  // namespace

double Histogram::Total() const {
  return std::accumulate(counts.begin(), counts.end(), 0.0);
}

void ValidateHistogram(const Histogram& hist) {
  if (hist.counts.empty()) {
    throw ConfigError("histogram needs at least one bin");
  }
  if (hist.labels.size() != hist.counts.size()) {
    throw ConfigError("histogram labels and counts must have equal length");
  }
  for (std::size_t k = 0; k < hist.counts.size(); ++k) {
    if (!std::isfinite(hist.counts[k]) || hist.counts[k] < 0.0) {
      throw ConfigError("histogram counts must be finite and nonnegative");
    }
  }
}

Histogram LoadHistogram(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IngestionError(path + ": cannot open");
  }
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) {
    throw IngestionError(path + ": empty file");
  }
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "label,count") {
    throw IngestionError(path + ":1: expected header `label,count`");
  }
  Histogram hist;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = path + ":" + std::to_string(lineno);
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos ||
        line.find(',', comma + 1) != std::string::npos) {
      throw IngestionError(where + ": malformed row `" + line +
                           "` (expected `label,count`)");
    }
    const std::string label = line.substr(0, comma);
    const std::string field = line.substr(comma + 1);
    double count;
    try {
      count = ParseCount(field);
    } catch (const IngestionError& e) {
      throw IngestionError(where + ": " + e.what());
    }
    if (count < 0.0) {
      throw IngestionError(where + ": negative count " + field);
    }
    hist.labels.push_back(label);
    hist.counts.push_back(count);
  }
  if (hist.counts.empty()) {
    throw IngestionError(path + ": no data rows after the header");
  }
  return hist;
}

Histogram SynthDataset(SyntheticDataset kind, RngStream rng) {
  const std::size_t nonempty = (kind == SyntheticDataset::kMildew) ? 22 : 63;
  const std::size_t total = (kind == SyntheticDataset::kMildew) ? 70 : 1841;
  Histogram hist;
  hist.labels.reserve(kSynthBins);
  for (std::size_t i = 0; i < kSynthBins; ++i) {
    hist.labels.push_back(std::bitset<6>(i).to_string());
  }
  hist.counts.assign(kSynthBins, 0.0);
  // Choose the structural support by partial Fisher-Yates.
  std::vector<std::size_t> order(kSynthBins);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < nonempty; ++i) {
    const std::size_t remaining = kSynthBins - i;
    std::size_t j = i + static_cast<std::size_t>(rng.NextUniform() *
                                                 static_cast<double>(remaining));
    j = std::min(j, kSynthBins - 1);
    std::swap(order[i], order[j]);
  }
  // Dirichlet(1) weights on the support: normalized Exp(1) draws.
  std::vector<double> cumulative(nonempty);
  double sum = 0.0;
  for (std::size_t i = 0; i < nonempty; ++i) {
    sum += -std::log(rng.NextOpenUniform());
    cumulative[i] = sum;
  }
  // Multinomial(total) by categorical inversion.
  for (std::size_t draw = 0; draw < total; ++draw) {
    const double u = rng.NextUniform() * sum;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t idx = std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative.begin()), nonempty - 1);
    hist.counts[order[idx]] += 1.0;
  }
  return hist;
}

Histogram ResolveDataset(const std::string& dataset, std::uint64_t seed) {
  if (dataset == "synthetic-mildew") {
    return SynthDataset(SyntheticDataset::kMildew,
                        RngStream(seed, kDatasetStreamId));
  }
  if (dataset == "synthetic-czech") {
    return SynthDataset(SyntheticDataset::kCzech,
                        RngStream(seed, kDatasetStreamId));
  }
  return LoadHistogram(dataset);
}

std::string ToString(PostprocessOp op) {
  switch (op) {
    case PostprocessOp::kClamp:
      return "clamp";
    case PostprocessOp::kNormalize:
      return "normalize";
    case PostprocessOp::kRound:
      return "round";
  }
  throw ConfigError("unknown postprocess op");
}

PostprocessOp PostprocessOpFromString(const std::string& name) {
  if (name == "clamp") return PostprocessOp::kClamp;
  if (name == "normalize") return PostprocessOp::kNormalize;
  if (name == "round") return PostprocessOp::kRound;
  throw ConfigError("unknown postprocess op: " + name +
                    " (expected clamp, normalize, or round)");
}

std::vector<double> ApplyPostprocess(std::vector<double> values,
                                     const std::vector<PostprocessOp>& ops,
                                     const Bounds& bounds, double total) {
  for (PostprocessOp op : ops) {
    switch (op) {
      case PostprocessOp::kClamp:
        values = Clamp(values, bounds.lo, bounds.hi);
        break;
      case PostprocessOp::kNormalize:
        values = NormalizeToTotal(values, total);
        break;
      case PostprocessOp::kRound: {
        const std::vector<std::int64_t> rounded = RoundCounts(values);
        for (std::size_t k = 0; k < values.size(); ++k) {
          values[k] = static_cast<double>(rounded[k]);
        }
        break;
      }
    }
  }
  return values;
}

void ValidateExperimentConfig(const ExperimentConfig& config) {
  if (config.dataset.empty()) {
    throw ConfigError("experiment config requires a dataset");
  }
  if (config.mechanisms.empty()) {
    throw ConfigError("experiment config requires at least one mechanism");
  }
  if (config.epsilons.empty()) {
    throw ConfigError("experiment config requires at least one epsilon");
  }
  for (double eps : config.epsilons) {
    if (!std::isfinite(eps) || !(eps > 0.0)) {
      throw ConfigError("epsilons must be positive and finite");
    }
  }
  for (double delta : config.deltas) {
    if (!(delta > 0.0) || !(delta < 1.0)) {
      throw ConfigError("deltas must lie in (0, 1); pure mechanisms run at "
                        "delta = 0 automatically");
    }
  }
  const bool any_relaxed =
      std::any_of(config.mechanisms.begin(), config.mechanisms.end(),
                  [](MechanismKind kind) { return NeedsDelta(kind); });
  if (any_relaxed && config.deltas.empty()) {
    throw ConfigError("a relaxed mechanism is configured but the delta list "
                      "is empty");
  }
  if (config.repeats < 1) {
    throw ConfigError("repeats must be at least 1");
  }
}

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw ConfigError("experiment config JSON must be an object");
  }
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    if (key != "dataset" && key != "mechanisms" && key != "epsilons" &&
        key != "deltas" && key != "repeats" && key != "seed" &&
        key != "postprocess") {
      throw ConfigError("unknown field in experiment config: " + key);
    }
  }
  ExperimentConfig config;
  if (!j.contains("dataset") || !j["dataset"].is_string()) {
    throw ConfigError("experiment config requires a `dataset` string");
  }
  config.dataset = j["dataset"].get<std::string>();
  if (!j.contains("mechanisms") || !j["mechanisms"].is_array()) {
    throw ConfigError("experiment config requires a `mechanisms` array");
  }
  for (const auto& m : j["mechanisms"]) {
    if (!m.is_string()) {
      throw ConfigError("mechanism entries must be strings");
    }
    config.mechanisms.push_back(MechanismKindFromString(m.get<std::string>()));
  }
  if (j.contains("epsilons")) {
    if (!j["epsilons"].is_array()) {
      throw ConfigError("`epsilons` must be an array of numbers");
    }
    config.epsilons.clear();
    for (const auto& e : j["epsilons"]) {
      if (!e.is_number()) throw ConfigError("epsilons must be numbers");
      config.epsilons.push_back(e.get<double>());
    }
  }
  if (j.contains("deltas")) {
    if (!j["deltas"].is_array()) {
      throw ConfigError("`deltas` must be an array of numbers");
    }
    config.deltas.clear();
    for (const auto& d : j["deltas"]) {
      if (!d.is_number()) throw ConfigError("deltas must be numbers");
      config.deltas.push_back(d.get<double>());
    }
  }
  if (j.contains("repeats")) {
    if (!j["repeats"].is_number_integer()) {
      throw ConfigError("`repeats` must be an integer");
    }
    config.repeats = j["repeats"].get<int>();
  }
  if (!j.contains("seed") || !j["seed"].is_number_unsigned()) {
    throw ConfigError("experiment config requires an unsigned integer `seed`");
  }
  config.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("postprocess")) {
    if (!j["postprocess"].is_array()) {
      throw ConfigError("`postprocess` must be an array of op names");
    }
    config.postprocess.clear();
    for (const auto& op : j["postprocess"]) {
      if (!op.is_string()) {
        throw ConfigError("postprocess entries must be strings");
      }
      config.postprocess.push_back(
          PostprocessOpFromString(op.get<std::string>()));
    }
  }
  ValidateExperimentConfig(config);
  return config;
}

nlohmann::ordered_json ExperimentConfigToJson(const ExperimentConfig& config) {
  nlohmann::ordered_json j;
  j["dataset"] = config.dataset;
  nlohmann::ordered_json mechanisms = nlohmann::ordered_json::array();
  for (MechanismKind kind : config.mechanisms) {
    mechanisms.push_back(ToString(kind));
  }
  j["mechanisms"] = std::move(mechanisms);
  j["epsilons"] = config.epsilons;
  j["deltas"] = config.deltas;
  j["repeats"] = config.repeats;
  j["seed"] = config.seed;
  nlohmann::ordered_json ops = nlohmann::ordered_json::array();
  for (PostprocessOp op : config.postprocess) {
    ops.push_back(ToString(op));
  }
  j["postprocess"] = std::move(ops);
  return j;
}

ExperimentReport RunExperiment(const ExperimentConfig& config) {
  ValidateExperimentConfig(config);
  const Histogram hist = ResolveDataset(config.dataset, config.seed);
  ValidateHistogram(hist);
  const std::size_t r = hist.size();
  const double n = hist.Total();
  if (!(n > 0.0)) {
    throw IngestionError("dataset is empty: total count must be positive");
  }

  // Histogram releases: each individual lands in exactly one bin, so one
  // element changes by at most 1 between neighbors, and counts live in
  // [0, n].
  SensitivityProfile profile;
  profile.delta1.assign(r, 1.0);
  profile.bounds = std::vector<Bounds>(r, Bounds{0.0, n});
  profile.disjoint = true;

  ExperimentReport report;
  report.version = kToolkitVersion;
  report.dataset = config.dataset;
  report.seed = config.seed;
  report.repeats = config.repeats;
  report.bins = r;
  report.n = n;
  for (PostprocessOp op : config.postprocess) {
    report.postprocess.push_back(ToString(op));
  }

  const Bounds clamp_bounds{0.0, n};
  std::uint64_t cell_index = 0;
  for (MechanismKind kind : config.mechanisms) {
    const std::vector<double> cell_deltas =
        NeedsDelta(kind) ? config.deltas : std::vector<double>{0.0};
    for (double epsilon : config.epsilons) {
      for (double delta : cell_deltas) {
        MechanismSpec spec;
        spec.kind = kind;
        spec.p = DefaultOrderFor(kind);
        spec.privacy = PrivacyParams{epsilon, delta};
        spec.profile = profile;
        // Disjoint profiles calibrate deterministically; the stream is only
        // a formal argument here.
        const CalibrationResult cal = CalibrateMechanism(
            spec, RngStream(config.seed, FoldStreamId({0x63616cULL,
                                                       cell_index})));
        const double scale =
            (kind == MechanismKind::kGaussPdp ||
             kind == MechanismKind::kGaussAdp)
                ? cal.sigma
                : cal.b;
        std::vector<double> l1(config.repeats);
        std::vector<double> kl(config.repeats);
        for (int rep = 0; rep < config.repeats; ++rep) {
          RngStream stream(
              config.seed,
              FoldStreamId({cell_index, static_cast<std::uint64_t>(rep)}));
          const SanitizedResult release =
              SanitizeWithScale(spec, scale, hist.counts, stream);
          const std::vector<double> post = ApplyPostprocess(
              release.values, config.postprocess, clamp_bounds, n);
          l1[rep] = L1Distance(hist.counts, post);
          kl[rep] = KlDivergence(hist.counts, post);
        }
        CellStats cell;
        cell.mechanism = kind;
        cell.p = spec.p;
        cell.epsilon = epsilon;
        cell.delta = delta;
        cell.scale = scale;
        cell.mean_l1 = Mean(l1);
        cell.sd_l1 = SampleSd(l1, cell.mean_l1);
        cell.mean_kl = Mean(kl);
        cell.sd_kl = SampleSd(kl, cell.mean_kl);
        report.cells.push_back(cell);
        ++cell_index;
      }
    }
  }
  return report;
}

nlohmann::ordered_json ReportToJson(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["version"] = report.version;
  j["dataset"] = report.dataset;
  j["seed"] = report.seed;
  j["repeats"] = report.repeats;
  j["bins"] = report.bins;
  j["n"] = report.n;
  j["postprocess"] = report.postprocess;
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (const CellStats& cell : report.cells) {
    nlohmann::ordered_json c;
    c["mechanism"] = ToString(cell.mechanism);
    c["p"] = cell.p;
    c["epsilon"] = cell.epsilon;
    c["delta"] = cell.delta;
    c["scale"] = cell.scale;
    c["mean_l1"] = cell.mean_l1;
    c["sd_l1"] = cell.sd_l1;
    c["mean_kl"] = cell.mean_kl;
    c["sd_kl"] = cell.sd_kl;
    cells.push_back(std::move(c));
  }
  j["cells"] = std::move(cells);
  return j;
}

void EmitReport(const ExperimentReport& report, const std::string& path,
                bool overwrite) {
  CheckWritable(path, overwrite);
  std::ofstream out(path);
  if (!out) {
    throw IngestionError(path + ": cannot open for writing");
  }
  out << ReportToJson(report).dump(2) << "\n";
  if (!out) {
    throw IngestionError(path + ": write failed");
  }
}

void EmitCurveCsv(const std::vector<TailCurvePoint>& points,
                  const std::string& path, bool overwrite) {
  CheckWritable(path, overwrite);
  std::ofstream out(path);
  if (!out) {
    throw IngestionError(path + ": cannot open for writing");
  }
  WriteCurveCsv(points, out);
  if (!out) {
    throw IngestionError(path + ": write failed");
  }
}

}  // namespace ggdp
