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

#ifndef GGDP_PIPELINE_H_
#define GGDP_PIPELINE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ggdp/analysis.hpp"
#include "ggdp/mechanisms.hpp"
#include "ggdp/numerics.hpp"
#include "nlohmann/json.hpp"

// Data ingestion, synthetic benchmark datasets, and the experiment harness
// that sweeps mechanisms over (epsilon, delta) grids on histogram data.

namespace ggdp {

// Toolkit version stamped into every emitted report.
inline constexpr char kToolkitVersion[] = "0.1.0";

// A labelled histogram: bin labels plus nonnegative real-valued counts.
struct Histogram {
  std::vector<std::string> labels;
  std::vector<double> counts;

  std::size_t size() const { return counts.size(); }
  // Total count n = sum over bins.
  double Total() const;
};

// Throws ConfigError unless the histogram has at least one bin, label and
// count vectors of equal length, and all counts nonnegative and finite.
void ValidateHistogram(const Histogram& hist);

// Parses a histogram from a CSV file with header `label,count`, UTF-8, LF
// line endings. Counts must parse as nonnegative reals. Throws
// IngestionError naming the offending line for a missing file, a malformed
// row, a negative count, or an empty data section.
Histogram LoadHistogram(const std::string& path);

// Synthetic stand-ins for the two benchmark contingency tables. Both span
// 64 bins labelled by 6-bit binary strings ("000000" .. "111111").
//   - kMildew: 22 structurally nonempty bins (chosen at random), Dirichlet(1)
//     weights on them, multinomial total n = 70. At least 42 bins are empty.
//   - kCzech: 63 structurally nonempty bins of 64, multinomial total n = 1841.
enum class SyntheticDataset {
  kMildew,
  kCzech,
};

// Draws the synthetic dataset using (a private copy of) the given stream, so
// equal streams yield identical histograms and the caller's stream state is
// not consumed.
Histogram SynthDataset(SyntheticDataset kind, RngStream rng);

// Maps a dataset descriptor to a histogram: "synthetic-mildew" and
// "synthetic-czech" generate synthetic data seeded from `seed`; any other
// value is treated as a CSV file path. Throws IngestionError on file
// problems.
Histogram ResolveDataset(const std::string& dataset, std::uint64_t seed);

// Post-processing steps applied to sanitized counts, in configured order.
enum class PostprocessOp {
  kClamp,      // clamp each bin into [0, n]
  kNormalize,  // rescale nonnegative counts to sum to n
  kRound,      // round each bin to the nearest integer
};

std::string ToString(PostprocessOp op);
// Accepts "clamp", "normalize", "round"; throws ConfigError otherwise.
PostprocessOp PostprocessOpFromString(const std::string& name);

// Applies the ops left to right. Clamping uses `bounds`; normalization
// targets `total`.
std::vector<double> ApplyPostprocess(std::vector<double> values,
                                     const std::vector<PostprocessOp>& ops,
                                     const Bounds& bounds, double total);

// Full description of one experiment sweep.
struct ExperimentConfig {
  // "synthetic-mildew", "synthetic-czech", or a histogram CSV path.
  std::string dataset;
  // Mechanisms to sweep. Pure eps-DP mechanisms (laplace, tgg_edp, exp_gg)
  // run once per epsilon at delta = 0; the others run once per
  // (epsilon, delta) pair. GG-family mechanisms use order p = 3.
  std::vector<MechanismKind> mechanisms;
  std::vector<double> epsilons = {0.5, 1.0, 2.0};
  std::vector<double> deltas = {0.01, 0.05, 0.1, 0.25};
  int repeats = 500;
  std::uint64_t seed = 0;
  std::vector<PostprocessOp> postprocess = {PostprocessOp::kClamp,
                                            PostprocessOp::kNormalize};
};

// Throws ConfigError if any field is out of range or any (mechanism, delta)
// pairing is invalid, before any sampling work starts.
void ValidateExperimentConfig(const ExperimentConfig& config);

// JSON round-trip for configs. Field names match the struct members; unknown
// fields are rejected with ConfigError. `dataset`, `mechanisms`, and `seed`
// are required; the rest default as above.
ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j);
nlohmann::ordered_json ExperimentConfigToJson(const ExperimentConfig& config);

// Aggregated error metrics for one (mechanism, epsilon, delta) grid cell.
struct CellStats {
  MechanismKind mechanism = MechanismKind::kLaplace;
  int p = 1;
  double epsilon = 0.0;
  double delta = 0.0;
  // Calibrated noise scale used for every repeat in the cell (b for
  // GG-family mechanisms, sigma for Gaussian ones).
  double scale = 0.0;
  double mean_l1 = 0.0;
  double sd_l1 = 0.0;
  double mean_kl = 0.0;
  double sd_kl = 0.0;
};

struct ExperimentReport {
  std::string version;
  std::string dataset;
  std::uint64_t seed = 0;
  int repeats = 0;
  std::size_t bins = 0;
  // Total count of the (pre-noise) histogram.
  double n = 0.0;
  std::vector<std::string> postprocess;
  std::vector<CellStats> cells;
};

// Runs the sweep: resolves the dataset, builds the disjoint per-bin
// sensitivity profile (unit l1 sensitivity per bin, bounds [0, n]),
// calibrates each cell once, then sanitizes `repeats` times per cell and
// aggregates l1 and KL error versus the original histogram. The per-repeat
// stream is RngStream(seed, FoldStreamId({cell_index, repeat_index})), so
// the report is deterministic for fixed config regardless of evaluation
// order. Throws ConfigError / IngestionError / ConvergenceError as the
// corresponding stage fails.
ExperimentReport RunExperiment(const ExperimentConfig& config);

// Stable-key-order JSON rendering of a report.
nlohmann::ordered_json ReportToJson(const ExperimentReport& report);

// Writes the report JSON (terminated by a newline). Refuses to overwrite an
// existing file unless `overwrite` is set; I/O failures raise IngestionError
// naming the path.
void EmitReport(const ExperimentReport& report, const std::string& path,
                bool overwrite);

// Writes a tail-ratio curve as CSV (same format as WriteCurveCsv) with the
// same overwrite discipline as EmitReport.
void EmitCurveCsv(const std::vector<TailCurvePoint>& points,
                  const std::string& path, bool overwrite);

}  // namespace ggdp

#endif  // GGDP_PIPELINE_H_
