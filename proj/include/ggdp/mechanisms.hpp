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

#ifndef GGDP_MECHANISMS_H_
#define GGDP_MECHANISMS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ggdp/calibration.hpp"
#include "ggdp/ggdist.hpp"
#include "ggdp/numerics.hpp"
#include "ggdp/sensitivity.hpp"

namespace ggdp {

// The release mechanisms.
//   kLaplace   additive Laplace noise, pure epsilon.
//   kGaussPdp  additive Gaussian, probabilistic (eps, delta).
//   kGaussAdp  additive Gaussian, approximate (eps, delta).
//   kGgPdp     additive GG(p), probabilistic (eps, delta), p >= 2.
//   kTggEdp    truncated GG(p) on the output bounds, pure epsilon.
//   kExpGg     exponential mechanism with utility -||x - s||_p^p, which is
//              exactly a truncated GG centered at s; pure epsilon, and
//              strictly conservative (its realized loss is below epsilon).
enum class MechanismKind {
  kLaplace,
  kGaussPdp,
  kGaussAdp,
  kGgPdp,
  kTggEdp,
  kExpGg,
};

// "laplace", "gauss_pdp", "gauss_adp", "gg_pdp", "tgg_edp", "exp_gg".
std::string ToString(MechanismKind kind);
MechanismKind MechanismKindFromString(const std::string& name);

// A fully specified sanitizer.  `p` must be 1 for laplace and 2 for the
// Gaussian mechanisms; delta must be 0 for the pure mechanisms (laplace,
// tgg_edp, exp_gg) and in (0, 1) for the rest.  `mc` configures the
// Monte-Carlo calibrator (engaged only by gg_pdp on non-disjoint profiles).
struct MechanismSpec {
  MechanismKind kind = MechanismKind::kLaplace;
  int p = 1;
  PrivacyParams privacy;
  SensitivityProfile profile;
  std::optional<McConfig> mc;
};

// Throws ConfigError on any inconsistency (see MechanismSpec).
void ValidateMechanismSpec(const MechanismSpec& spec);

nlohmann::ordered_json MechanismSpecToJson(const MechanismSpec& spec);
MechanismSpec MechanismSpecFromJson(const nlohmann::json& j);

// Calibrates the noise scale for `spec`.  `rng` feeds the Monte-Carlo
// calibrator when it is engaged; every other path is deterministic.  For
// gauss_adp this evaluates the formula without the eps < 1 guard (the
// harness convention); use GaussAdpSigma directly for the guarded contract.
CalibrationResult CalibrateMechanism(const MechanismSpec& spec,
                                     const RngStream& rng);

// A sanitized release.  scale_used is sigma for the Gaussian mechanisms and
// the GG scale b for the others.  post_ops lists post-processing steps that
// were applied downstream, in order.
struct SanitizedResult {
  std::vector<double> values;
  double scale_used = 0.0;
  std::vector<std::string> post_ops;
};

// Calibrates and then perturbs s (element count must match the profile).
// Bounded mechanisms (tgg_edp, exp_gg) require s inside the bounds.
SanitizedResult Sanitize(const MechanismSpec& spec,
                         const std::vector<double>& s, RngStream& rng);

// Perturbs with a precomputed scale (sigma for Gaussians, b otherwise);
// lets an experiment calibrate once per cell and stay bit-reproducible.
SanitizedResult SanitizeWithScale(const MechanismSpec& spec, double scale,
                                  const std::vector<double>& s,
                                  RngStream& rng);

// Element-wise clamp to [lo, hi] (scalar or per-element bounds).
std::vector<double> Clamp(const std::vector<double>& values, double lo,
                          double hi);
std::vector<double> Clamp(const std::vector<double>& values,
                          const std::vector<Bounds>& bounds);

// Rescales nonnegative values proportionally so they sum to `total`;
// an all-zero input becomes the uniform vector total / r.
std::vector<double> NormalizeToTotal(const std::vector<double>& values,
                                     double total);

// Nearest-integer rounding (halves away from zero), clamped at 0.
std::vector<std::int64_t> RoundCounts(const std::vector<double>& values);

// Supremum of the absolute log density ratio |ln f(x|s) - ln f(x|s')| over a
// per-element product grid (`grid_points` per element): the realized privacy
// loss of the release densities for the neighboring pair (s, s').  The pair
// must respect the profile (|s_k - s'_k| <= delta1[k]; inside bounds for
// bounded mechanisms).  Exact for Laplace once the grid spans both centers.
double AuditPrivacyLoss(const MechanismSpec& spec, const std::vector<double>& s,
                        const std::vector<double>& s_prime,
                        std::size_t grid_points);

// Empirical probability, over `draws` releases of s, that the pointwise
// absolute log density ratio against s' exceeds epsilon (with 1e-9 of
// headroom so pure mechanisms, whose loss sits exactly on the boundary with
// positive probability, are not counted on round-off alone).  For a
// calibrated probabilistic (eps, delta) mechanism this must stay below
// delta.
double PdpViolationFraction(const MechanismSpec& spec,
                            const std::vector<double>& s,
                            const std::vector<double>& s_prime,
                            std::size_t draws, RngStream& rng);

}  // namespace ggdp

#endif  // GGDP_MECHANISMS_H_
