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

#ifndef GGDP_SENSITIVITY_H_
#define GGDP_SENSITIVITY_H_

#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

namespace ggdp {

// Closed output range [lo, hi] of one query element.
struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
};

// How much one individual's data can move an r-element query vector.
//
//   delta1[k]   per-element l1 cap: |s_k - s'_k| <= delta1[k] for neighboring
//               datasets.
//   bounds[k]   optional closed output range of element k (required by
//               bounded mechanisms and by utility sensitivities at p >= 2).
//   disjoint    when true, at most one element changes between neighbors
//               (histogram counts over disjoint bins); the lp sensitivity
//               then collapses to max_k delta1[k] for every p.
//   delta_p_override  caller-supplied lp global sensitivity, used verbatim.
struct SensitivityProfile {
  std::vector<double> delta1;
  std::optional<std::vector<Bounds>> bounds;
  bool disjoint = false;
  std::optional<double> delta_p_override;

  std::size_t size() const { return delta1.size(); }
};

// Throws ConfigError unless: delta1 is nonempty, finite, nonnegative and not
// all zero; bounds (when present) match delta1 in length with lo < hi and
// delta1[k] <= hi - lo (an element cannot move farther than its range);
// delta_p_override (when present) is positive and finite.
void ValidateProfile(const SensitivityProfile& profile);

// JSON round trip.  Schema:
//   {"delta1": [...], "bounds": [[lo, hi], ...] | null,
//    "disjoint": bool, "delta_p_override": number | null}
SensitivityProfile ProfileFromJson(const nlohmann::json& j);
nlohmann::json ProfileToJson(const SensitivityProfile& profile);

// (sum_k delta1[k]^p)^(1/p): the lp global sensitivity implied by per-element
// caps alone.  Throws ConfigError if delta1 is empty or all zero, or p < 1.
double LpGsUpperBound(const std::vector<double>& delta1, int p);

// (sum_k (hi_k - lo_k)^p)^(1/p): the coarser bound implied by output ranges.
double RangeGsBound(const std::vector<Bounds>& bounds, int p);

// The lp sensitivity a mechanism should calibrate against: max_k delta1[k]
// for disjoint profiles, else the override when present, else
// LpGsUpperBound(delta1, p).
double EffectiveLpGs(const SensitivityProfile& profile, int p);

// Sensitivity of the utility u(x, s) = -||x - s||_p^p in its database
// argument.  deltaj (when engaged, p >= 3) is the per-element table of
// per-order caps: deltaj[k][j-1] bounds |t1^j - t0^j| over admissible
// element values, j = 1..p.
struct UtilitySensitivity {
  double delta_u = 0.0;
  int p = 1;
  std::optional<std::vector<std::vector<double>>> deltaj;
};

// Computes Delta_u for the exponential-mechanism utility -||x - s||_p^p.
//   p = 1: sum_k delta1[k].
//   p = 2: sum_k 2 * delta1[k] * (hi_k - lo_k)  (exact expansion).
//   p >= 3: sum_k sum_{j=1..p} C(p, j) * M_k^(p-j) * D_k^(j) with
//     M_k = max(|lo_k|, |hi_k|) and default
//     D_k^(j) = min(j * M_k^(j-1) * delta1[k], range of t^j over [lo_k, hi_k]),
//     overridable through `deltaj` (whose j = 1 column must equal delta1).
// Bounds are required for p >= 2; deltaj is rejected for p < 3.
UtilitySensitivity ComputeUtilitySensitivity(
    int p, const SensitivityProfile& profile,
    const std::optional<std::vector<std::vector<double>>>& deltaj =
        std::nullopt);

}  // namespace ggdp

#endif  // GGDP_SENSITIVITY_H_
