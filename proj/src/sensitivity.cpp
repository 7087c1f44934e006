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

#include "ggdp/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ggdp/errors.hpp"
#include "ggdp/numerics.hpp"

namespace ggdp {
namespace {

void CheckOrder(int p) {
  if (p < 1) {
    throw ConfigError("order p must be an integer >= 1, got " +
                      std::to_string(p));
  }
}

// Largest change of t^j as t ranges over [lo, hi].
double PowerRangeOverInterval(int j, double lo, double hi) {
  const double at_lo = std::pow(lo, j);
  const double at_hi = std::pow(hi, j);
  if (j % 2 == 0 && lo < 0.0 && hi > 0.0) {
    // Even power over a sign-spanning interval: minimum 0 at t = 0.
    return std::max(at_lo, at_hi);
  }
  return std::fabs(at_hi - at_lo);
}

}  // namespace

void ValidateProfile(const SensitivityProfile& profile) {
  if (profile.delta1.empty()) {
    throw ConfigError("sensitivity profile needs at least one element");
  }
  double max_delta1 = 0.0;
  for (std::size_t k = 0; k < profile.delta1.size(); ++k) {
    const double d = profile.delta1[k];
    if (!std::isfinite(d) || d < 0.0) {
      throw ConfigError("delta1[" + std::to_string(k) +
                        "] must be finite and nonnegative");
    }
    max_delta1 = std::max(max_delta1, d);
  }
  if (max_delta1 == 0.0) {
    throw ConfigError("delta1 must not be all zero");
  }
  if (profile.bounds) {
    if (profile.bounds->size() != profile.delta1.size()) {
      throw ConfigError("bounds and delta1 must have the same length");
    }
    for (std::size_t k = 0; k < profile.bounds->size(); ++k) {
      const Bounds& bk = (*profile.bounds)[k];
      if (!std::isfinite(bk.lo) || !std::isfinite(bk.hi) || !(bk.lo < bk.hi)) {
        throw ConfigError("bounds[" + std::to_string(k) +
                          "] must be finite with lo < hi");
      }
      if (profile.delta1[k] > bk.hi - bk.lo) {
        throw ConfigError("delta1[" + std::to_string(k) +
                          "] exceeds the width of bounds[" + std::to_string(k) +
                          "]; an element cannot move farther than its range");
      }
    }
  }
  if (profile.delta_p_override) {
    const double o = *profile.delta_p_override;
    if (!std::isfinite(o) || !(o > 0.0)) {
      throw ConfigError("delta_p_override must be positive and finite");
    }
  }
}

SensitivityProfile ProfileFromJson(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw ConfigError("sensitivity profile JSON must be an object");
  }
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    if (key != "delta1" && key != "bounds" && key != "disjoint" &&
        key != "delta_p_override") {
      throw ConfigError("unknown field in sensitivity profile: " + key);
    }
  }
  SensitivityProfile profile;
  if (!j.contains("delta1") || !j["delta1"].is_array()) {
    throw ConfigError("sensitivity profile requires a `delta1` array");
  }
  for (const auto& v : j["delta1"]) {
    if (!v.is_number()) {
      throw ConfigError("delta1 entries must be numbers");
    }
    profile.delta1.push_back(v.get<double>());
  }
  if (j.contains("bounds") && !j["bounds"].is_null()) {
    if (!j["bounds"].is_array()) {
      throw ConfigError("`bounds` must be an array of [lo, hi] pairs or null");
    }
    std::vector<Bounds> bounds;
    for (const auto& pair : j["bounds"]) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
          !pair[1].is_number()) {
        throw ConfigError("each bounds entry must be a [lo, hi] number pair");
      }
      bounds.push_back(Bounds{pair[0].get<double>(), pair[1].get<double>()});
    }
    profile.bounds = std::move(bounds);
  }
  if (j.contains("disjoint")) {
    if (!j["disjoint"].is_boolean()) {
      throw ConfigError("`disjoint` must be a boolean");
    }
    profile.disjoint = j["disjoint"].get<bool>();
  }
  if (j.contains("delta_p_override") && !j["delta_p_override"].is_null()) {
    if (!j["delta_p_override"].is_number()) {
      throw ConfigError("`delta_p_override` must be a number or null");
    }
    profile.delta_p_override = j["delta_p_override"].get<double>();
  }
  ValidateProfile(profile);
  return profile;
}

nlohmann::json ProfileToJson(const SensitivityProfile& profile) {
  nlohmann::json j;
  j["delta1"] = profile.delta1;
  if (profile.bounds) {
    nlohmann::json bounds = nlohmann::json::array();
    for (const Bounds& bk : *profile.bounds) {
      bounds.push_back({bk.lo, bk.hi});
    }
    j["bounds"] = std::move(bounds);
  } else {
    j["bounds"] = nullptr;
  }
  j["disjoint"] = profile.disjoint;
  if (profile.delta_p_override) {
    j["delta_p_override"] = *profile.delta_p_override;
  } else {
    j["delta_p_override"] = nullptr;
  }
  return j;
}

double LpGsUpperBound(const std::vector<double>& delta1, int p) {
  CheckOrder(p);
  if (delta1.empty()) {
    throw ConfigError("delta1 must not be empty");
  }
  double sum = 0.0;
  double max_d = 0.0;
  for (double d : delta1) {
    if (!std::isfinite(d) || d < 0.0) {
      throw ConfigError("delta1 entries must be finite and nonnegative");
    }
    sum += std::pow(d, p);
    max_d = std::max(max_d, d);
  }
  if (max_d == 0.0) {
    throw ConfigError("delta1 must not be all zero");
  }
  return std::pow(sum, 1.0 / p);
}

double RangeGsBound(const std::vector<Bounds>& bounds, int p) {
  CheckOrder(p);
  if (bounds.empty()) {
    throw ConfigError("bounds must not be empty");
  }
  double sum = 0.0;
  for (const Bounds& bk : bounds) {
    if (!std::isfinite(bk.lo) || !std::isfinite(bk.hi) || !(bk.lo < bk.hi)) {
      throw ConfigError("each bounds entry must be finite with lo < hi");
    }
    sum += std::pow(bk.hi - bk.lo, p);
  }
  return std::pow(sum, 1.0 / p);
}

double EffectiveLpGs(const SensitivityProfile& profile, int p) {
  ValidateProfile(profile);
  CheckOrder(p);
  if (profile.disjoint) {
    // At most one element changes, so the lp norm of the change equals the
    // largest per-element cap regardless of p.
    return *std::max_element(profile.delta1.begin(), profile.delta1.end());
  }
  if (profile.delta_p_override) {
    return *profile.delta_p_override;
  }
  return LpGsUpperBound(profile.delta1, p);
}

UtilitySensitivity ComputeUtilitySensitivity(
    int p, const SensitivityProfile& profile,
    const std::optional<std::vector<std::vector<double>>>& deltaj) {
  ValidateProfile(profile);
  CheckOrder(p);
  const std::size_t r = profile.size();
  if (p >= 2 && !profile.bounds) {
    throw ConfigError("utility sensitivity at p >= 2 requires output bounds");
  }
  if (deltaj) {
    if (p < 3) {
      throw ConfigError("per-order caps (deltaj) apply only for p >= 3; "
                        "p = 1 and p = 2 are exact");
    }
    if (deltaj->size() != r) {
      throw ConfigError("deltaj must have one row per element");
    }
    for (std::size_t k = 0; k < r; ++k) {
      const auto& row = (*deltaj)[k];
      if (row.size() != static_cast<std::size_t>(p)) {
        throw ConfigError("deltaj rows must have p entries (j = 1..p)");
      }
      for (double v : row) {
        if (!std::isfinite(v) || v < 0.0) {
          throw ConfigError("deltaj entries must be finite and nonnegative");
        }
      }
      if (row[0] != profile.delta1[k]) {
        throw ConfigError("deltaj first column (j = 1) must equal delta1");
      }
    }
  }

  UtilitySensitivity result;
  result.p = p;
  result.deltaj = deltaj;
  double delta_u = 0.0;
  if (p == 1) {
    for (double d : profile.delta1) delta_u += d;
  } else if (p == 2) {
    // |t1^2 - t0^2| <= 2 max|t| |t1 - t0| and the cross term is exact, giving
    // sum_k 2 delta1[k] (hi_k - lo_k) after maximizing over the range.
    for (std::size_t k = 0; k < r; ++k) {
      const Bounds& bk = (*profile.bounds)[k];
      delta_u += 2.0 * profile.delta1[k] * (bk.hi - bk.lo);
    }
  } else {
    for (std::size_t k = 0; k < r; ++k) {
      const Bounds& bk = (*profile.bounds)[k];
      const double m = std::max(std::fabs(bk.lo), std::fabs(bk.hi));
      for (int j = 1; j <= p; ++j) {
        double cap;
        if (deltaj) {
          cap = (*deltaj)[k][j - 1];
        } else {
          // Mean-value bound j m^(j-1) delta1, cut off by the total range of
          // t^j over the interval (the change can never exceed the range).
          cap = std::min(j * std::pow(m, j - 1) * profile.delta1[k],
                         PowerRangeOverInterval(j, bk.lo, bk.hi));
        }
        delta_u += BinomialCoefficient(p, j) * std::pow(m, p - j) * cap;
      }
    }
  }
  result.delta_u = delta_u;
  return result;
}

}  // namespace ggdp
