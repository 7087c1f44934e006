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

#ifndef GGDP_CALIBRATION_H_
#define GGDP_CALIBRATION_H_

#include <cstddef>
#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "ggdp/numerics.hpp"
#include "ggdp/sensitivity.hpp"

namespace ggdp {

// Privacy budget.  delta = 0 states a pure epsilon guarantee; mechanisms with
// a relaxed guarantee require delta in (0, 1).
struct PrivacyParams {
  double epsilon = 0.0;
  double delta = 0.0;
};

// Monte-Carlo calibration knobs.  draws must be at least 10^4 for any
// calibrated release; bisection_tol is relative on the returned scale.
struct McConfig {
  std::size_t draws = 200000;
  double bisection_tol = 1e-4;
  double b_hi_factor = 64.0;
};

// Laplace scale b = Delta_1 / epsilon (pure epsilon guarantee).
double LaplaceScale(double delta1_total, double epsilon);

// Truncated-GG scale for a pure epsilon guarantee on bounded outputs:
//   b^p = 2/eps * (S + Delta_p^p),
//   S = sum_k sum_{j=1..p-1} C(p, j) * (hi_k - lo_k)^(p-j) * delta1[k]^j,
// where for a disjoint profile the sum over k collapses to the single worst
// element (at most one element changes between neighbors).  Half the budget
// pays for the density shift, half for the truncation-normalizer shift.
// Bounds are required.
double TggScale(const SensitivityProfile& profile, int p, double epsilon);

// Smallest sigma giving the Gaussian mechanism a probabilistic (eps, delta)
// guarantee:  sigma = Delta_2 * (sqrt(z^2 + 2 eps) - z) / (2 eps) with
// z = Phi^{-1}(delta / 2).  Valid for every eps > 0.
double GaussPdpSigma(double delta2, const PrivacyParams& params);

// Classic approximate-(eps, delta) Gaussian sigma
//   sigma = Delta_2 * sqrt(2 ln(1.25 / delta)) / eps,
// whose derivation requires eps in (0, 1); ConfigError outside.
double GaussAdpSigma(double delta2, const PrivacyParams& params);

// The same formula evaluated without the eps < 1 domain guard.  The
// experiment harness mirrors reference protocols that exercised the formula
// at eps >= 1; standalone calibration should use GaussAdpSigma.
double GaussAdpSigmaFormula(double delta2, const PrivacyParams& params);

// Monte-Carlo calibration of the GG(p) scale for a probabilistic
// (eps, delta) guarantee, p >= 2 (p = 1 is exact: use LaplaceScale).
// Draws `mc.draws` unit-scale GG magnitudes once (common random numbers) and
// bisects for the smallest b whose empirical violation probability drops
// below delta.  Deterministic for a fixed (rng seed/stream, draws), and
// independent of any internal chunking.
double GgPdpScaleMc(const SensitivityProfile& profile, int p,
                    const PrivacyParams& params, const McConfig& mc,
                    const RngStream& rng);

// Deterministic GG(p) scale for disjoint profiles (at most one element
// changes, by at most `sensitivity_delta`).  Solves, by nested bisection,
//   Pr[ (|e| + Delta)^p - |e|^p > b^p eps ] = delta,  e ~ GG(0, b, p),
// i.e. 1 - P(1/p, (t*/b)^p) = delta with (t* + Delta)^p - t*^p = b^p eps.
// At p = 2 this reproduces sqrt(2) * GaussPdpSigma exactly.  p >= 2.
double DisjointPdpScale(double sensitivity_delta, int p,
                        const PrivacyParams& params);

// The epsilon2 at which a (epsilon2, delta)-probabilistic Gaussian matches a
// pure-epsilon1 Laplace mechanism's two-sided tail at radius t:
//   2 Phi(-t / GaussPdpSigma(Delta, {epsilon2, delta})) = exp(-t eps1/Delta).
// Requires t > 0; solved by bisection well past 1e-8 relative accuracy.
double EquivalentEpsilon(double epsilon1, double delta, double t,
                         double sensitivity_delta);

// Record of one calibration, serialized by the CLI.  `b` is the GG scale,
// `sigma` the standard deviation of the (untruncated) noise; for Gaussian
// mechanisms b = sqrt(2) * sigma.  method is "closed-form", "deterministic"
// (analytic solver) or "mc"; draws is nonzero only for "mc".
struct CalibrationResult {
  std::string mechanism;
  int p = 1;
  double epsilon = 0.0;
  double delta = 0.0;
  double b = 0.0;
  double sigma = 0.0;
  std::string method;
  std::uint64_t draws = 0;
};

nlohmann::ordered_json CalibrationResultToJson(const CalibrationResult& r);

}  // namespace ggdp

#endif  // GGDP_CALIBRATION_H_
