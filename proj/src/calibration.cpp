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

#include "ggdp/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "ggdp/errors.hpp"
#include "ggdp/ggdist.hpp"

namespace ggdp {
namespace {

void CheckEpsilon(double epsilon) {
  if (!std::isfinite(epsilon) || !(epsilon > 0.0)) {
    throw ConfigError("epsilon must be positive and finite, got " +
                      std::to_string(epsilon));
  }
}

void CheckRelaxedDelta(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw ConfigError("delta must lie in (0, 1) for a relaxed guarantee, got " +
                      std::to_string(delta));
  }
}

void CheckSensitivity(double value, const char* name) {
  if (!std::isfinite(value) || !(value > 0.0)) {
    throw ConfigError(std::string(name) + " must be positive and finite, got " +
                      std::to_string(value));
  }
}

// (t + delta)^p - t^p evaluated through the binomial expansion, which stays
// accurate for t >> delta where the direct difference cancels.
double PowerGap(double t, double delta, int p) {
  double gap = 0.0;
  for (int j = 1; j <= p; ++j) {
    gap += BinomialCoefficient(p, j) * std::pow(t, p - j) * std::pow(delta, j);
  }
  return gap;
}

}  // namespace

double LaplaceScale(double delta1_total, double epsilon) {
  CheckSensitivity(delta1_total, "l1 sensitivity");
  CheckEpsilon(epsilon);
  return delta1_total / epsilon;
}

double TggScale(const SensitivityProfile& profile, int p, double epsilon) {
  ValidateProfile(profile);
  CheckEpsilon(epsilon);
  if (p < 1) {
    throw ConfigError("order p must be an integer >= 1, got " +
                      std::to_string(p));
  }
  if (!profile.bounds) {
    throw ConfigError("truncated calibration requires output bounds");
  }
  const std::size_t r = profile.size();
  double budget;  // S + Delta_p^p
  if (profile.disjoint) {
    // Only one element changes between neighbors, so the bound is the worst
    // single element's full expansion sum_{j=1..p} C(p,j) range^(p-j) d1^j
    // (the j = p term is that element's own Delta_p^p).
    budget = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      const Bounds& bk = (*profile.bounds)[k];
      double element = 0.0;
      for (int j = 1; j <= p; ++j) {
        element += BinomialCoefficient(p, j) *
                   std::pow(bk.hi - bk.lo, p - j) *
                   std::pow(profile.delta1[k], j);
      }
      budget = std::max(budget, element);
    }
  } else {
    const double delta_p = EffectiveLpGs(profile, p);
    double s = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      const Bounds& bk = (*profile.bounds)[k];
      for (int j = 1; j <= p - 1; ++j) {
        s += BinomialCoefficient(p, j) * std::pow(bk.hi - bk.lo, p - j) *
             std::pow(profile.delta1[k], j);
      }
    }
    budget = s + std::pow(delta_p, p);
  }
  return std::pow(2.0 / epsilon * budget, 1.0 / p);
}

double GaussPdpSigma(double delta2, const PrivacyParams& params) {
  CheckSensitivity(delta2, "l2 sensitivity");
  CheckEpsilon(params.epsilon);
  CheckRelaxedDelta(params.delta);
  const double z = StdNormalQuantile(params.delta / 2.0);  // negative
  return delta2 * (std::sqrt(z * z + 2.0 * params.epsilon) - z) /
         (2.0 * params.epsilon);
}

double GaussAdpSigma(double delta2, const PrivacyParams& params) {
  if (!(params.epsilon < 1.0)) {
    throw ConfigError(
        "the approximate-DP Gaussian bound is derived for epsilon in (0, 1); "
        "got epsilon = " + std::to_string(params.epsilon));
  }
  return GaussAdpSigmaFormula(delta2, params);
}

double GaussAdpSigmaFormula(double delta2, const PrivacyParams& params) {
  CheckSensitivity(delta2, "l2 sensitivity");
  CheckEpsilon(params.epsilon);
  CheckRelaxedDelta(params.delta);
  return delta2 * std::sqrt(2.0 * std::log(1.25 / params.delta)) /
         params.epsilon;
}

double GgPdpScaleMc(const SensitivityProfile& profile, int p,
                    const PrivacyParams& params, const McConfig& mc,
                    const RngStream& rng) {
  ValidateProfile(profile);
  if (p < 2) {
    throw ConfigError(
        "probabilistic calibration applies to p >= 2 (p = 1 noise admits only "
        "the pure guarantee)");
  }
  CheckEpsilon(params.epsilon);
  CheckRelaxedDelta(params.delta);
  if (mc.draws < 10000) {
    throw ConfigError("Monte-Carlo calibration needs at least 10000 draws");
  }
  if (!(mc.bisection_tol > 0.0) || !(mc.b_hi_factor > 1.0)) {
    throw ConfigError("invalid Monte-Carlo configuration");
  }
  const double delta_p = EffectiveLpGs(profile, p);

  // Which elements can change between neighbors: all of them, or only the
  // worst one when the profile is disjoint.
  std::vector<std::size_t> active;
  if (profile.disjoint) {
    std::size_t worst = 0;
    for (std::size_t k = 1; k < profile.size(); ++k) {
      if (profile.delta1[k] > profile.delta1[worst]) worst = k;
    }
    active.push_back(worst);
  } else {
    for (std::size_t k = 0; k < profile.size(); ++k) {
      if (profile.delta1[k] > 0.0) active.push_back(k);
    }
  }

  // Common random numbers: draw the unit-scale noise once, reduce each draw
  // to the coefficients of the scale-free exceedance polynomial
  //   sum_{j=1..p-1} A_j b^{-j} > eps - (delta_p / b)^p,
  // with A_j = sum_k C(p,j) |u_k|^(p-j) delta1[k]^j, and reuse them at every
  // trial scale.  This keeps the violation curve monotone in b and the
  // bisection deterministic.
  RngStream local = rng.Substream(0x6763616cULL);  // decouple from the caller
  const std::size_t terms = static_cast<std::size_t>(p - 1);
  std::vector<double> coeff(mc.draws * terms);
  const GGParams unit{0.0, 1.0, p};
  std::vector<double> binom(terms + 1);
  for (int j = 1; j <= p - 1; ++j) binom[j] = BinomialCoefficient(p, j);
  for (std::size_t i = 0; i < mc.draws; ++i) {
    double* row = &coeff[i * terms];
    for (std::size_t k : active) {
      const double mag = std::fabs(SampleGG(unit, local));
      const double d1 = profile.delta1[k];
      for (int j = 1; j <= p - 1; ++j) {
        row[j - 1] += binom[j] * std::pow(mag, p - j) * std::pow(d1, j);
      }
    }
  }

  const auto feasible = [&](double b) {
    const double thresh =
        params.epsilon - std::pow(delta_p / b, static_cast<double>(p));
    std::size_t violations = 0;
    const double inv_b = 1.0 / b;
    for (std::size_t i = 0; i < mc.draws; ++i) {
      const double* row = &coeff[i * terms];
      double lhs = 0.0;
      double scale = inv_b;
      for (std::size_t j = 0; j < terms; ++j) {
        lhs += row[j] * scale;
        scale *= inv_b;
      }
      if (lhs > thresh) ++violations;
    }
    return static_cast<double>(violations) <
           params.delta * static_cast<double>(mc.draws);
  };

  // At b0 the threshold is exactly zero, so every draw violates.
  const double b0 = delta_p * std::pow(1.0 / params.epsilon, 1.0 / p);
  double lo = b0;
  double hi = 2.0 * b0;
  while (!feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > mc.b_hi_factor * b0) {
      throw ConvergenceError(
          "Monte-Carlo calibration could not bracket the scale within " +
          std::to_string(mc.b_hi_factor) + " times the base scale");
    }
  }
  while (hi - lo > mc.bisection_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;  // smallest scale observed to satisfy the empirical constraint
}

double DisjointPdpScale(double sensitivity_delta, int p,
                        const PrivacyParams& params) {
  CheckSensitivity(sensitivity_delta, "sensitivity");
  if (p < 2) {
    throw ConfigError(
        "probabilistic calibration applies to p >= 2 (p = 1 noise admits only "
        "the pure guarantee)");
  }
  CheckEpsilon(params.epsilon);
  CheckRelaxedDelta(params.delta);
  const double delta = sensitivity_delta;
  const double inv_p = 1.0 / p;

  // Pr[(|e| + delta)^p - |e|^p > b^p eps] for e ~ GG(0, b, p).  The gap is
  // increasing in |e|, so the event is |e| > t* with t* the gap's crossing
  // point, and the probability is the GG magnitude tail at t*.
  const auto violation_prob = [&](double b) {
    const double rhs = std::pow(b, p) * params.epsilon;
    if (PowerGap(0.0, delta, p) >= rhs) {
      return 1.0;  // the gap already exceeds the budget at e = 0
    }
    double t_lo = 0.0;
    double t_hi = std::max(delta, b);
    int doublings = 0;
    while (PowerGap(t_hi, delta, p) < rhs) {
      t_hi *= 2.0;
      if (++doublings > 400) {
        throw ConvergenceError("could not bracket the exceedance radius");
      }
    }
    while (t_hi - t_lo > 1e-13 * t_hi) {
      const double mid = 0.5 * (t_lo + t_hi);
      if (PowerGap(mid, delta, p) < rhs) {
        t_lo = mid;
      } else {
        t_hi = mid;
      }
    }
    const double t_star = 0.5 * (t_lo + t_hi);
    return RegUpperGamma(inv_p, std::pow(t_star / b, p));
  };

  // The probability is decreasing in b and equals 1 at the threshold-zero
  // scale b0; double upward to bracket, then bisect.
  const double b0 = delta * std::pow(1.0 / params.epsilon, inv_p);
  double lo = b0;
  double hi = 2.0 * b0;
  int doublings = 0;
  while (violation_prob(hi) > params.delta) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 200) {
      throw ConvergenceError("could not bracket the calibrated scale");
    }
  }
  while (hi - lo > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (violation_prob(mid) <= params.delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double EquivalentEpsilon(double epsilon1, double delta, double t,
                         double sensitivity_delta) {
  CheckEpsilon(epsilon1);
  CheckRelaxedDelta(delta);
  CheckSensitivity(sensitivity_delta, "sensitivity");
  if (!std::isfinite(t) || !(t > 0.0)) {
    throw ConfigError("tail radius t must be positive and finite");
  }
  // Solve ln(2 Phi(-t / sigma(eps2))) = -t eps1 / Delta.  The left side
  // decreases in eps2 (sigma shrinks, the tail thins), from 0 at eps2 = 0+.
  const double target = -t * epsilon1 / sensitivity_delta;
  const auto excess = [&](double eps2) {
    const double sigma =
        GaussPdpSigma(sensitivity_delta, PrivacyParams{eps2, delta});
    const double tail = 2.0 * StdNormalCdf(-t / sigma);
    if (tail <= 0.0) {
      return -std::numeric_limits<double>::infinity();
    }
    return std::log(tail) - target;
  };
  double lo = 1e-12;
  if (excess(lo) <= 0.0) {
    throw ConfigError("no Gaussian this weak: the matching epsilon2 is below "
                      "1e-12 for the requested tail");
  }
  double hi = 1.0;
  int doublings = 0;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 200) {
      throw ConvergenceError("could not bracket the equivalent epsilon");
    }
  }
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

nlohmann::ordered_json CalibrationResultToJson(const CalibrationResult& r) {
  nlohmann::ordered_json j;
  j["mechanism"] = r.mechanism;
  j["p"] = r.p;
  j["epsilon"] = r.epsilon;
  j["delta"] = r.delta;
  j["b"] = r.b;
  j["sigma"] = r.sigma;
  j["method"] = r.method;
  j["draws"] = r.draws;
  return j;
}

}  // namespace ggdp
