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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "ggdp/errors.hpp"
#include "ggdp/numerics.hpp"
#include "ggdp/sensitivity.hpp"
#include "oracles.hpp"

namespace ggdp {
namespace {

SensitivityProfile DisjointUnit(std::size_t r, double range) {
  SensitivityProfile p;
  p.delta1.assign(r, 1.0);
  p.bounds = std::vector<Bounds>(r, Bounds{0.0, range});
  p.disjoint = true;
  return p;
}

TEST_CASE("LaplaceScale divides sensitivity by budget") {
  CHECK(LaplaceScale(1.15, 0.5) == doctest::Approx(2.3).epsilon(1e-15));
  CHECK(LaplaceScale(1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(LaplaceScale(1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(LaplaceScale(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(LaplaceScale(1.0, -1.0), ConfigError);
}

TEST_CASE("TggScale reproduces the unit-count histogram calibration") {
  // 64 disjoint counting bins with range 70 and unit caps at p = 2, eps = 1:
  // the per-element budget is 2*70*1 + 1, so b^2 = 2 * 141 = 282.
  const SensitivityProfile hist = DisjointUnit(64, 70.0);
  const double b = TggScale(hist, 2, 1.0);
  CHECK(b * b == doctest::Approx(282.0).epsilon(1e-12));
  CHECK(b == doctest::Approx(std::sqrt(282.0)).epsilon(1e-13));
}

TEST_CASE("TggScale handles orders one through three") {
  // p = 1: the cross-term sum S is empty, so b = 2 * Delta_1 / eps; for a
  // non-disjoint profile Delta_1 is the sum of the caps.
  SensitivityProfile flat;
  flat.delta1 = {1.0, 0.5};
  flat.bounds = std::vector<Bounds>{{0.0, 10.0}, {0.0, 10.0}};
  CHECK(TggScale(flat, 1, 1.0) == doctest::Approx(3.0).epsilon(1e-13));

  // p = 2 non-disjoint: S = 2*10*1 + 2*10*0.5 = 30 and Delta_2^2 = 1.25,
  // so b^2 = 2 * 31.25 = 62.5.
  CHECK(TggScale(flat, 2, 1.0) ==
        doctest::Approx(std::sqrt(62.5)).epsilon(1e-13));

  // p = 3 disjoint, range 4, unit cap, eps = 2: the worst element expands to
  // 3*16 + 3*4 + 1 = 61, so b^3 = (2/2) * 61.
  const SensitivityProfile dis = DisjointUnit(1, 4.0);
  CHECK(TggScale(dis, 3, 2.0) ==
        doctest::Approx(std::cbrt(61.0)).epsilon(1e-13));
}

TEST_CASE("TggScale requires bounds") {
  SensitivityProfile unbounded;
  unbounded.delta1 = {1.0};
  CHECK_THROWS_AS(TggScale(unbounded, 2, 1.0), ConfigError);
}

TEST_CASE("GaussPdpSigma matches independently computed values") {
  CHECK(GaussPdpSigma(1.0, {1.0, 0.05}) ==
        doctest::Approx(2.1884374962806347).epsilon(1e-12));
  CHECK(GaussPdpSigma(1.0, {2.0, 0.05}) ==
        doctest::Approx(1.1900561190295789).epsilon(1e-12));
  CHECK(GaussPdpSigma(1.0, {0.5, 0.05}) ==
        doctest::Approx(4.1602955097185047).epsilon(1e-12));
  // Linear in the sensitivity.
  CHECK(GaussPdpSigma(2.5, {1.0, 0.05}) ==
        doctest::Approx(2.5 * 2.1884374962806347).epsilon(1e-12));
}

TEST_CASE("GaussPdpSigma shrinks as the budget loosens") {
  double prev = GaussPdpSigma(1.0, {0.1, 0.05});
  for (const double eps : {0.5, 1.0, 2.0, 4.0}) {
    const double cur = GaussPdpSigma(1.0, {eps, 0.05});
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK(GaussPdpSigma(1.0, {1.0, 0.1}) < GaussPdpSigma(1.0, {1.0, 0.05}));
}

TEST_CASE("GaussAdpSigma enforces its derivation domain") {
  // sigma = Delta sqrt(2 ln(1.25/delta)) / eps; at eps = 0.5, delta = 0.05
  // that is 2 sqrt(2 ln 25).
  const double want = 2.0 * std::sqrt(2.0 * std::log(25.0));
  CHECK(want == doctest::Approx(5.0745449647180786).epsilon(1e-15));
  CHECK(GaussAdpSigma(1.0, {0.5, 0.05}) ==
        doctest::Approx(want).epsilon(1e-13));
  CHECK_NOTHROW(GaussAdpSigma(1.0, {0.99, 0.05}));
  CHECK_THROWS_AS(GaussAdpSigma(1.0, {1.0, 0.05}), ConfigError);
  CHECK_THROWS_AS(GaussAdpSigma(1.0, {2.0, 0.05}), ConfigError);
  // The unguarded variant evaluates the same expression anywhere.
  CHECK(GaussAdpSigmaFormula(1.0, {2.0, 0.05}) ==
        doctest::Approx(std::sqrt(2.0 * std::log(25.0)) / 2.0)
            .epsilon(1e-13));
}

TEST_CASE("budget and delta validation is shared across calibrators") {
  CHECK_THROWS_AS(GaussPdpSigma(1.0, {0.0, 0.05}), ConfigError);
  CHECK_THROWS_AS(GaussPdpSigma(1.0, {1.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(GaussPdpSigma(1.0, {1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(GaussPdpSigma(-1.0, {1.0, 0.05}), ConfigError);
}

TEST_CASE("DisjointPdpScale reduces to the Gaussian solution at p = 2") {
  for (const double eps : {0.5, 1.0, 2.0}) {
    for (const double delta : {0.01, 0.05, 0.25}) {
      CAPTURE(eps);
      CAPTURE(delta);
      const double want = std::sqrt(2.0) * GaussPdpSigma(1.0, {eps, delta});
      CHECK(DisjointPdpScale(1.0, 2, {eps, delta}) ==
            doctest::Approx(want).epsilon(1e-8));
    }
  }
}

TEST_CASE("DisjointPdpScale matches frozen higher-order solutions") {
  // Values computed ahead of time with an independent high-precision solver.
  CHECK(DisjointPdpScale(1.0, 3, {1.0, 0.05}) ==
        doctest::Approx(4.6624445344569723).epsilon(1e-8));
  CHECK(DisjointPdpScale(1.0, 4, {1.0, 0.05}) ==
        doctest::Approx(5.8669299769910078).epsilon(1e-8));
  CHECK(DisjointPdpScale(1.0, 3, {2.0, 0.05}) ==
        doctest::Approx(2.6557287845779248).epsilon(1e-8));
  CHECK(DisjointPdpScale(1.0, 3, {1.0, 0.25}) ==
        doctest::Approx(2.6123514362800971).epsilon(1e-8));
  CHECK(DisjointPdpScale(1.0, 3, {0.5, 0.05}) ==
        doctest::Approx(8.5904306409971479).epsilon(1e-8));
}

TEST_CASE("DisjointPdpScale satisfies its defining tail equation") {
  const double eps = 1.0, delta = 0.05;
  const double b = DisjointPdpScale(1.0, 3, {eps, delta});
  // The violation threshold t* solves (t+1)^3 - t^3 = b^3 eps, a quadratic:
  // 3t^2 + 3t + 1 = b^3 eps.
  const double rhs = b * b * b * eps;
  const double t_star = (-3.0 + std::sqrt(9.0 + 12.0 * (rhs - 1.0))) / 6.0;
  // At the solution, Pr(|e| > t*) = delta for e ~ GG(0, b, 3).
  const double tail =
      oracles::RegUpperGamma(1.0 / 3.0, std::pow(t_star / b, 3));
  CHECK(tail == doctest::Approx(delta).epsilon(1e-7));
}

TEST_CASE("DisjointPdpScale is linear in the sensitivity") {
  const double base = DisjointPdpScale(1.0, 3, {1.0, 0.05});
  CHECK(DisjointPdpScale(2.5, 3, {1.0, 0.05}) ==
        doctest::Approx(2.5 * base).epsilon(1e-8));
}

TEST_CASE("DisjointPdpScale rejects p = 1") {
  CHECK_THROWS_AS(DisjointPdpScale(1.0, 1, {1.0, 0.05}), ConfigError);
}

TEST_CASE("Monte-Carlo calibration brackets the exact p = 2 solution") {
  SensitivityProfile profile;
  profile.delta1 = {1.0};
  McConfig mc;
  mc.draws = 50000;
  const PrivacyParams params{1.0, 0.05};
  const double b_mc = GgPdpScaleMc(profile, 2, params, mc, RngStream(21));
  const double b_exact = std::sqrt(2.0) * GaussPdpSigma(1.0, params);
  CHECK(b_mc == doctest::Approx(b_exact).epsilon(0.02));
}

TEST_CASE("Monte-Carlo calibration is deterministic per stream") {
  SensitivityProfile profile;
  profile.delta1 = {1.0, 1.0};
  McConfig mc;
  mc.draws = 20000;
  const PrivacyParams params{1.0, 0.05};
  const double a = GgPdpScaleMc(profile, 3, params, mc, RngStream(22));
  const double b = GgPdpScaleMc(profile, 3, params, mc, RngStream(22));
  CHECK(a == b);
  const double c = GgPdpScaleMc(profile, 3, params, mc, RngStream(23));
  CHECK(c == doctest::Approx(a).epsilon(0.05));
}

TEST_CASE("Monte-Carlo calibration collapses disjoint profiles") {
  // With a disjoint profile only the worst element matters, so adding a
  // smaller second element must not change the result at all (the same
  // stream draws the same magnitudes).
  McConfig mc;
  mc.draws = 20000;
  const PrivacyParams params{1.0, 0.05};

  SensitivityProfile single;
  single.delta1 = {1.0};
  single.disjoint = true;
  SensitivityProfile padded;
  padded.delta1 = {1.0, 0.4};
  padded.disjoint = true;

  CHECK(GgPdpScaleMc(single, 2, params, mc, RngStream(24)) ==
        GgPdpScaleMc(padded, 2, params, mc, RngStream(24)));
}

TEST_CASE("Monte-Carlo calibration shrinks with the budget") {
  SensitivityProfile profile;
  profile.delta1 = {1.0};
  McConfig mc;
  mc.draws = 20000;
  const double loose =
      GgPdpScaleMc(profile, 2, {2.0, 0.05}, mc, RngStream(25));
  const double tight =
      GgPdpScaleMc(profile, 2, {0.5, 0.05}, mc, RngStream(25));
  CHECK(loose < tight);
}

TEST_CASE("Monte-Carlo calibration rejects underpowered configs") {
  SensitivityProfile profile;
  profile.delta1 = {1.0};
  McConfig mc;
  mc.draws = 9999;
  CHECK_THROWS_AS(GgPdpScaleMc(profile, 2, {1.0, 0.05}, mc, RngStream(26)),
                  ConfigError);
  mc.draws = 20000;
  CHECK_THROWS_AS(GgPdpScaleMc(profile, 1, {1.0, 0.05}, mc, RngStream(26)),
                  ConfigError);
}

TEST_CASE("EquivalentEpsilon matches frozen values and its equation") {
  const double e2_t5 = EquivalentEpsilon(1.0, 0.05, 5.0, 1.0);
  CHECK(e2_t5 == doctest::Approx(1.2089451844145838).epsilon(1e-10));
  const double e2_t9 = EquivalentEpsilon(1.0, 0.05, 9.0, 1.0);
  CHECK(e2_t9 == doctest::Approx(0.92707512299063651).epsilon(1e-10));

  // Plug back: the matched Gaussian's two-sided tail at t equals the
  // Laplace tail exp(-t eps1 / Delta).
  for (const double t : {2.0, 5.0, 9.0}) {
    const double e2 = EquivalentEpsilon(1.0, 0.05, t, 1.0);
    const double sigma = GaussPdpSigma(1.0, {e2, 0.05});
    CHECK(2.0 * StdNormalCdf(-t / sigma) ==
          doctest::Approx(std::exp(-t)).epsilon(1e-10));
  }
}

TEST_CASE("EquivalentEpsilon falls as the matching radius grows") {
  double prev = EquivalentEpsilon(1.0, 0.05, 1.0, 1.0);
  for (const double t : {3.0, 5.0, 7.0, 9.0, 12.0}) {
    const double cur = EquivalentEpsilon(1.0, 0.05, t, 1.0);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("EquivalentEpsilon validates its arguments") {
  CHECK_THROWS_AS(EquivalentEpsilon(1.0, 0.05, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(EquivalentEpsilon(1.0, 0.05, -2.0, 1.0), ConfigError);
  CHECK_THROWS_AS(EquivalentEpsilon(0.0, 0.05, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(EquivalentEpsilon(1.0, 0.0, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(EquivalentEpsilon(1.0, 0.05, 1.0, 0.0), ConfigError);
}

TEST_CASE("calibration records serialize with stable keys") {
  CalibrationResult r;
  r.mechanism = "gg_pdp";
  r.p = 3;
  r.epsilon = 1.0;
  r.delta = 0.05;
  r.b = 4.66;
  r.sigma = 2.1;
  r.method = "deterministic";
  r.draws = 0;
  const nlohmann::ordered_json j = CalibrationResultToJson(r);
  std::vector<std::string> keys;
  for (const auto& item : j.items()) keys.push_back(item.key());
  CHECK(keys == std::vector<std::string>{"mechanism", "p", "epsilon", "delta",
                                         "b", "sigma", "method", "draws"});
  CHECK(j["mechanism"] == "gg_pdp");
  CHECK(j["draws"] == 0);
}

}  // namespace
}  // namespace ggdp
