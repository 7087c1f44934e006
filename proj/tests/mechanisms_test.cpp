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

#include "ggdp/mechanisms.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "ggdp/errors.hpp"
#include "oracles.hpp"

namespace ggdp {
namespace {

MechanismSpec BasicSpec(MechanismKind kind, int p, double epsilon,
                        double delta, std::size_t r, bool bounds,
                        double range = 10.0) {
  MechanismSpec spec;
  spec.kind = kind;
  spec.p = p;
  spec.privacy = {epsilon, delta};
  spec.profile.delta1.assign(r, 1.0);
  if (bounds) {
    spec.profile.bounds = std::vector<Bounds>(r, Bounds{0.0, range});
  }
  return spec;
}

TEST_CASE("mechanism names round trip") {
  for (const MechanismKind kind :
       {MechanismKind::kLaplace, MechanismKind::kGaussPdp,
        MechanismKind::kGaussAdp, MechanismKind::kGgPdp,
        MechanismKind::kTggEdp, MechanismKind::kExpGg}) {
    CHECK(MechanismKindFromString(ToString(kind)) == kind);
  }
  CHECK_THROWS_AS(MechanismKindFromString("gauss"), ConfigError);
}

TEST_CASE("ValidateMechanismSpec enforces order and budget pairings") {
  CHECK_NOTHROW(ValidateMechanismSpec(
      BasicSpec(MechanismKind::kLaplace, 1, 1.0, 0.0, 2, false)));
  // Wrong orders.
  CHECK_THROWS_AS(ValidateMechanismSpec(BasicSpec(MechanismKind::kLaplace, 2,
                                                  1.0, 0.0, 2, false)),
                  ConfigError);
  CHECK_THROWS_AS(ValidateMechanismSpec(BasicSpec(MechanismKind::kGaussPdp, 3,
                                                  1.0, 0.05, 2, false)),
                  ConfigError);
  CHECK_THROWS_AS(ValidateMechanismSpec(BasicSpec(MechanismKind::kGgPdp, 1,
                                                  1.0, 0.05, 2, false)),
                  ConfigError);
  CHECK_THROWS_AS(ValidateMechanismSpec(BasicSpec(MechanismKind::kTggEdp, 61,
                                                  1.0, 0.0, 2, true)),
                  ConfigError);
  // Pure mechanisms must have delta = 0, relaxed ones delta in (0, 1).
  CHECK_THROWS_AS(ValidateMechanismSpec(BasicSpec(MechanismKind::kLaplace, 1,
                                                  1.0, 0.05, 2, false)),
                  ConfigError);
  CHECK_THROWS_AS(ValidateMechanismSpec(BasicSpec(MechanismKind::kGaussPdp, 2,
                                                  1.0, 0.0, 2, false)),
                  ConfigError);
  CHECK_THROWS_AS(ValidateMechanismSpec(BasicSpec(MechanismKind::kGaussPdp, 2,
                                                  1.0, 1.0, 2, false)),
                  ConfigError);
  // Bounded mechanisms need bounds.
  CHECK_THROWS_AS(ValidateMechanismSpec(BasicSpec(MechanismKind::kTggEdp, 2,
                                                  1.0, 0.0, 2, false)),
                  ConfigError);
  CHECK_THROWS_AS(ValidateMechanismSpec(BasicSpec(MechanismKind::kExpGg, 3,
                                                  1.0, 0.0, 2, false)),
                  ConfigError);
  // The Monte-Carlo block belongs to gg_pdp only.
  MechanismSpec with_mc = BasicSpec(MechanismKind::kLaplace, 1, 1.0, 0.0, 2,
                                    false);
  with_mc.mc = McConfig{};
  CHECK_THROWS_AS(ValidateMechanismSpec(with_mc), ConfigError);
  // Nonpositive epsilon.
  CHECK_THROWS_AS(ValidateMechanismSpec(BasicSpec(MechanismKind::kLaplace, 1,
                                                  0.0, 0.0, 2, false)),
                  ConfigError);
}

TEST_CASE("mechanism spec JSON round trips and defaults orders") {
  MechanismSpec spec = BasicSpec(MechanismKind::kGgPdp, 3, 1.0, 0.05, 2,
                                 true);
  spec.profile.disjoint = true;
  spec.mc = McConfig{20000, 1e-3, 32.0};
  const MechanismSpec back = MechanismSpecFromJson(MechanismSpecToJson(spec));
  CHECK(back.kind == MechanismKind::kGgPdp);
  CHECK(back.p == 3);
  CHECK(back.privacy.epsilon == 1.0);
  CHECK(back.privacy.delta == 0.05);
  CHECK(back.profile.disjoint);
  REQUIRE(back.mc.has_value());
  CHECK(back.mc->draws == 20000);
  CHECK(back.mc->bisection_tol == 1e-3);
  CHECK(back.mc->b_hi_factor == 32.0);

  // `p` defaults to the forced order for laplace and the Gaussians.
  const auto laplace = MechanismSpecFromJson(nlohmann::json::parse(
      R"({"mechanism": "laplace", "epsilon": 1.0,
          "profile": {"delta1": [1.0]}})"));
  CHECK(laplace.p == 1);
  const auto gauss = MechanismSpecFromJson(nlohmann::json::parse(
      R"({"mechanism": "gauss_adp", "epsilon": 0.5, "delta": 0.05,
          "profile": {"delta1": [1.0]}})"));
  CHECK(gauss.p == 2);
  // ... but is required for the GG family.
  CHECK_THROWS_AS(MechanismSpecFromJson(nlohmann::json::parse(
                      R"({"mechanism": "gg_pdp", "epsilon": 1.0,
                          "delta": 0.05, "profile": {"delta1": [1.0]}})")),
                  ConfigError);
  // Unknown fields are rejected.
  CHECK_THROWS_AS(MechanismSpecFromJson(nlohmann::json::parse(
                      R"({"mechanism": "laplace", "epsilon": 1.0, "o": 1,
                          "profile": {"delta1": [1.0]}})")),
                  ConfigError);
}

TEST_CASE("CalibrateMechanism routes every mechanism to its calibrator") {
  const RngStream rng(31);

  MechanismSpec laplace = BasicSpec(MechanismKind::kLaplace, 1, 2.0, 0.0, 3,
                                    false);
  laplace.profile.disjoint = true;
  const CalibrationResult lap = CalibrateMechanism(laplace, rng);
  CHECK(lap.b == doctest::Approx(0.5).epsilon(1e-15));  // max delta1 / eps
  CHECK(lap.method == "closed-form");
  CHECK(lap.sigma == doctest::Approx(std::sqrt(2.0) * 0.5).epsilon(1e-13));

  const CalibrationResult gp = CalibrateMechanism(
      BasicSpec(MechanismKind::kGaussPdp, 2, 1.0, 0.05, 1, false), rng);
  CHECK(gp.sigma == doctest::Approx(2.1884374962806347).epsilon(1e-12));
  CHECK(gp.b == doctest::Approx(std::sqrt(2.0) * gp.sigma).epsilon(1e-13));

  // The harness convention: gauss_adp calibrates from the formula even at
  // eps >= 1.
  const CalibrationResult ga = CalibrateMechanism(
      BasicSpec(MechanismKind::kGaussAdp, 2, 2.0, 0.05, 1, false), rng);
  CHECK(ga.sigma ==
        doctest::Approx(std::sqrt(2.0 * std::log(25.0)) / 2.0).epsilon(1e-12));

  MechanismSpec tgg = BasicSpec(MechanismKind::kTggEdp, 2, 1.0, 0.0, 64,
                                true, 70.0);
  tgg.profile.disjoint = true;
  const CalibrationResult tg = CalibrateMechanism(tgg, rng);
  CHECK(tg.b == doctest::Approx(std::sqrt(282.0)).epsilon(1e-12));

  // exp_gg: b^p = 2 delta_u / eps; for unit caps on [0, 1] at p = 3,
  // delta_u = 7.
  const CalibrationResult eg = CalibrateMechanism(
      BasicSpec(MechanismKind::kExpGg, 3, 1.0, 0.0, 1, true, 1.0), rng);
  CHECK(eg.b == doctest::Approx(std::cbrt(14.0)).epsilon(1e-12));

  MechanismSpec dis = BasicSpec(MechanismKind::kGgPdp, 3, 1.0, 0.05, 2,
                                false);
  dis.profile.disjoint = true;
  const CalibrationResult dj = CalibrateMechanism(dis, rng);
  CHECK(dj.method == "deterministic");
  CHECK(dj.b == doctest::Approx(4.6624445344569723).epsilon(1e-8));

  MechanismSpec mc_spec = BasicSpec(MechanismKind::kGgPdp, 2, 1.0, 0.05, 1,
                                    false);
  mc_spec.mc = McConfig{20000, 1e-4, 64.0};
  const CalibrationResult mc = CalibrateMechanism(mc_spec, rng);
  CHECK(mc.method == "mc");
  CHECK(mc.draws == 20000);
  CHECK(mc.b ==
        doctest::Approx(std::sqrt(2.0) * 2.1884374962806347).epsilon(0.03));
}

TEST_CASE("Sanitize perturbs with the calibrated scale, deterministically") {
  const MechanismSpec spec = BasicSpec(MechanismKind::kLaplace, 1, 1.0, 0.0,
                                       4, false);
  const std::vector<double> s = {1.0, 2.0, 3.0, 4.0};
  RngStream a(32), b(32);
  const SanitizedResult ra = Sanitize(spec, s, a);
  const SanitizedResult rb = Sanitize(spec, s, b);
  CHECK(ra.values == rb.values);
  CHECK(ra.values.size() == 4);
  CHECK(ra.scale_used == doctest::Approx(4.0).epsilon(1e-15));  // sum/eps
  CHECK(ra.post_ops.empty());
  bool any_moved = false;
  for (std::size_t k = 0; k < 4; ++k) any_moved |= (ra.values[k] != s[k]);
  CHECK(any_moved);

  // SanitizeWithScale with the same scale and stream reproduces Sanitize.
  RngStream c(32);
  const SanitizedResult rc = SanitizeWithScale(spec, ra.scale_used, s, c);
  CHECK(rc.values == ra.values);
}

TEST_CASE("additive noise is centered and has the calibrated spread") {
  const MechanismSpec spec = BasicSpec(MechanismKind::kGaussPdp, 2, 1.0,
                                       0.05, 1, false);
  RngStream rng(33);
  const double sigma = 2.1884374962806347;
  const std::size_t n = 100000;
  std::vector<double> noise(n);
  for (double& x : noise) {
    x = SanitizeWithScale(spec, sigma, {10.0}, rng).values[0] - 10.0;
  }
  CHECK(std::abs(oracles::Mean(noise)) < 4.0 * sigma / std::sqrt(n));
  CHECK(oracles::Variance(noise) ==
        doctest::Approx(sigma * sigma).epsilon(0.05));
}

TEST_CASE("bounded mechanisms release inside the bounds") {
  for (const MechanismKind kind :
       {MechanismKind::kTggEdp, MechanismKind::kExpGg}) {
    CAPTURE(ToString(kind));
    MechanismSpec spec = BasicSpec(kind, 2, 1.0, 0.0, 3, true, 5.0);
    RngStream rng(34);
    for (int rep = 0; rep < 200; ++rep) {
      const SanitizedResult r = Sanitize(spec, {0.0, 2.5, 5.0}, rng);
      for (const double v : r.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 5.0);
      }
    }
    // The query itself must sit inside the bounds.
    RngStream rng2(35);
    CHECK_THROWS_AS(Sanitize(spec, {0.0, 2.5, 6.0}, rng2), ConfigError);
  }
}

TEST_CASE("post-processing helpers behave and validate") {
  CHECK(Clamp({-1.0, 0.5, 9.0}, 0.0, 5.0) ==
        std::vector<double>{0.0, 0.5, 5.0});
  CHECK(Clamp({-1.0, 9.0}, {Bounds{0.0, 1.0}, Bounds{0.0, 5.0}}) ==
        std::vector<double>{0.0, 5.0});
  CHECK_THROWS_AS(Clamp({1.0}, 2.0, 1.0), ConfigError);
  CHECK_THROWS_AS(Clamp({1.0, 2.0}, {Bounds{0.0, 1.0}}), ConfigError);

  const std::vector<double> normalized = NormalizeToTotal({1.0, 3.0}, 8.0);
  CHECK(normalized == std::vector<double>{2.0, 6.0});
  // All-zero input spreads the total uniformly.
  CHECK(NormalizeToTotal({0.0, 0.0, 0.0, 0.0}, 8.0) ==
        std::vector<double>{2.0, 2.0, 2.0, 2.0});
  CHECK_THROWS_AS(NormalizeToTotal({-0.5, 1.0}, 1.0), ConfigError);
  CHECK_THROWS_AS(NormalizeToTotal({1.0}, 0.0), ConfigError);

  CHECK(RoundCounts({-0.7, 0.2, 1.5, 2.5}) ==
        std::vector<std::int64_t>{0, 0, 2, 3});
}

TEST_CASE("the Laplace audit is exact and saturates at epsilon") {
  MechanismSpec spec = BasicSpec(MechanismKind::kLaplace, 1, 1.0, 0.0, 2,
                                 false);
  // Both elements moved to their caps: realized loss equals epsilon.
  const double at_cap = AuditPrivacyLoss(spec, {3.0, 5.0}, {4.0, 6.0}, 801);
  CHECK(at_cap == doctest::Approx(1.0).epsilon(1e-12));
  // Half displacement costs half the budget.
  const double half = AuditPrivacyLoss(spec, {3.0, 5.0}, {3.5, 5.5}, 801);
  CHECK(half == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("the Gaussian audit matches the closed-form grid supremum") {
  MechanismSpec spec = BasicSpec(MechanismKind::kGaussPdp, 2, 1.0, 0.05, 1,
                                 false);
  const double sigma = GaussPdpSigma(1.0, {1.0, 0.05});
  const double b = std::sqrt(2.0) * sigma;
  const std::vector<double> s = {0.0}, s_prime = {1.0};
  const std::size_t grid_points = 4001;
  // On [-10b, 1+10b] the loss |(x-1)^2 - x^2| / (2 sigma^2) is maximized at
  // a grid end; reproduce the audit's own maximum analytically.
  const double lo = 0.0 - 10.0 * b, hi = 1.0 + 10.0 * b;
  double want = 0.0;
  for (const double x : {lo, hi}) {
    want = std::max(
        want, std::abs((x - 1.0) * (x - 1.0) - x * x) / (2.0 * sigma * sigma));
  }
  const double got = AuditPrivacyLoss(spec, s, s_prime, grid_points);
  CHECK(got == doctest::Approx(want).epsilon(1e-3));
  // Far beyond epsilon: the Gaussian guarantee is only probabilistic.
  CHECK(got > 1.0);
}

TEST_CASE("the truncated-GG audit respects the pure budget") {
  MechanismSpec spec = BasicSpec(MechanismKind::kTggEdp, 2, 1.0, 0.0, 2,
                                 true, 8.0);
  RngStream rng(36);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> s(2), sp(2);
    for (std::size_t k = 0; k < 2; ++k) {
      s[k] = rng.NextUniform() * 8.0;
      const double move = (rep % 2 == 0 ? 1.0 : rng.NextUniform()) *
                          (rng.NextSign() ? 1.0 : -1.0);
      sp[k] = std::clamp(s[k] + move, 0.0, 8.0);
    }
    const double loss = AuditPrivacyLoss(spec, s, sp, 801);
    CHECK(loss <= 1.0 + 1e-9);
    CHECK(loss >= 0.0);
  }
}

TEST_CASE("the exponential-mechanism audit stays strictly under budget") {
  MechanismSpec spec = BasicSpec(MechanismKind::kExpGg, 3, 1.0, 0.0, 1,
                                 true, 1.0);
  const double loss = AuditPrivacyLoss(spec, {0.2}, {1.0}, 2001);
  CHECK(loss > 0.0);
  CHECK(loss < 1.0);
}

TEST_CASE("audit rejects pairs that break the neighboring contract") {
  MechanismSpec spec = BasicSpec(MechanismKind::kLaplace, 1, 1.0, 0.0, 2,
                                 false);
  // Gap above the cap.
  CHECK_THROWS_AS(AuditPrivacyLoss(spec, {0.0, 0.0}, {1.5, 0.0}, 101),
                  ConfigError);
  // Length mismatch.
  CHECK_THROWS_AS(AuditPrivacyLoss(spec, {0.0}, {0.5}, 101), ConfigError);
  // Disjoint profiles allow at most one changed element.
  MechanismSpec dis = spec;
  dis.profile.disjoint = true;
  CHECK_THROWS_AS(AuditPrivacyLoss(dis, {0.0, 0.0}, {0.5, 0.5}, 101),
                  ConfigError);
  CHECK_NOTHROW(AuditPrivacyLoss(dis, {0.0, 0.0}, {0.5, 0.0}, 101));
  // Degenerate grid.
  CHECK_THROWS_AS(AuditPrivacyLoss(spec, {0.0, 0.0}, {0.5, 0.0}, 1),
                  ConfigError);
}

TEST_CASE("violation fractions respect the probabilistic guarantee") {
  MechanismSpec gauss = BasicSpec(MechanismKind::kGaussPdp, 2, 1.0, 0.05, 1,
                                  false);
  RngStream rng(37);
  const std::size_t draws = 20000;
  const double frac =
      PdpViolationFraction(gauss, {0.0}, {1.0}, draws, rng);
  const double se = std::sqrt(0.05 * 0.95 / draws);
  CHECK(frac <= 0.05 + 3.0 * se);
  CHECK(frac > 0.0);  // sigma is tight, so violations do occur

  // A calibrated pure mechanism never exceeds its budget.
  MechanismSpec laplace = BasicSpec(MechanismKind::kLaplace, 1, 1.0, 0.0, 1,
                                    false);
  RngStream rng2(38);
  CHECK(PdpViolationFraction(laplace, {0.0}, {1.0}, 5000, rng2) == 0.0);
}

}  // namespace
}  // namespace ggdp
