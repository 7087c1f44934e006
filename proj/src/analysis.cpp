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

#include "ggdp/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "ggdp/calibration.hpp"
#include "ggdp/errors.hpp"
#include "ggdp/numerics.hpp"

namespace ggdp {
namespace {

void CheckSameSize(const std::vector<double>& a, const std::vector<double>& b,
                   const char* what) {
  if (a.size() != b.size()) {
    throw ConfigError(std::string(what) + " requires vectors of equal length (" +
                      std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + ")");
  }
  if (a.empty()) {
    throw ConfigError(std::string(what) + " requires nonempty vectors");
  }
}

void CheckRadius(double t) {
  if (!std::isfinite(t) || t < 0.0) {
    throw ConfigError("tail radius t must be nonnegative and finite");
  }
}

}  // namespace

double L1Distance(const std::vector<double>& a, const std::vector<double>& b) {
  CheckSameSize(a, b, "l1 distance");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sum += std::fabs(a[k] - b[k]);
  }
  return sum;
}

double KlDivergence(const std::vector<double>& a, const std::vector<double>& b,
                    double alpha) {
  CheckSameSize(a, b, "KL divergence");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("smoothing pseudocount alpha must be positive");
  }
  double total_a = 0.0;
  double total_b = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!std::isfinite(a[k]) || !std::isfinite(b[k]) || a[k] < 0.0 ||
        b[k] < 0.0) {
      throw ConfigError("KL divergence requires nonnegative finite counts");
    }
    total_a += a[k];
    total_b += b[k];
  }
  const double r = static_cast<double>(a.size());
  double kl = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double pk = (a[k] + alpha) / (total_a + r * alpha);
    const double qk = (b[k] + alpha) / (total_b + r * alpha);
    kl += pk * std::log(pk / qk);
  }
  return kl;
}

double LaplaceTail(double t, double epsilon, double delta1) {
  CheckRadius(t);
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ConfigError("epsilon must be positive and finite");
  }
  if (!(delta1 > 0.0) || !std::isfinite(delta1)) {
    throw ConfigError("sensitivity must be positive and finite");
  }
  return std::exp(-t * epsilon / delta1);
}

double GaussianTail(double t, double sigma) {
  CheckRadius(t);
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("sigma must be positive and finite");
  }
  return 2.0 * StdNormalCdf(-t / sigma);
}

std::vector<TailCurvePoint> TailRatioCurve(double epsilon, double delta,
                                           double sensitivity_delta,
                                           const std::vector<double>& t_grid,
                                           double cutoff) {
  if (t_grid.empty()) {
    throw ConfigError("tail curve needs a nonempty radius grid");
  }
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    CheckRadius(t_grid[i]);
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) {
      throw ConfigError("tail curve radii must be strictly ascending");
    }
  }
  if (!std::isfinite(cutoff) || cutoff < 0.0) {
    throw ConfigError("cutoff must be nonnegative and finite");
  }
  const double sigma =
      GaussPdpSigma(sensitivity_delta, PrivacyParams{epsilon, delta});
  std::vector<TailCurvePoint> points;
  points.reserve(t_grid.size());
  for (double t : t_grid) {
    TailCurvePoint pt;
    pt.t = t;
    pt.p1 = LaplaceTail(t, epsilon, sensitivity_delta);
    pt.p2 = GaussianTail(t, sigma);
    pt.ratio = pt.p2 > 0.0 ? pt.p1 / pt.p2
                           : std::numeric_limits<double>::quiet_NaN();
    pt.likely = std::max(pt.p1, pt.p2) > cutoff;
    points.push_back(pt);
  }
  return points;
}

double VarianceComparison(double epsilon, double delta,
                          double sensitivity_delta) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ConfigError("epsilon must be positive and finite");
  }
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw ConfigError("delta must lie in (0, 1)");
  }
  if (!(sensitivity_delta > 0.0) || !std::isfinite(sensitivity_delta)) {
    throw ConfigError("sensitivity must be positive and finite");
  }
  // sigma^2 / (2 (Delta/eps)^2); the sensitivity cancels algebraically, so it
  // is validated but does not enter the value.
  const double z = StdNormalQuantile(delta / 2.0);
  const double root = std::sqrt(z * z + 2.0 * epsilon) - z;
  return root * root / 8.0;
}

void WriteCurveCsv(const std::vector<TailCurvePoint>& points,
                   std::ostream& out) {
  out << "t,p1,p2,ratio,likely\n";
  char buffer[160];
  for (const TailCurvePoint& pt : points) {
    std::snprintf(buffer, sizeof(buffer), "%.9g,%.9g,%.9g,%.9g,%d\n", pt.t,
                  pt.p1, pt.p2, pt.ratio, pt.likely ? 1 : 0);
    out << buffer;
  }
}

}  // namespace ggdp
