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

#ifndef GGDP_ANALYSIS_H_
#define GGDP_ANALYSIS_H_

#include <ostream>
#include <vector>

namespace ggdp {

// sum_k |a_k - b_k|; sizes must match.
double L1Distance(const std::vector<double>& a, const std::vector<double>& b);

// KL divergence between two count vectors smoothed with a pseudocount:
//   p_k = (a_k + alpha) / (sum a + r alpha),  likewise q from b,
//   KL = sum_k p_k ln(p_k / q_k).
// Always finite for alpha > 0; zero iff the smoothed distributions match.
double KlDivergence(const std::vector<double>& a, const std::vector<double>& b,
                    double alpha = 0.5);

// Two-sided Laplace noise tail: Pr(|e| > t) = exp(-t * epsilon / delta1).
double LaplaceTail(double t, double epsilon, double delta1);

// Two-sided Gaussian noise tail: Pr(|e| > t) = 2 Phi(-t / sigma).
double GaussianTail(double t, double sigma);

// One point of the Laplace-vs-Gaussian tail comparison at radius t:
// p1 = Laplace tail of a pure-epsilon mechanism, p2 = Gaussian tail of the
// probabilistic (eps, delta) mechanism; ratio = p1 / p2 (NaN when p2
// underflows to zero); likely = max(p1, p2) > cutoff (events too rare to
// matter in practice are flagged off).
struct TailCurvePoint {
  double t = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double ratio = 0.0;
  bool likely = false;
};

// Evaluates the comparison over a grid of nonnegative radii, with both
// mechanisms calibrated to the same sensitivity `sensitivity_delta`.
std::vector<TailCurvePoint> TailRatioCurve(double epsilon, double delta,
                                           double sensitivity_delta,
                                           const std::vector<double>& t_grid,
                                           double cutoff = 1e-4);

// Variance of a probabilistic-(eps, delta) Gaussian over the variance of the
// epsilon-Laplace mechanism at equal sensitivity:
//   sigma^2 / (2 (Delta/eps)^2) = (sqrt(z^2 + 2 eps) - z)^2 / 8,
// z = Phi^{-1}(delta/2).  Delta cancels; the ratio is at least z^2 / 2, so it
// exceeds 1 for every eps whenever delta < 2 Phi(-sqrt 2) ~= 0.157 (a
// sufficient condition: at larger delta the winner depends on eps).
double VarianceComparison(double epsilon, double delta,
                          double sensitivity_delta);

// CSV with header "t,p1,p2,ratio,likely", nine significant digits, booleans
// as 0/1.
void WriteCurveCsv(const std::vector<TailCurvePoint>& points,
                   std::ostream& out);

}  // namespace ggdp

#endif  // GGDP_ANALYSIS_H_
