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
// Slow, independent reference implementations used only by the tests.
//
// Every routine here deliberately takes a different computational route than
// the library (Stirling series instead of Lanczos, quadrature instead of
// series/continued fractions, exact integer Pascal triangle instead of the
// multiplicative formula), so agreement between the two is meaningful
// evidence of correctness rather than a tautology.

#ifndef GGDP_TESTS_ORACLES_H_
#define GGDP_TESTS_ORACLES_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "ggdp/ggdist.hpp"

namespace ggdp {
namespace oracles {

// ln Gamma(a) for a > 0 via upward recurrence into the Stirling series with
// Bernoulli-number corrections, evaluated in long double.
double LnGamma(double a);

// erf / erfc: long-double Maclaurin series for small arguments, a
// backward-evaluated continued fraction for the large-argument tail.
double Erf(double z);
double Erfc(double z);

// Phi and its inverse (the inverse by plain bisection on Phi).
double StdNormalCdf(double x);
double StdNormalQuantile(double q);

// Regularized incomplete gamma functions by composite-Simpson quadrature
// (with a smoothing substitution when a < 1), normalized through LnGamma.
// The upper tail is integrated directly so tiny values keep relative
// precision.
double RegLowerGamma(double a, double x);
double RegUpperGamma(double a, double x);

// Generalized Gaussian CDF and interval mass by direct quadrature of the
// density (split at the mode, so narrow and one-sided intervals keep
// relative precision).
double GGCdf(double x, const GGParams& g);
double GGMass(const GGParams& g, double lo, double hi);

// E[X | X in [lo, hi]] for X ~ GG, by quadrature.
double GGTruncatedMean(const GGParams& g, double lo, double hi);

// Exact C(n, k) through Pascal's triangle in 64-bit integers (n <= 62).
std::uint64_t Binomial(int n, int k);

// Two-sided Kolmogorov-Smirnov statistic of `samples` against `cdf`
// (samples are copied and sorted internally).
double KsStatistic(std::vector<double> samples,
                   const std::function<double(double)>& cdf);

// KS critical value at significance alpha: sqrt(-ln(alpha/2) / 2) / sqrt(n).
double KsCriticalValue(double alpha, std::size_t n);

// Sample mean and unbiased sample variance.
double Mean(const std::vector<double>& xs);
double Variance(const std::vector<double>& xs);

}  // namespace oracles
}  // namespace ggdp

#endif  // GGDP_TESTS_ORACLES_H_
