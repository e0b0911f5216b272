// Copyright 2026 The ukaslr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ukaslr/errors.hh"

namespace ukaslr::stats {

// A labeled batch of observations (one benchmark group, one address
// region, ...).
struct sample_set {
    std::string label;
    std::vector<double> values;
};

// Outcome of a hypothesis test. KS reports carry the critical value in
// `threshold`; Levene reports carry `p_value`. reject_null is always
// consistent with the comparison that produced it.
struct test_report {
    double statistic = 0.0;
    std::optional<double> threshold;
    std::optional<double> p_value;
    double alpha = 0.05;
    bool reject_null = false;
    std::vector<std::size_t> sample_sizes;
};

struct interval {
    double low = 0.0;
    double high = 0.0;
};

enum class centering {
    mean,   // classic Levene
    median, // Brown-Forsythe variant
};

double mean(std::span<const double> values);

// Corrected (n-1 denominator) sample standard deviation. n >= 2.
double sample_sd(std::span<const double> values);

// Student-t interval mean +/- t_{(1+level)/2, n-1} * sd / sqrt(n).
interval confidence_interval(std::span<const double> values, double level);

// Levene's W on absolute deviations from the group centers, with the
// p-value from the upper tail of F(k-1, N-k). A fully degenerate spread
// (all deviations identical) reports W = 0, p = 1.
test_report levene_test(const std::vector<sample_set>& groups,
                        centering center = centering::mean, double alpha = 0.05);

// P(F_{d1,d2} > x) via the regularized incomplete beta function.
double f_upper_tail(double x, unsigned d1, unsigned d2);

// One-sample Kolmogorov-Smirnov test against the continuous uniform on
// [lo, hi], using the asymptotic critical value 1.36/sqrt(n). Requires
// n > 50; smaller samples are out of the asymptotic regime.
test_report ks_uniform_test(std::span<const double> values, double lo, double hi,
                            double alpha = 0.05);

// Numeric kernels, exposed for reuse and direct testing.
double regularized_incomplete_beta(double a, double b, double x);
double incomplete_beta_inverse(double a, double b, double p);
double student_t_quantile(double p, unsigned df);

} // namespace ukaslr::stats
