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

#include "ukaslr/stats.hh"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ukaslr::stats {

namespace {

// Continued fraction for the incomplete beta function, modified Lentz
// algorithm (Numerical Recipes form).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int max_iterations = 300;
    constexpr double eps = 3e-16;
    constexpr double fp_min = 1e-300;

    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fp_min) {
        d = fp_min;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iterations; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fp_min) {
            d = fp_min;
        }
        c = 1.0 + aa / c;
        if (std::fabs(c) < fp_min) {
            c = fp_min;
        }
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fp_min) {
            d = fp_min;
        }
        c = 1.0 + aa / c;
        if (std::fabs(c) < fp_min) {
            c = fp_min;
        }
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) {
            break;
        }
    }
    return h;
}

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    if (n % 2 == 1) {
        return values[n / 2];
    }
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

} // namespace

double mean(std::span<const double> values) {
    if (values.empty()) {
        throw insufficient_data("mean requires at least one value");
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    return sum / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
    if (values.size() < 2) {
        throw insufficient_data("sample standard deviation requires n >= 2");
    }
    double m = mean(values);
    double ss = 0.0;
    for (double v : values) {
        double d = v - m;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

interval confidence_interval(std::span<const double> values, double level) {
    if (values.size() < 2) {
        throw insufficient_data("confidence interval requires n >= 2");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("confidence level must lie in (0, 1)");
    }
    double m = mean(values);
    double sd = sample_sd(values);
    auto n = static_cast<double>(values.size());
    double t = student_t_quantile(0.5 * (1.0 + level), static_cast<unsigned>(values.size() - 1));
    double half = t * sd / std::sqrt(n);
    return {m - half, m + half};
}

test_report levene_test(const std::vector<sample_set>& groups, centering center,
                        double alpha) {
    if (groups.size() < 2) {
        throw insufficient_data("Levene's test requires at least two groups");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("alpha must lie in (0, 1)");
    }

    std::size_t k = groups.size();
    std::size_t total = 0;
    std::vector<std::vector<double>> deviations(k);
    for (std::size_t i = 0; i < k; ++i) {
        const auto& values = groups[i].values;
        if (values.size() < 2) {
            throw insufficient_data("each Levene group needs n >= 2");
        }
        total += values.size();
        double c = center == centering::mean ? mean(values) : median_of(values);
        deviations[i].reserve(values.size());
        for (double v : values) {
            deviations[i].push_back(std::fabs(v - c));
        }
    }

    double grand_sum = 0.0;
    std::vector<double> group_means(k);
    for (std::size_t i = 0; i < k; ++i) {
        group_means[i] = mean(deviations[i]);
        for (double z : deviations[i]) {
            grand_sum += z;
        }
    }
    double grand_mean = grand_sum / static_cast<double>(total);

    double between = 0.0;
    double within = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double diff = group_means[i] - grand_mean;
        between += static_cast<double>(deviations[i].size()) * diff * diff;
        for (double z : deviations[i]) {
            double d = z - group_means[i];
            within += d * d;
        }
    }

    auto df1 = static_cast<unsigned>(k - 1);
    auto df2 = static_cast<unsigned>(total - k);

    test_report report;
    report.alpha = alpha;
    for (const auto& g : groups) {
        report.sample_sizes.push_back(g.values.size());
    }

    if (within == 0.0) {
        if (between == 0.0) {
            // All deviations identical: no evidence either way.
            report.statistic = 0.0;
            report.p_value = 1.0;
        } else {
            report.statistic = std::numeric_limits<double>::infinity();
            report.p_value = 0.0;
        }
    } else {
        report.statistic =
            (static_cast<double>(total - k) / static_cast<double>(k - 1)) * between / within;
        report.p_value = f_upper_tail(report.statistic, df1, df2);
    }
    report.reject_null = *report.p_value < alpha;
    return report;
}

double f_upper_tail(double x, unsigned d1, unsigned d2) {
    if (d1 == 0 || d2 == 0) {
        throw std::invalid_argument("degrees of freedom must be >= 1");
    }
    if (!(x >= 0.0)) {
        throw std::invalid_argument("F statistic must be non-negative");
    }
    if (std::isinf(x)) {
        return 0.0;
    }
    // P(F > x) = I_{d2/(d2 + d1 x)}(d2/2, d1/2)
    double z = d2 / (d2 + d1 * x);
    return regularized_incomplete_beta(0.5 * d2, 0.5 * d1, z);
}

test_report ks_uniform_test(std::span<const double> values, double lo, double hi,
                            double alpha) {
    if (!(lo < hi)) {
        throw std::invalid_argument("uniform bounds require lo < hi");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("alpha must lie in (0, 1)");
    }
    std::size_t n = values.size();
    if (n <= 50) {
        throw out_of_regime("asymptotic KS critical value requires n > 50");
    }
    for (double v : values) {
        if (!(v >= lo && v <= hi)) {
            throw std::invalid_argument("sample value outside [lo, hi]");
        }
    }

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    double width = hi - lo;
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double f = (sorted[i] - lo) / width;
        double above = static_cast<double>(i + 1) / static_cast<double>(n) - f;
        double below = f - static_cast<double>(i) / static_cast<double>(n);
        d = std::max(d, std::max(above, below));
    }

    test_report report;
    report.statistic = d;
    report.threshold = 1.36 / std::sqrt(static_cast<double>(n));
    report.alpha = alpha;
    report.reject_null = d > *report.threshold;
    report.sample_sizes = {n};
    return report;
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) {
        throw std::invalid_argument("incomplete beta requires a, b > 0");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::invalid_argument("incomplete beta requires x in [0, 1]");
    }
    if (x == 0.0) {
        return 0.0;
    }
    if (x == 1.0) {
        return 1.0;
    }
    double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log(1.0 - x);
    double front = std::exp(log_front);
    // The continued fraction converges fastest below the mean of the
    // distribution; use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) otherwise.
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double incomplete_beta_inverse(double a, double b, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("probability must lie in [0, 1]");
    }
    if (p == 0.0) {
        return 0.0;
    }
    if (p == 1.0) {
        return 1.0;
    }
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (regularized_incomplete_beta(a, b, mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-16 * std::max(1.0, hi)) {
            break;
        }
    }
    return 0.5 * (lo + hi);
}

double student_t_quantile(double p, unsigned df) {
    if (df == 0) {
        throw std::invalid_argument("degrees of freedom must be >= 1");
    }
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("probability must lie in (0, 1)");
    }
    if (p == 0.5) {
        return 0.0;
    }
    if (p < 0.5) {
        return -student_t_quantile(1.0 - p, df);
    }
    // Two-sided tail identity: P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2).
    double tail2 = 2.0 * (1.0 - p);
    double z = incomplete_beta_inverse(0.5 * df, 0.5, tail2);
    return std::sqrt(df * (1.0 - z) / z);
}

} // namespace ukaslr::stats
