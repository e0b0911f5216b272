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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "reference_stats.hh"
#include "ukaslr/stats.hh"

using namespace ukaslr;
using doctest::Approx;

TEST_CASE("sample_sd") {
    CHECK(stats::sample_sd(std::vector{1.0, 2.0, 3.0}) == Approx(1.0).epsilon(1e-12));
    CHECK(stats::sample_sd(std::vector{4.2, 4.2, 4.2}) == 0.0);
    // oracle: sum of squared deviations is 32 over 7 degrees of freedom
    CHECK(stats::sample_sd(std::vector{2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0}) ==
          Approx(std::sqrt(32.0 / 7.0)).epsilon(1e-12));
    CHECK_THROWS_AS(stats::sample_sd(std::vector{1.0}), insufficient_data);
    CHECK(stats::sample_sd(std::vector{1.0, 1.0}) == 0.0);
}

TEST_CASE("student_t_quantile matches table and quadrature values") {
    CHECK(stats::student_t_quantile(0.975, 2) == Approx(4.302652729911).epsilon(1e-9));
    CHECK(stats::student_t_quantile(0.975, 1) == Approx(12.706204736175).epsilon(1e-9));
    CHECK(stats::student_t_quantile(0.975, 10) == Approx(2.228138851986).epsilon(1e-9));
    CHECK(stats::student_t_quantile(0.5, 7) == 0.0);
    CHECK(stats::student_t_quantile(0.025, 2) == Approx(-4.302652729911).epsilon(1e-9));

    for (unsigned df : {1u, 2u, 5u, 30u, 302u}) {
        for (double p : {0.6, 0.9, 0.95, 0.975, 0.995}) {
            CHECK(stats::student_t_quantile(p, df) ==
                  Approx(testref::t_quantile_bisection(p, df)).epsilon(1e-7));
        }
    }
    CHECK_THROWS_AS(stats::student_t_quantile(0.975, 0), std::invalid_argument);
    CHECK_THROWS_AS(stats::student_t_quantile(1.0, 5), std::invalid_argument);
}

TEST_CASE("confidence_interval") {
    SUBCASE("zero variance collapses to the mean") {
        auto ci = stats::confidence_interval(std::vector{3.5, 3.5, 3.5}, 0.95);
        CHECK(ci.low == Approx(3.5));
        CHECK(ci.high == Approx(3.5));
    }

    SUBCASE("known three-point interval") {
        auto ci = stats::confidence_interval(std::vector{1.0, 2.0, 3.0}, 0.95);
        CHECK(ci.low == Approx(-0.484).epsilon(0.01));
        CHECK(ci.high == Approx(4.484).epsilon(0.01));
    }

    SUBCASE("symmetric about the mean") {
        std::mt19937_64 rng(3);
        std::vector<double> xs;
        for (int i = 0; i < 40; ++i) {
            xs.push_back(static_cast<double>(rng() % 1000));
        }
        auto ci = stats::confidence_interval(xs, 0.95);
        double m = stats::mean(xs);
        CHECK(m - ci.low == Approx(ci.high - m).epsilon(1e-10));
    }

    SUBCASE("wider level strictly contains the narrower one") {
        std::vector xs{1.0, 2.0, 5.0, 9.0, 3.0};
        auto ci95 = stats::confidence_interval(xs, 0.95);
        auto ci99 = stats::confidence_interval(xs, 0.99);
        CHECK(ci99.low < ci95.low);
        CHECK(ci99.high > ci95.high);
    }

    SUBCASE("width scales as 1/sqrt(n) for a fixed spread") {
        // alternating +/-1 keeps the sample sd essentially constant as the
        // pattern repeats; quadrupling n should roughly halve the width
        auto width_of = [](int n) {
            std::vector<double> xs;
            for (int i = 0; i < n; ++i) {
                xs.push_back(i % 2 == 0 ? 1.0 : -1.0);
            }
            auto ci = stats::confidence_interval(xs, 0.95);
            return ci.high - ci.low;
        };
        double ratio = width_of(100) / width_of(400);
        CHECK(ratio == Approx(2.0).epsilon(0.02));
    }

    SUBCASE("errors") {
        CHECK_THROWS_AS(stats::confidence_interval(std::vector{1.0}, 0.95),
                        insufficient_data);
        CHECK_THROWS_AS(stats::confidence_interval(std::vector{1.0, 2.0}, 1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("levene_test") {
    SUBCASE("identical groups accept the null") {
        stats::sample_set g{"g", {1.0, 2.0, 3.0, 4.0, 5.0}};
        auto report = stats::levene_test({g, g});
        CHECK(report.statistic == 0.0);
        CHECK(*report.p_value == 1.0);
        CHECK_FALSE(report.reject_null);
    }

    SUBCASE("named two-group case matches the direct-formula reference") {
        stats::sample_set g1{"g1", {1.0, 2.0, 3.0, 4.0, 5.0}};
        stats::sample_set g2{"g2", {10.0, 20.0, 30.0, 40.0, 50.0}};
        auto report = stats::levene_test({g1, g2});
        auto ref = testref::levene_direct({g1.values, g2.values});
        CHECK(report.statistic == Approx(ref.w).epsilon(1e-9));
        CHECK(*report.p_value == Approx(ref.p).epsilon(1e-6));
        CHECK(report.sample_sizes == std::vector<std::size_t>{5, 5});
    }

    SUBCASE("location shift leaves W exactly unchanged") {
        // sums divide exactly by the power-of-two group size
        stats::sample_set g1{"g1", {1.0, 2.0, 3.0, 4.0}};
        stats::sample_set g1_shifted{"g1s", {257.0, 258.0, 259.0, 260.0}};
        stats::sample_set g2{"g2", {5.0, 9.0, 2.0, 8.0}};
        auto a = stats::levene_test({g1, g2});
        auto b = stats::levene_test({g1_shifted, g2});
        CHECK(a.statistic == b.statistic);
        CHECK(*a.p_value == *b.p_value);
    }

    SUBCASE("common positive scaling leaves W unchanged") {
        std::mt19937_64 rng(17);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<stats::sample_set> groups;
            std::vector<stats::sample_set> scaled;
            double factor = 0.25 + static_cast<double>(rng() % 100);
            for (int g = 0; g < 3; ++g) {
                stats::sample_set s{"g", {}};
                stats::sample_set t{"gs", {}};
                int n = 3 + static_cast<int>(rng() % 10);
                for (int i = 0; i < n; ++i) {
                    double v = static_cast<double>(rng() % 10000) / 100.0;
                    s.values.push_back(v);
                    t.values.push_back(v * factor);
                }
                groups.push_back(std::move(s));
                scaled.push_back(std::move(t));
            }
            auto a = stats::levene_test(groups);
            auto b = stats::levene_test(scaled);
            CHECK(a.statistic == Approx(b.statistic).epsilon(1e-9));
        }
    }

    SUBCASE("median centering matches the reference variant") {
        stats::sample_set g1{"g1", {1.0, 2.0, 50.0, 4.0, 5.0}};
        stats::sample_set g2{"g2", {10.0, 20.0, 30.0, 40.0, 500.0}};
        auto report = stats::levene_test({g1, g2}, stats::centering::median);
        auto ref = testref::levene_direct({g1.values, g2.values}, true);
        CHECK(report.statistic == Approx(ref.w).epsilon(1e-9));
        CHECK(*report.p_value == Approx(ref.p).epsilon(1e-6));
    }

    SUBCASE("degenerate spreads") {
        // all deviations identical across groups: no evidence
        stats::sample_set g1{"g1", {1.0, 3.0}};
        stats::sample_set g2{"g2", {6.0, 8.0}};
        auto report = stats::levene_test({g1, g2});
        CHECK(report.statistic == 0.0);
        CHECK(*report.p_value == 1.0);

        // zero within-group spread but different deviations: perfect separation
        stats::sample_set g3{"g3", {0.0, 2.0}};
        stats::sample_set g4{"g4", {0.0, 40.0}};
        auto separated = stats::levene_test({g3, g4});
        CHECK(std::isinf(separated.statistic));
        CHECK(*separated.p_value == 0.0);
        CHECK(separated.reject_null);
    }

    SUBCASE("errors") {
        stats::sample_set g{"g", {1.0, 2.0}};
        CHECK_THROWS_AS(stats::levene_test({g}), insufficient_data);
        stats::sample_set tiny{"t", {1.0}};
        CHECK_THROWS_AS(stats::levene_test({g, tiny}), insufficient_data);
    }
}

TEST_CASE("f_upper_tail") {
    CHECK(stats::f_upper_tail(0.0, 3, 7) == 1.0);
    // standard F-table value
    CHECK(std::fabs(stats::f_upper_tail(4.965, 1, 10) - 0.050) < 1e-3);

    SUBCASE("monotone non-increasing in x") {
        double prev = 1.0;
        for (double x = 0.0; x <= 20.0; x += 0.25) {
            double p = stats::f_upper_tail(x, 3, 12);
            CHECK(p <= prev + 1e-15);
            prev = p;
        }
        CHECK(prev < 1e-4);
    }

    SUBCASE("reciprocal identity") {
        std::mt19937_64 rng(5);
        for (int i = 0; i < 50; ++i) {
            double x = 0.05 + static_cast<double>(rng() % 1000) / 100.0;
            unsigned d1 = 1 + static_cast<unsigned>(rng() % 20);
            unsigned d2 = 1 + static_cast<unsigned>(rng() % 20);
            double sum = stats::f_upper_tail(x, d1, d2) +
                         stats::f_upper_tail(1.0 / x, d2, d1);
            CHECK(sum == Approx(1.0).epsilon(1e-10));
        }
    }

    SUBCASE("agrees with the quadrature reference") {
        for (unsigned d1 : {1u, 2u, 5u, 49u}) {
            for (unsigned d2 : {1u, 8u, 60u, 196u}) {
                for (double x : {0.1, 0.7, 1.0, 2.5, 6.0}) {
                    double impl = stats::f_upper_tail(x, d1, d2);
                    double ref = testref::f_upper_tail_quadrature(x, d1, d2);
                    CHECK(std::fabs(impl - ref) < 1e-8);
                }
            }
        }
    }

    SUBCASE("errors") {
        CHECK_THROWS_AS(stats::f_upper_tail(1.0, 0, 5), std::invalid_argument);
        CHECK_THROWS_AS(stats::f_upper_tail(1.0, 5, 0), std::invalid_argument);
        CHECK_THROWS_AS(stats::f_upper_tail(-0.5, 5, 5), std::invalid_argument);
    }
}

TEST_CASE("regularized incomplete beta closed forms") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 200; ++i) {
        double x = static_cast<double>(rng() % 999 + 1) / 1000.0;
        double b = 0.5 + static_cast<double>(rng() % 50) / 4.0;
        // I_x(1, b) = 1 - (1-x)^b and I_x(a, 1) = x^a
        CHECK(stats::regularized_incomplete_beta(1.0, b, x) ==
              Approx(1.0 - std::pow(1.0 - x, b)).epsilon(1e-12));
        CHECK(stats::regularized_incomplete_beta(b, 1.0, x) ==
              Approx(std::pow(x, b)).epsilon(1e-12));
        // symmetry
        CHECK(stats::regularized_incomplete_beta(b, 2.5, x) ==
              Approx(1.0 - stats::regularized_incomplete_beta(2.5, b, 1.0 - x))
                  .epsilon(1e-11));
    }
    // inverse round-trip
    for (double p : {0.01, 0.1, 0.5, 0.9, 0.99}) {
        double z = stats::incomplete_beta_inverse(3.5, 1.5, p);
        CHECK(stats::regularized_incomplete_beta(3.5, 1.5, z) == Approx(p).epsilon(1e-10));
    }
}

TEST_CASE("ks_uniform_test") {
    SUBCASE("critical value at n = 100") {
        std::vector<double> xs;
        for (int i = 1; i <= 100; ++i) {
            xs.push_back((i - 0.5) / 100.0);
        }
        auto report = stats::ks_uniform_test(xs, 0.0, 1.0);
        CHECK(*report.threshold == Approx(0.136).epsilon(1e-12));
        CHECK(report.statistic == Approx(0.005).epsilon(1e-9));
        CHECK_FALSE(report.reject_null);
    }

    SUBCASE("degenerate sample maximizes D") {
        std::vector<double> xs(60, 2.0);
        auto report = stats::ks_uniform_test(xs, 2.0, 3.0);
        CHECK(report.statistic == 1.0);
        CHECK(report.reject_null);
    }

    SUBCASE("regime and domain errors") {
        std::vector<double> xs(50, 0.5);
        CHECK_THROWS_AS(stats::ks_uniform_test(xs, 0.0, 1.0), out_of_regime);
        std::vector<double> out(60, 1.5);
        CHECK_THROWS_AS(stats::ks_uniform_test(out, 0.0, 1.0), std::invalid_argument);
        std::vector<double> ok(60, 0.5);
        CHECK_THROWS_AS(stats::ks_uniform_test(ok, 1.0, 0.0), std::invalid_argument);
    }

    SUBCASE("matches the counting reference exactly") {
        std::mt19937_64 rng(77);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> xs;
            for (int i = 0; i < 60; ++i) {
                xs.push_back(static_cast<double>(rng() % 10000) / 10000.0);
            }
            auto report = stats::ks_uniform_test(xs, 0.0, 1.0);
            CHECK(report.statistic == Approx(testref::ks_counting(xs, 0.0, 1.0))
                                          .epsilon(1e-12));
        }
    }

    SUBCASE("dense-grid supremum agrees to grid resolution") {
        std::mt19937_64 rng(78);
        std::vector<double> xs;
        for (int i = 0; i < 60; ++i) {
            xs.push_back(static_cast<double>(rng() % 10000) / 10000.0);
        }
        auto report = stats::ks_uniform_test(xs, 0.0, 1.0);
        const std::size_t grid = 200000;
        double approx = testref::ks_grid_supremum(xs, 0.0, 1.0, grid);
        CHECK(std::fabs(report.statistic - approx) <= 1.0 / grid + 1e-12);
    }

    SUBCASE("ties are handled by the sorted-index formula") {
        std::vector<double> xs;
        for (int i = 0; i < 60; ++i) {
            xs.push_back(i % 2 == 0 ? 0.25 : 0.75);
        }
        auto report = stats::ks_uniform_test(xs, 0.0, 1.0);
        CHECK(report.statistic == Approx(testref::ks_counting(xs, 0.0, 1.0))
                                      .epsilon(1e-12));
        CHECK(report.statistic == Approx(0.25).epsilon(1e-12));
    }

    SUBCASE("affine rescaling leaves D unchanged") {
        std::mt19937_64 rng(79);
        std::vector<double> xs;
        for (int i = 0; i < 80; ++i) {
            xs.push_back(static_cast<double>(rng() % 4096) / 4096.0);
        }
        auto base = stats::ks_uniform_test(xs, 0.0, 1.0);
        std::vector<double> scaled;
        for (double v : xs) {
            scaled.push_back(v * 64.0 + 1024.0);
        }
        auto moved = stats::ks_uniform_test(scaled, 1024.0, 1088.0);
        CHECK(base.statistic == Approx(moved.statistic).epsilon(1e-12));
    }

    SUBCASE("seeded uniform lattice batches rarely reject") {
        const double lo = static_cast<double>(std::uint64_t{0x0000100000000000});
        const double hi = static_cast<double>(std::uint64_t{0x0000200000000000});
        std::mt19937_64 rng(4242);
        int accepted = 0;
        const int trials = 100;
        for (int t = 0; t < trials; ++t) {
            std::vector<double> xs;
            for (int i = 0; i < 300; ++i) {
                std::uint64_t j = rng() % (std::uint64_t{1} << 20);
                xs.push_back(static_cast<double>(0x0000100000000000 + (j << 24)));
            }
            auto report = stats::ks_uniform_test(xs, lo, hi);
            if (!report.reject_null) {
                ++accepted;
            }
        }
        CHECK(accepted >= 90);
    }
}
