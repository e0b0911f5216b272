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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ukaslr/bench_io.hh"
#include "ukaslr/layout.hh"
#include "ukaslr/stats.hh"

namespace {

using namespace ukaslr;

struct policy_overrides {
    layout::randomization_policy base = layout::default_base_policy();
    layout::randomization_policy stack = layout::default_stack_policy();
};

std::uint64_t json_u64(const nlohmann::json& v) {
    if (v.is_string()) {
        return std::stoull(v.get<std::string>(), nullptr, 0);
    }
    return v.get<std::uint64_t>();
}

layout::randomization_policy patch_policy(const layout::randomization_policy& base,
                                          const nlohmann::json& node) {
    std::uint64_t bit_check = base.bit_check;
    std::uint64_t rnd_mask = base.rnd_mask;
    std::uint64_t alignment = base.alignment;
    if (node.contains("bit_check")) {
        bit_check = json_u64(node["bit_check"]);
    }
    if (node.contains("rnd_mask")) {
        rnd_mask = json_u64(node["rnd_mask"]);
    }
    if (node.contains("alignment")) {
        alignment = json_u64(node["alignment"]);
    }
    return {bit_check, rnd_mask, alignment};
}

policy_overrides load_policies(const std::string& config_path) {
    policy_overrides policies;
    if (config_path.empty()) {
        return policies;
    }
    std::ifstream in(config_path);
    if (!in) {
        throw std::runtime_error("cannot open config file: " + config_path);
    }
    nlohmann::json doc = nlohmann::json::parse(in);
    if (doc.contains("base_policy")) {
        policies.base = patch_policy(policies.base, doc["base_policy"]);
    }
    if (doc.contains("stack_policy")) {
        policies.stack = patch_policy(policies.stack, doc["stack_policy"]);
    }
    return policies;
}

std::string instance_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "i%06zu", index);
    return buf;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open output file: " + path);
    }
    out << content;
}

struct simulate_options {
    std::size_t count = 303;
    std::string mode = "seeded";
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::vector<std::uint32_t> fixed_words;
    std::string profile = "rdrand";
    std::size_t heap_segments = 3;
    std::uint64_t stack_size = layout::default_stack_size;
    std::string config_path;
    std::string out_path = "-";
};

int run_simulate(const simulate_options& opt) {
    if (opt.count == 0) {
        throw std::runtime_error("--n must be >= 1");
    }
    policy_overrides policies = load_policies(opt.config_path);

    layout::instance_config cfg;
    cfg.cpu = opt.profile == "rdrand" ? entropy::cpu_profile::with_hardware_entropy()
                                      : entropy::cpu_profile::without_hardware_entropy();
    cfg.heap_segment_count = opt.heap_segments;
    cfg.stack_size = opt.stack_size;
    cfg.base_policy = policies.base;
    cfg.stack_policy = policies.stack;

    if (opt.mode == "hardware") {
        cfg.mode = entropy::source_mode::hardware_sim;
    } else if (opt.mode == "seeded") {
        if (!opt.seed_given) {
            throw std::runtime_error("--seed is required with --mode seeded");
        }
        cfg.mode = entropy::source_mode::seeded;
    } else if (opt.mode == "fixed") {
        if (opt.fixed_words.empty()) {
            throw std::runtime_error("--fixed-word is required with --mode fixed");
        }
        cfg.mode = entropy::source_mode::fixed_sequence;
        cfg.fixed_words = opt.fixed_words;
    } else {
        throw std::runtime_error("unknown mode: " + opt.mode);
    }

    std::vector<bench::address_log_entry> entries;
    for (std::size_t i = 0; i < opt.count; ++i) {
        layout::instance_config instance = cfg;
        instance.instance_id = instance_name(i);
        // Per-instance seeds keep parallel and serial batches identical.
        instance.seed = opt.seed + i;
        layout::layout_record record = layout::simulate_instance(instance);

        entries.push_back({record.instance_id, bench::log_region::base, record.program_base});
        for (const auto& segment : record.heap_segments) {
            entries.push_back({record.instance_id, bench::log_region::heap, segment});
        }
        entries.push_back({record.instance_id, bench::log_region::stack, record.stack_base});
    }

    write_output(opt.out_path, bench::format_address_log(entries));
    return 0;
}

struct analyze_addrs_options {
    std::string log_path;
    std::string region = "base";
    double alpha = 0.05;
    std::string config_path;
    std::string out_path = "-";
};

int run_analyze_addrs(const analyze_addrs_options& opt) {
    policy_overrides policies = load_policies(opt.config_path);

    std::ifstream in(opt.log_path);
    if (!in) {
        throw std::runtime_error("cannot open log file: " + opt.log_path);
    }
    auto entries = bench::read_address_log(in);

    bench::log_region wanted;
    layout::randomization_policy policy = policies.base;
    if (opt.region == "base") {
        wanted = bench::log_region::base;
    } else if (opt.region == "heap") {
        wanted = bench::log_region::heap;
        // heap derives from the base policy
    } else if (opt.region == "stack") {
        wanted = bench::log_region::stack;
        policy = policies.stack;
    } else {
        throw std::runtime_error("unknown region: " + opt.region);
    }

    // One sample per instance; for heap that is the first segment, which
    // keeps the samples independent across instances.
    std::vector<double> samples;
    std::set<std::string> seen;
    for (const auto& e : entries) {
        if (e.region != wanted) {
            continue;
        }
        if (!seen.insert(e.instance_id).second) {
            continue;
        }
        samples.push_back(static_cast<double>(e.address.value()));
    }

    // Lattice values against the continuous uniform over
    // [lower, upper + stride).
    double lo = static_cast<double>(policy.lower_bound());
    double hi = static_cast<double>(policy.upper_bound() + policy.alignment);
    stats::test_report report = stats::ks_uniform_test(samples, lo, hi, opt.alpha);
    write_output(opt.out_path, bench::render_ks_report(opt.region, report));
    return 0;
}

struct analyze_bench_options {
    std::string metrics_path;
    std::string metric = "run";
    int campaign = 2;
    double alpha = 0.05;
    std::string out_path = "-";
    std::string json_path;
};

int run_analyze_bench(const analyze_bench_options& opt) {
    bench::metric_kind metric;
    if (opt.metric == "run") {
        metric = bench::metric_kind::run_time_ms;
    } else if (opt.metric == "boot") {
        metric = bench::metric_kind::boot_time_ms;
    } else if (opt.metric == "mem") {
        metric = bench::metric_kind::mem_mib;
    } else {
        throw std::runtime_error("unknown metric: " + opt.metric);
    }

    std::ifstream in(opt.metrics_path);
    if (!in) {
        throw std::runtime_error("cannot open metrics file: " + opt.metrics_path);
    }
    auto samples = bench::parse_metrics(in);

    auto rows = bench::summarize_by_group(samples, metric);
    auto levene = bench::compare_groups(samples, metric, opt.campaign, opt.alpha);

    std::string text = bench::render_metric_table(metric, rows) +
                       bench::render_levene_line(metric, opt.campaign, levene);
    write_output(opt.out_path, text);

    if (!opt.json_path.empty()) {
        write_output(opt.json_path,
                     bench::report_to_json(metric, opt.campaign, rows, levene));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"OSv-style address-layout simulator and analysis toolkit"};
    app.require_subcommand(1);

    simulate_options sim;
    auto* simulate = app.add_subcommand(
        "simulate", "Run layout instances and write an address log");
    simulate->add_option("--n", sim.count, "Number of instances")->capture_default_str();
    simulate->add_option("--mode", sim.mode, "Entropy mode: hardware|seeded|fixed")
        ->check(CLI::IsMember({"hardware", "seeded", "fixed"}))
        ->capture_default_str();
    auto* seed_opt = simulate->add_option("--seed", sim.seed, "Seed for seeded mode");
    simulate->add_option("--fixed-word", sim.fixed_words,
                         "32-bit entropy words for fixed mode (repeatable)");
    simulate->add_option("--profile", sim.profile, "CPU profile: rdrand|none")
        ->check(CLI::IsMember({"rdrand", "none"}))
        ->capture_default_str();
    simulate->add_option("--heap-segments", sim.heap_segments, "Segments per instance")
        ->capture_default_str();
    simulate->add_option("--stack-size", sim.stack_size, "Stack bytes per instance")
        ->capture_default_str();
    simulate->add_option("--config", sim.config_path, "JSON policy overrides");
    simulate->add_option("--out", sim.out_path, "Output path ('-' for stdout)")
        ->capture_default_str();

    analyze_addrs_options addrs;
    auto* analyze_addrs = app.add_subcommand(
        "analyze-addrs", "KS uniformity test over a logged address region");
    analyze_addrs->add_option("--log", addrs.log_path, "Address log path")->required();
    analyze_addrs->add_option("--region", addrs.region, "Region: base|heap|stack")
        ->check(CLI::IsMember({"base", "heap", "stack"}))
        ->capture_default_str();
    analyze_addrs->add_option("--alpha", addrs.alpha, "Significance level")
        ->capture_default_str();
    analyze_addrs->add_option("--config", addrs.config_path, "JSON policy overrides");
    analyze_addrs->add_option("--out", addrs.out_path, "Output path ('-' for stdout)")
        ->capture_default_str();

    analyze_bench_options benchopt;
    auto* analyze_bench = app.add_subcommand(
        "analyze-bench", "Summaries and Levene comparison for a metrics file");
    analyze_bench->add_option("--metrics", benchopt.metrics_path, "Metrics CSV path")
        ->required();
    analyze_bench->add_option("--metric", benchopt.metric, "Metric: run|boot|mem")
        ->check(CLI::IsMember({"run", "boot", "mem"}))
        ->capture_default_str();
    analyze_bench->add_option("--campaign", benchopt.campaign, "Campaign for the Levene test")
        ->capture_default_str();
    analyze_bench->add_option("--alpha", benchopt.alpha, "Significance level")
        ->capture_default_str();
    analyze_bench->add_option("--out", benchopt.out_path, "Output path ('-' for stdout)")
        ->capture_default_str();
    analyze_bench->add_option("--json", benchopt.json_path, "Structured report path");

    CLI11_PARSE(app, argc, argv);
    sim.seed_given = seed_opt->count() > 0;

    try {
        if (simulate->parsed()) {
            return run_simulate(sim);
        }
        if (analyze_addrs->parsed()) {
            return run_analyze_addrs(addrs);
        }
        if (analyze_bench->parsed()) {
            return run_analyze_bench(benchopt);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
