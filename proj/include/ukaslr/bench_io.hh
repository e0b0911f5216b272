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

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ukaslr/address_space.hh"
#include "ukaslr/stats.hh"

namespace ukaslr::bench {

enum class group_kind { modified, unmodified };
enum class metric_kind { run_time_ms, boot_time_ms, mem_mib };
enum class log_region { base, heap, stack };

std::string to_token(group_kind group);     // "M" / "UM"
std::string to_token(metric_kind metric);   // "run_time_ms" / ...
std::string to_token(log_region region);    // "base" / "heap" / "stack"

// One benchmark observation. The memory figure is the combined VMM plus
// unikernel total and is never decomposed.
struct metric_sample {
    std::string run_id;
    group_kind group = group_kind::modified;
    int campaign = 0;
    double run_time_ms = 0.0;
    double boot_time_ms = 0.0;
    double mem_mib = 0.0;

    double metric(metric_kind kind) const;
    bool operator==(const metric_sample&) const = default;
};

struct address_log_entry {
    std::string instance_id;
    log_region region = log_region::base;
    vas::virtual_address address;

    bool operator==(const address_log_entry&) const = default;
};

// Metrics file: comma-separated, UTF-8, newline-delimited, with header
// run_id,group,campaign,run_time_ms,boot_time_ms,mem_mib.
std::vector<metric_sample> parse_metrics(std::istream& in);
std::vector<metric_sample> parse_metrics(const std::string& text);
void write_metrics(std::ostream& out, std::span<const metric_sample> samples);
std::string format_metrics(std::span<const metric_sample> samples);

// Address log: one record per line, instance_id,region,address with the
// address as 0x-prefixed 16-hex-digit lowercase text.
std::string format_address(vas::virtual_address address);
std::vector<address_log_entry> read_address_log(std::istream& in);
std::vector<address_log_entry> read_address_log(const std::string& text);
void write_address_log(std::ostream& out, std::span<const address_log_entry> entries);
std::string format_address_log(std::span<const address_log_entry> entries);

struct group_summary {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

struct table_row {
    group_kind group = group_kind::modified;
    int campaign = 0;
    group_summary summary;
};

// Summary of one already-filtered group of samples.
group_summary summarize_group(std::span<const metric_sample> samples,
                              metric_kind metric, double level = 0.95);

// One row per (group, campaign), ordered M 1, UM 1, M 2, ... like the
// published tables.
std::vector<table_row> summarize_by_group(std::span<const metric_sample> samples,
                                          metric_kind metric, double level = 0.95);

// Modified-vs-unmodified Levene report for one campaign.
stats::test_report compare_groups(std::span<const metric_sample> samples,
                                  metric_kind metric, int campaign,
                                  double alpha = 0.05,
                                  stats::centering center = stats::centering::mean);

// Deterministic renderings; all values are formatted at render time only.
std::string render_metric_table(metric_kind metric, std::span<const table_row> rows);
std::string render_levene_line(metric_kind metric, int campaign,
                               const stats::test_report& report);
std::string render_ks_report(const std::string& region_label,
                             const stats::test_report& report);

// Structured report: {metric, campaign, rows[], levene:{W,p,reject}}.
std::string report_to_json(metric_kind metric, int campaign,
                           std::span<const table_row> rows,
                           const stats::test_report& levene);

} // namespace ukaslr::bench
