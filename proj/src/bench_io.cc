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

#include "ukaslr/bench_io.hh"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ukaslr::bench {

namespace {

constexpr const char* metrics_header = "run_id,group,campaign,run_time_ms,boot_time_ms,mem_mib";

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    for (;;) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(pos));
            return fields;
        }
        fields.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return line;
}

double parse_nonneg_double(const std::string& field, std::size_t line_no,
                           const char* what) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw parse_error(line_no, std::string("malformed ") + what + " '" + field + "'");
    }
    if (!(value >= 0.0)) {
        throw parse_error(line_no, std::string(what) + " must be non-negative");
    }
    return value;
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return {buf, ptr};
}

void check_id(const std::string& id) {
    if (id.empty() || id.find(',') != std::string::npos ||
        id.find('\n') != std::string::npos || id.find('\r') != std::string::npos) {
        throw std::invalid_argument("id must be non-empty and free of separators");
    }
}

int hex_digit(char c) {
    if (c >= '0' && c <= '9') {
        return c - '0';
    }
    if (c >= 'a' && c <= 'f') {
        return c - 'a' + 10;
    }
    if (c >= 'A' && c <= 'F') {
        return c - 'A' + 10;
    }
    return -1;
}

const char* group_label(group_kind group) {
    return group == group_kind::modified ? "M" : "UM";
}

} // namespace

std::string to_token(group_kind group) {
    return group_label(group);
}

std::string to_token(metric_kind metric) {
    switch (metric) {
    case metric_kind::run_time_ms:
        return "run_time_ms";
    case metric_kind::boot_time_ms:
        return "boot_time_ms";
    case metric_kind::mem_mib:
        return "mem_mib";
    }
    throw std::logic_error("unreachable metric kind");
}

std::string to_token(log_region region) {
    switch (region) {
    case log_region::base:
        return "base";
    case log_region::heap:
        return "heap";
    case log_region::stack:
        return "stack";
    }
    throw std::logic_error("unreachable log region");
}

double metric_sample::metric(metric_kind kind) const {
    switch (kind) {
    case metric_kind::run_time_ms:
        return run_time_ms;
    case metric_kind::boot_time_ms:
        return boot_time_ms;
    case metric_kind::mem_mib:
        return mem_mib;
    }
    throw std::logic_error("unreachable metric kind");
}

std::vector<metric_sample> parse_metrics(std::istream& in) {
    std::vector<metric_sample> samples;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) {
        throw parse_error(1, "missing header");
    }
    ++line_no;
    if (strip_cr(line) != metrics_header) {
        throw parse_error(1, std::string("expected header '") + metrics_header + "'");
    }

    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        auto fields = split_fields(line);
        if (fields.size() != 6) {
            throw parse_error(line_no, "expected 6 comma-separated fields");
        }
        metric_sample s;
        s.run_id = fields[0];
        if (s.run_id.empty()) {
            throw parse_error(line_no, "empty run_id");
        }
        if (fields[1] == "M") {
            s.group = group_kind::modified;
        } else if (fields[1] == "UM") {
            s.group = group_kind::unmodified;
        } else {
            throw parse_error(line_no, "unknown group token '" + fields[1] + "'");
        }
        int campaign = 0;
        auto [ptr, ec] =
            std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), campaign);
        if (ec != std::errc() || ptr != fields[2].data() + fields[2].size()) {
            throw parse_error(line_no, "malformed campaign '" + fields[2] + "'");
        }
        s.campaign = campaign;
        s.run_time_ms = parse_nonneg_double(fields[3], line_no, "run_time_ms");
        s.boot_time_ms = parse_nonneg_double(fields[4], line_no, "boot_time_ms");
        s.mem_mib = parse_nonneg_double(fields[5], line_no, "mem_mib");
        samples.push_back(std::move(s));
    }
    return samples;
}

std::vector<metric_sample> parse_metrics(const std::string& text) {
    std::istringstream in(text);
    return parse_metrics(in);
}

void write_metrics(std::ostream& out, std::span<const metric_sample> samples) {
    out << metrics_header << '\n';
    for (const auto& s : samples) {
        check_id(s.run_id);
        out << s.run_id << ',' << group_label(s.group) << ',' << s.campaign << ','
            << format_double(s.run_time_ms) << ',' << format_double(s.boot_time_ms)
            << ',' << format_double(s.mem_mib) << '\n';
    }
}

std::string format_metrics(std::span<const metric_sample> samples) {
    std::ostringstream out;
    write_metrics(out, samples);
    return out.str();
}

std::string format_address(vas::virtual_address address) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "0x%016llx",
                  static_cast<unsigned long long>(address.value()));
    return buf;
}

std::vector<address_log_entry> read_address_log(std::istream& in) {
    std::vector<address_log_entry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        auto fields = split_fields(line);
        if (fields.size() != 3) {
            throw parse_error(line_no, "expected instance_id,region,address");
        }
        address_log_entry e;
        e.instance_id = fields[0];
        if (e.instance_id.empty()) {
            throw parse_error(line_no, "empty instance_id");
        }
        if (fields[1] == "base") {
            e.region = log_region::base;
        } else if (fields[1] == "heap") {
            e.region = log_region::heap;
        } else if (fields[1] == "stack") {
            e.region = log_region::stack;
        } else {
            throw parse_error(line_no, "unknown region token '" + fields[1] + "'");
        }
        const std::string& addr = fields[2];
        if (addr.size() != 18 || addr[0] != '0' || addr[1] != 'x') {
            throw parse_error(line_no, "address must be 0x-prefixed with 16 hex digits");
        }
        std::uint64_t value = 0;
        for (std::size_t i = 2; i < addr.size(); ++i) {
            int d = hex_digit(addr[i]);
            if (d < 0) {
                throw parse_error(line_no, "non-hex digit in address");
            }
            value = (value << 4) | static_cast<std::uint64_t>(d);
        }
        if (value >= vas::virtual_address::canonical_limit) {
            throw parse_error(line_no, "address outside the canonical low half");
        }
        e.address = vas::virtual_address(value);
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<address_log_entry> read_address_log(const std::string& text) {
    std::istringstream in(text);
    return read_address_log(in);
}

void write_address_log(std::ostream& out, std::span<const address_log_entry> entries) {
    for (const auto& e : entries) {
        check_id(e.instance_id);
        out << e.instance_id << ',' << to_token(e.region) << ','
            << format_address(e.address) << '\n';
    }
}

std::string format_address_log(std::span<const address_log_entry> entries) {
    std::ostringstream out;
    write_address_log(out, entries);
    return out.str();
}

group_summary summarize_group(std::span<const metric_sample> samples,
                              metric_kind metric, double level) {
    if (samples.size() < 2) {
        throw insufficient_data("group summary requires n >= 2");
    }
    std::vector<double> values;
    values.reserve(samples.size());
    for (const auto& s : samples) {
        values.push_back(s.metric(metric));
    }
    group_summary summary;
    summary.n = values.size();
    summary.mean = stats::mean(values);
    summary.sd = stats::sample_sd(values);
    auto ci = stats::confidence_interval(values, level);
    summary.ci_low = ci.low;
    summary.ci_high = ci.high;
    return summary;
}

std::vector<table_row> summarize_by_group(std::span<const metric_sample> samples,
                                          metric_kind metric, double level) {
    std::map<int, std::map<group_kind, std::vector<metric_sample>>> buckets;
    for (const auto& s : samples) {
        buckets[s.campaign][s.group].push_back(s);
    }
    std::vector<table_row> rows;
    for (const auto& [campaign, by_group] : buckets) {
        for (group_kind g : {group_kind::modified, group_kind::unmodified}) {
            auto it = by_group.find(g);
            if (it == by_group.end()) {
                continue;
            }
            rows.push_back({g, campaign, summarize_group(it->second, metric, level)});
        }
    }
    return rows;
}

stats::test_report compare_groups(std::span<const metric_sample> samples,
                                  metric_kind metric, int campaign, double alpha,
                                  stats::centering center) {
    stats::sample_set modified{"M", {}};
    stats::sample_set unmodified{"UM", {}};
    for (const auto& s : samples) {
        if (s.campaign != campaign) {
            continue;
        }
        auto& set = s.group == group_kind::modified ? modified : unmodified;
        set.values.push_back(s.metric(metric));
    }
    if (modified.values.size() < 2 || unmodified.values.size() < 2) {
        throw insufficient_data("campaign " + std::to_string(campaign) +
                                " needs both groups with n >= 2");
    }
    return stats::levene_test({modified, unmodified}, center, alpha);
}

std::string render_metric_table(metric_kind metric, std::span<const table_row> rows) {
    std::ostringstream out;
    char buf[256];
    out << "metric: " << to_token(metric) << '\n';
    std::snprintf(buf, sizeof(buf), "%-8s %6s %14s %14s %14s %14s\n", "run", "n",
                  "mean", "sd", "ci95_low", "ci95_high");
    out << buf;
    for (const auto& row : rows) {
        std::string label = std::string(group_label(row.group)) + " " +
                            std::to_string(row.campaign);
        std::snprintf(buf, sizeof(buf), "%-8s %6zu %14.4f %14.4f %14.4f %14.4f\n",
                      label.c_str(), row.summary.n, row.summary.mean, row.summary.sd,
                      row.summary.ci_low, row.summary.ci_high);
        out << buf;
    }
    return out.str();
}

std::string render_levene_line(metric_kind metric, int campaign,
                               const stats::test_report& report) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "levene %s campaign %d: W=%.4f p=%.4f alpha=%.2f -> %s\n",
                  to_token(metric).c_str(), campaign, report.statistic,
                  report.p_value.value_or(0.0), report.alpha,
                  report.reject_null ? "reject H0 (variances differ)"
                                     : "fail to reject H0 (no significant difference)");
    return buf;
}

std::string render_ks_report(const std::string& region_label,
                             const stats::test_report& report) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "ks %s: n=%zu D=%.6f D_crit=%.6f alpha=%.2f -> %s\n",
                  region_label.c_str(),
                  report.sample_sizes.empty() ? std::size_t{0} : report.sample_sizes[0],
                  report.statistic, report.threshold.value_or(0.0), report.alpha,
                  report.reject_null ? "reject H0 (not uniform)"
                                     : "fail to reject H0 (consistent with uniform)");
    return buf;
}

std::string report_to_json(metric_kind metric, int campaign,
                           std::span<const table_row> rows,
                           const stats::test_report& levene) {
    nlohmann::json doc;
    doc["metric"] = to_token(metric);
    doc["campaign"] = campaign;
    doc["rows"] = nlohmann::json::array();
    for (const auto& row : rows) {
        doc["rows"].push_back({
            {"group", group_label(row.group)},
            {"campaign", row.campaign},
            {"n", row.summary.n},
            {"mean", row.summary.mean},
            {"sd", row.summary.sd},
            {"ci_low", row.summary.ci_low},
            {"ci_high", row.summary.ci_high},
        });
    }
    doc["levene"] = {
        {"W", levene.statistic},
        {"p", levene.p_value.value_or(0.0)},
        {"reject", levene.reject_null},
    };
    return doc.dump(2) + "\n";
}

} // namespace ukaslr::bench
