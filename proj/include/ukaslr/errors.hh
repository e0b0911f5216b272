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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ukaslr {

// Base class for recoverable toolkit errors. Plain argument misuse throws
// std::invalid_argument instead.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A requested or generated range intersects an existing reservation.
class overlap_error : public error {
public:
    using error::error;
};

// No free gap exists below the canonical address ceiling.
class space_exhausted : public error {
public:
    using error::error;
};

// A randomized placement could not find a free slot within the retry budget.
class layout_failure : public error {
public:
    using error::error;
};

// A fixed-sequence entropy source ran out of words.
class entropy_exhausted : public error {
public:
    using error::error;
};

// Too few samples or groups for the requested statistic.
class insufficient_data : public error {
public:
    using error::error;
};

// The asymptotic KS critical value only applies for n > 50.
class out_of_regime : public error {
public:
    using error::error;
};

// Malformed input file; carries the 1-based line number.
class parse_error : public error {
public:
    parse_error(std::size_t line, const std::string& message)
        : error("line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

} // namespace ukaslr
