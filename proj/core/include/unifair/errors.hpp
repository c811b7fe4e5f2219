// Copyright 2026 The unifair Authors.
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

#include <stdexcept>
#include <string>
#include <utility>

namespace unifair {

// Categories map one-to-one onto the CLI exit codes (1, 2, 3).
enum class ErrorKind { kUsage, kData, kEndpoint };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& message)
      : Error(ErrorKind::kUsage, message) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& message)
      : Error(ErrorKind::kData, message) {}
};

class EndpointError : public Error {
 public:
  explicit EndpointError(const std::string& message)
      : Error(ErrorKind::kEndpoint, message) {}
};

// A country that is not in the capitals table.
class UnknownCountryError : public DataError {
 public:
  explicit UnknownCountryError(std::string country)
      : DataError("unknown country: '" + country + "'"),
        country_(std::move(country)) {}

  const std::string& country() const { return country_; }

 private:
  std::string country_;
};

// A country with zero catalog universities. Distinct from a zero score.
class NoCoverageError : public DataError {
 public:
  explicit NoCoverageError(std::string country)
      : DataError("no catalog coverage for country: '" + country + "'"),
        country_(std::move(country)) {}

  const std::string& country() const { return country_; }

 private:
  std::string country_;
};

}  // namespace unifair
