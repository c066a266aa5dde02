// error.hpp
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

namespace corpsim {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (ARPA, CSV, embedding files). Carries the 1-based line.
class ParseError : public Error {
 public:
  ParseError(std::string what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A failure inside one similarity measure, labeled with the measure's name.
class MeasureError : public Error {
 public:
  MeasureError(std::string measure, const std::string& what)
      : Error(measure + ": " + what), measure_(std::move(measure)) {}

  const std::string& measure() const noexcept { return measure_; }

 private:
  std::string measure_;
};

}  // namespace corpsim
