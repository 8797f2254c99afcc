// Copyright 2026 The spokenvec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SPOKENVEC_ERROR_HPP_
#define SPOKENVEC_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spokenvec {

// Root of every exception thrown by the library. The command-line tool maps
// NumericalError to exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Inconsistent or unusable configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data that cannot be processed (too short, non-finite, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// Text input that does not follow its line format. Carries the 1-based line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a semantic rule (end <= start, overlaps).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Binary or text file with the wrong magic, version, or layout.
class FormatError : public Error {
 public:
  using Error::Error;
};

// File that ends early or whose payload does not match its header.
class CorruptionError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Shapes or dimensions that do not agree between caller-supplied objects.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// A quantity that is mathematically undefined for the given input, e.g. the
// cosine of a zero vector or the rank correlation of a constant list.
class UndefinedError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Non-finite values met during training or differentiation.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace spokenvec

#endif  // SPOKENVEC_ERROR_HPP_
