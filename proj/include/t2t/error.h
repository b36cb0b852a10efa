// error.h
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
//
// Copyright 2026 The t2tmap Authors.
//
// \file
// Exception hierarchy. Each category carries the exit status the t2t tool
// reports when the exception escapes a subcommand.

#ifndef T2T_ERROR_H_
#define T2T_ERROR_H_

#include <stdexcept>
#include <string>

namespace t2t {

enum class ExitCode : int {
  kOk = 0,
  kGeneric = 1,
  kInputParse = 2,
  kAlignment = 3,
  kEstimation = 4,
  kTransducerIo = 5,
  kEvalMismatch = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

// Malformed input text, bad file contents, reserved tokens.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string &what)
      : Error(ExitCode::kInputParse, what) {}
  ParseError(const std::string &source, size_t line, const std::string &what)
      : Error(ExitCode::kInputParse,
              source + ":" + std::to_string(line) + ": " + what) {}
};

class AlignmentError : public Error {
 public:
  explicit AlignmentError(const std::string &what)
      : Error(ExitCode::kAlignment, what) {}
};

class EstimationError : public Error {
 public:
  explicit EstimationError(const std::string &what)
      : Error(ExitCode::kEstimation, what) {}
};

class TransducerError : public Error {
 public:
  explicit TransducerError(const std::string &what)
      : Error(ExitCode::kTransducerIo, what) {}
};

class EvalError : public Error {
 public:
  explicit EvalError(const std::string &what)
      : Error(ExitCode::kEvalMismatch, what) {}
};

// Precondition violations on programmatic inputs (bad config values etc.).
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string &what)
      : Error(ExitCode::kGeneric, what) {}
};

}  // namespace t2t

#endif  // T2T_ERROR_H_
