// Copyright 2026 The Synloco Authors
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

#ifndef SYNLOCO_ERRORS_H_
#define SYNLOCO_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace synloco {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// oscillator
class NoOscillation : public Error {
 public:
  using Error::Error;
};

class PeriodNotFound : public Error {
 public:
  using Error::Error;
};

// gait planner
class TooManyCenters : public Error {
 public:
  using Error::Error;
};

class SingularFit : public Error {
 public:
  using Error::Error;
};

// kinematics
class IkUnreachable : public Error {
 public:
  using Error::Error;
};

// file formats
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : Error(what), row_(row), column_(column) {}
  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

// numerics
class NumericalDivergence : public Error {
 public:
  NumericalDivergence(const std::string& what, int env_index = -1)
      : Error(what), env_index_(env_index) {}
  int env_index() const { return env_index_; }

 private:
  int env_index_;
};

class NonFiniteLoss : public Error {
 public:
  NonFiniteLoss(const std::string& what, int minibatch)
      : Error(what), minibatch_(minibatch) {}
  int minibatch() const { return minibatch_; }

 private:
  int minibatch_;
};

}  // namespace synloco

#endif  // SYNLOCO_ERRORS_H_
