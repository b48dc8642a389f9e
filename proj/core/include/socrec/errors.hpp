// Copyright 2026 The socrec Authors
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

#ifndef SOCREC__ERRORS_HPP_
#define SOCREC__ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace socrec
{

/// Operand shapes do not agree.
class ShapeError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// A function was called outside of the mode it supports (e.g. a
/// training-only head at inference).
class ContractError : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error
{
public:
  ParseError(std::size_t line, const std::string & what)
  : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
  {
  }

  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Raised by the training loop when a loss or gradient stops being finite.
class NonFiniteLossError : public std::runtime_error
{
public:
  NonFiniteLossError(std::size_t scene, int epoch)
  : std::runtime_error(
      "non-finite loss at epoch " + std::to_string(epoch) + ", scene " + std::to_string(scene)),
    scene_(scene),
    epoch_(epoch)
  {
  }

  std::size_t scene() const { return scene_; }
  int epoch() const { return epoch_; }

private:
  std::size_t scene_;
  int epoch_;
};

}  // namespace socrec

#endif  // SOCREC__ERRORS_HPP_
