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

#ifndef SOCREC__CLI_HPP_
#define SOCREC__CLI_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace socrec::cli
{

/// Outcome of a command: exit code and the files it wrote.
struct CommandResult
{
  int exit_code = 0;
  std::vector<std::filesystem::path> artifacts;
};

struct SynthOptions
{
  std::string config;  // optional key = value file
  std::string out;
  std::optional<std::uint64_t> seed;
};

struct TrainOptions
{
  std::string config;
  std::vector<std::string> data;
  std::string holdout;  // evaluated after training when set
  std::string out;      // output directory
  std::optional<std::uint64_t> seed;
  std::optional<std::string> strategy;
  std::optional<int> epochs;
  std::string resume;  // checkpoint to continue from
  std::size_t k = 20;
  std::optional<double> epsilon;  // overlap threshold for the holdout evaluation, meters
};

struct EvalOptions
{
  std::string checkpoint;
  std::vector<std::string> data;
  std::string holdout;
  std::string out;
  std::size_t k = 20;
  std::optional<double> epsilon;  // defaults to the checkpoint's epsilon
  std::optional<std::uint64_t> seed;
};

struct SweepOptions
{
  TrainOptions train;  // holdout is required
  std::vector<double> values;
};

/// Worker threads from SOCREC_THREADS (default 1). Throws ConfigError on bad values.
std::size_t thread_count();

/// Each command throws on error; run() turns exceptions into a nonzero exit.
CommandResult cmd_synth(const SynthOptions & options, std::ostream & log);
CommandResult cmd_train(const TrainOptions & options, std::ostream & log);
CommandResult cmd_eval(const EvalOptions & options, std::ostream & log);
/// Retrains with each training epsilon and evaluates on the holdout.
CommandResult cmd_sweep_epsilon(const SweepOptions & options, std::ostream & log);
/// Retrains with each difficulty threshold D and evaluates on the holdout.
CommandResult cmd_sweep_d(const SweepOptions & options, std::ostream & log);

/// Parses argv and dispatches to a command. Returns the process exit code.
int run(int argc, const char * const * argv, std::ostream & out, std::ostream & err);

}  // namespace socrec::cli

#endif  // SOCREC__CLI_HPP_
