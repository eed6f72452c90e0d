// alsel/errors.h

// Copyright 2026  The alsel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ALSEL_ERRORS_H_
#define ALSEL_ERRORS_H_

#include <stdexcept>
#include <string>

namespace alsel {

/// Process exit codes shared by every command.
enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,       // bad input or violated contract
  kExitInfeasible = 2,  // configuration cannot be satisfied
  kExitIntegrity = 3,   // checksum or experiment corruption
};

/// Base of all errors raised by the engine. Carries the exit code the CLI
/// should report for it.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what, int exit_code = kExitInput)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string &what)
      : Error(what, kExitInfeasible) {}
};

class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string &what)
      : Error(what, kExitIntegrity) {}
};

}  // namespace alsel

#endif  // ALSEL_ERRORS_H_
