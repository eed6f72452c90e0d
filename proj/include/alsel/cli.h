// alsel/cli.h

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

#ifndef ALSEL_CLI_H_
#define ALSEL_CLI_H_

// Command-line front end:
//   alsel preprocess|split|score|select|iterate|report [flags]
// Commands talk to each other only through files in the experiment
// directory. Exit codes follow alsel::ExitCode.

#include <ostream>
#include <string>
#include <vector>

namespace alsel {

/// Runs one command. `args` excludes the program name. Never throws.
int RunCli(const std::vector<std::string> &args, std::ostream &out,
           std::ostream &err);

}  // namespace alsel

#endif  // ALSEL_CLI_H_
