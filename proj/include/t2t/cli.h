// cli.h
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
//
// \file
// Entry point of the t2t command-line tool.

#ifndef T2T_CLI_H_
#define T2T_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace t2t {

// Runs one invocation; args[0] is the program name. Returns the process exit
// status: 0 success, 2 input parse, 3 alignment, 4 estimation, 5 transducer
// I/O, 6 evaluation mismatch, 1 anything else.
int RunCli(const std::vector<std::string> &args, std::ostream &out,
           std::ostream &err);

}  // namespace t2t

#endif  // T2T_CLI_H_
