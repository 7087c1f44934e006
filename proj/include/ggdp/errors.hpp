//
// Copyright 2026 The ggdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef GGDP_ERRORS_H_
#define GGDP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace ggdp {

// Invalid parameters, out-of-domain arguments, inconsistent mechanism specs,
// or misuse of command-line flags.  CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unreadable or malformed input/output files (CSV histograms, JSON profiles
// and configs).  Messages include the offending path and, where applicable,
// the 1-based line number.  CLI exit code 3.
class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative solver failed to bracket or converge.  CLI exit code 4.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ggdp

#endif  // GGDP_ERRORS_H_
