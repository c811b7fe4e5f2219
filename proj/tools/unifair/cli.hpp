// Copyright 2026 The unifair Authors.
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

#include <iosfwd>

namespace unifair::cli {

// Runs the command line. Machine-readable errors go to `err` as one JSON
// object per line. Returns the process exit code: 0 success, 1 usage error,
// 2 data error, 3 endpoint error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace unifair::cli
