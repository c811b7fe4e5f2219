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

#include <string_view>

// Default data files compiled into the library, so every module has usable
// defaults without an installed asset directory.
namespace unifair::assets {

std::string_view capitals_csv();
std::string_view subject_rules_csv();
std::string_view tagger_prompt();

// Prompt template fragments by file stem: base, regional, background,
// reduced_gender, reduced_class, reduced_nationality, format.
// Returns an empty view for an unknown stem.
std::string_view prompt_template(std::string_view stem);

}  // namespace unifair::assets
