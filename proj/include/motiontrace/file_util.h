// Copyright 2026 The Motiontrace Authors.
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

#ifndef MOTIONTRACE_FILE_UTIL_H_
#define MOTIONTRACE_FILE_UTIL_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace motiontrace {

absl::StatusOr<std::string> ReadFileToString(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written file. Parent directories are created.
absl::Status WriteFileAtomically(const std::filesystem::path& path,
                                 std::string_view contents);

}  // namespace motiontrace

#endif  // MOTIONTRACE_FILE_UTIL_H_
