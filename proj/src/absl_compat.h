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

#ifndef MOTIONTRACE_SRC_ABSL_COMPAT_H_
#define MOTIONTRACE_SRC_ABSL_COMPAT_H_

#include <string>
#include <string_view>

#include "absl/strings/string_view.h"

namespace motiontrace {

// The packaged Abseil keeps its own string_view type, which does not accept
// std::string_view implicitly.
inline absl::string_view Sv(std::string_view s) { return {s.data(), s.size()}; }
inline absl::string_view Sv(const std::string& s) { return s; }
inline std::string_view Sv(absl::string_view s) { return {s.data(), s.size()}; }

}  // namespace motiontrace

#endif  // MOTIONTRACE_SRC_ABSL_COMPAT_H_
