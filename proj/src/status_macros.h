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

#ifndef MOTIONTRACE_SRC_STATUS_MACROS_H_
#define MOTIONTRACE_SRC_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define MT_STATUS_CONCAT_INNER_(a, b) a##b
#define MT_STATUS_CONCAT_(a, b) MT_STATUS_CONCAT_INNER_(a, b)

#define MT_RETURN_IF_ERROR(expr)             \
  do {                                       \
    const absl::Status _mt_status = (expr);  \
    if (!_mt_status.ok()) return _mt_status; \
  } while (0)

#define MT_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, expr) \
  auto tmp = (expr);                              \
  if (!tmp.ok()) return tmp.status();             \
  lhs = std::move(*tmp)

// lhs may be a declaration, e.g. MT_ASSIGN_OR_RETURN(auto x, Parse(...));
#define MT_ASSIGN_OR_RETURN(lhs, expr) \
  MT_ASSIGN_OR_RETURN_IMPL_(           \
      MT_STATUS_CONCAT_(_mt_statusor_, __LINE__), lhs, expr)

#endif  // MOTIONTRACE_SRC_STATUS_MACROS_H_
