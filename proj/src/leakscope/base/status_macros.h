// Copyright 2026 The LeakScope Authors
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

#ifndef LEAKSCOPE_BASE_STATUS_MACROS_H_
#define LEAKSCOPE_BASE_STATUS_MACROS_H_

#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define LEAKSCOPE_STATUS_CONCAT_INNER_(a, b) a##b
#define LEAKSCOPE_STATUS_CONCAT_(a, b) LEAKSCOPE_STATUS_CONCAT_INNER_(a, b)

// Returns early from the enclosing function if `expr` is not OK.
#define RETURN_IF_ERROR(expr)                    \
  do {                                           \
    const absl::Status _status = (expr);         \
    if (!_status.ok()) return _status;           \
  } while (0)

// Evaluates a StatusOr expression; on error returns its status, otherwise
// moves the value into `lhs` (which may be a declaration).
#define ASSIGN_OR_RETURN(lhs, expr)                                         \
  ASSIGN_OR_RETURN_IMPL_(                                                   \
      LEAKSCOPE_STATUS_CONCAT_(_status_or_value, __LINE__), lhs, expr)

#define ASSIGN_OR_RETURN_IMPL_(statusor, lhs, expr) \
  auto statusor = (expr);                           \
  if (!statusor.ok()) return statusor.status();     \
  lhs = std::move(statusor).value()

#endif  // LEAKSCOPE_BASE_STATUS_MACROS_H_
