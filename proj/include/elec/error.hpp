// Copyright 2026 The ELEC Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace elec {

/// Root of every exception thrown by the engine. The CLI maps subclasses
/// onto exit codes via `category()`.
class Error : public std::runtime_error {
 public:
  enum class Category { config, data, io, internal };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

#define ELEC_DEFINE_ERROR(Name, Cat)                                   \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(Category::Cat, what) {} \
  };

ELEC_DEFINE_ERROR(ConfigError, config)
ELEC_DEFINE_ERROR(SchemaError, data)
ELEC_DEFINE_ERROR(ParseError, data)
ELEC_DEFINE_ERROR(BindingError, data)
ELEC_DEFINE_ERROR(FormatError, data)
ELEC_DEFINE_ERROR(CorruptionError, data)
ELEC_DEFINE_ERROR(UndefinedMetricError, data)
ELEC_DEFINE_ERROR(IoError, io)
ELEC_DEFINE_ERROR(DimensionError, internal)
ELEC_DEFINE_ERROR(IndexError, internal)
ELEC_DEFINE_ERROR(DomainError, internal)

#undef ELEC_DEFINE_ERROR

}  // namespace elec
