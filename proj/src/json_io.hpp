// Copyright 2026 The ubru Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UBRU_SRC_JSON_IO_HPP_
#define UBRU_SRC_JSON_IO_HPP_

#include <string>

#include "json.hpp"

namespace ubru::detail {

// Compact JSON text in which every floating-point number is printed with 17
// significant digits, enough to reproduce the exact double on parse.
std::string dump_json(const nlohmann::json& value);

std::string read_file(const std::string& path);
// Writes through a temporary file and renames it into place.
void write_file(const std::string& path, const std::string& text);

}  // namespace ubru::detail

#endif  // UBRU_SRC_JSON_IO_HPP_
