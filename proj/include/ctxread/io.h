/*
 * Copyright 2026 The ctxread Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CTXREAD_IO_H_
#define CTXREAD_IO_H_

#include <string>
#include <string_view>
#include <vector>

namespace ctxread {

// Throws ConfigError naming the path when it cannot be read.
std::string ReadFile(const std::string& path);

// Writes to a temporary sibling and renames it over `path`.
void WriteFileAtomic(const std::string& path, std::string_view contents);

// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string_view> SplitLines(std::string_view text);
std::vector<std::string_view> SplitTabs(std::string_view line);

// Strict decimal parse of the whole field; false on junk or overflow.
bool ParseDouble(std::string_view field, double* out);
bool ParseInt(std::string_view field, long long* out);

// Number of Unicode code points in UTF-8 text.
std::size_t Utf8Length(std::string_view text);

// Shortest round-trip decimal representation.
std::string FormatDouble(double value);

}  // namespace ctxread

#endif  // CTXREAD_IO_H_
